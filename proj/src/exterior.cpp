#include "syzlab/exterior.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace syzlab {

int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  // Count pairs (i in a, j in b) with i > j: each is one transposition.
  int inversions = 0;
  Mask rest = b;
  while (rest) {
    int j = __builtin_ctz(rest);
    rest &= rest - 1;
    Mask above = (j >= 31) ? 0u : (a & ~((Mask{2} << j) - 1));
    inversions += __builtin_popcount(above);
  }
  return (inversions & 1) ? -1 : 1;
}

namespace {

void check_layout(const Layout& a, const Layout& b, const char* op) {
  if (a.n != b.n || a.phase != b.phase)
    throw ValidationError(std::string(op) + ": dimension mismatch");
  if (a.frame != b.frame) throw ValidationError(std::string(op) + ": fiber frame mismatch");
}

Mask full_mask(int generators) { return generators >= 32 ? ~Mask{0} : ((Mask{1} << generators) - 1); }

template <class T>
Complex<T> signed_coeff(int sign, const Complex<T>& c) {
  return sign > 0 ? c : -c;
}

}  // namespace

template <class T>
Form<T>::Form(Layout layout) : layout_(layout) {
  if (layout.n < 0 || layout.generators() > 30) throw ValidationError("exterior form: unsupported dimension");
}

template <class T>
Form<T> Form<T>::constant(Layout layout, Coeff c) {
  Form f(layout);
  f.add_term(0, c);
  return f;
}

template <class T>
Form<T> Form<T>::generator(Layout layout, int index, Coeff c) {
  Form f(layout);
  if (index < 0 || index >= layout.generators()) throw ValidationError("exterior form: generator index out of range");
  f.add_term(Mask{1} << index, c);
  return f;
}

template <class T>
Form<T> Form<T>::monomial(Layout layout, Mask mask, Coeff c) {
  Form f(layout);
  if (mask & ~full_mask(layout.generators())) throw ValidationError("exterior form: monomial out of range");
  f.add_term(mask, c);
  return f;
}

template <class T>
typename Form<T>::Coeff Form<T>::coefficient(Mask m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Coeff(0) : it->second;
}

template <class T>
void Form<T>::add_term(Mask m, const Coeff& c) {
  if (c.zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.zero()) terms_.erase(it);
  }
}

template <class T>
int Form<T>::max_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, degree_of(m));
  return d;
}

template <class T>
bool Form<T>::is_homogeneous(int k) const {
  return std::all_of(terms_.begin(), terms_.end(), [k](const auto& t) { return degree_of(t.first) == k; });
}

template <class T>
Form<T> Form<T>::part(int k) const {
  Form out(layout_);
  for (const auto& [m, c] : terms_)
    if (degree_of(m) == k) out.terms_.emplace(m, c);
  return out;
}

template <class T>
Form<T> Form<T>::conj() const {
  Form out(layout_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, c.conj());
  return out;
}

template <class T>
Form<T> Form<T>::with_frame(Frame f) const {
  Form out = *this;
  out.layout_.frame = f;
  return out;
}

template <class T>
Form<T>& Form<T>::operator+=(const Form& o) {
  check_layout(layout_, o.layout_, "sum");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

template <class T>
Form<T>& Form<T>::operator-=(const Form& o) {
  check_layout(layout_, o.layout_, "difference");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

template <class T>
Form<T>& Form<T>::operator*=(const Coeff& s) {
  if (s.zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

template <class T>
Form<T> wedge(const Form<T>& a, const Form<T>& b) {
  check_layout(a.layout(), b.layout(), "wedge");
  Form<T> out(a.layout());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      out.add_term(ma | mb, signed_coeff(s, ca * cb));
    }
  return out;
}

template <class T>
Form<T> power(const Form<T>& a, int k) {
  if (k < 0) throw ValidationError("power: negative exponent");
  Form<T> out = Form<T>::constant(a.layout(), Complex<T>(1));
  for (int i = 0; i < k; ++i) {
    out = wedge(out, a);
    if (out.is_zero()) break;
  }
  return out;
}

template <class T>
Form<T> contract(std::span<const Complex<T>> v, const Form<T>& a) {
  if (static_cast<int>(v.size()) != a.generators()) throw ValidationError("contract: vector dimension mismatch");
  Form<T> out(a.layout());
  for (const auto& [m, c] : a.terms()) {
    int position = 0;
    Mask rest = m;
    while (rest) {
      int i = __builtin_ctz(rest);
      rest &= rest - 1;
      if (!v[i].zero()) {
        Complex<T> term = c * v[i];
        out.add_term(m & ~(Mask{1} << i), (position & 1) ? -term : term);
      }
      ++position;
    }
  }
  return out;
}

template <class T>
Form<T> contract(const std::vector<T>& v, const Form<T>& a) {
  std::vector<Complex<T>> cv(v.begin(), v.end());
  return contract<T>(std::span<const Complex<T>>(cv), a);
}

template <class T>
Complex<T> top_coefficient(const Form<T>& a) {
  const Layout& l = a.layout();
  Complex<T> c = a.coefficient(full_mask(l.generators()));
  // Canonical order dx^1..dx^n dy^1..dy^n differs from the interleaved
  // volume monomial by n(n-1)/2 transpositions.
  if (l.phase && ((l.n * (l.n - 1) / 2) & 1)) c = -c;
  return c;
}

template <class T>
Form<T> fiber_fourier(const Form<T>& a) {
  const Layout& l = a.layout();
  if (!l.phase) throw ValidationError("fiber_fourier: requires a phase-space layout");
  const int n = l.n;
  const Mask base_bits = full_mask(n);
  Layout target = l;
  target.frame = (l.frame == Frame::primal) ? Frame::dual : Frame::primal;
  Form<T> out(target);
  for (const auto& [m, c] : a.terms()) {
    Mask x = m & base_bits;
    Mask k = (m >> n) & base_bits;
    Mask kc = base_bits & ~k;
    // dy^K -> ι_{k_1}…ι_{k_p}(dy_1∧…∧dy_n): shuffle sign of (K, K^c) times (−1)^{p(p−1)/2}.
    const int p = degree_of(k);
    int s = wedge_sign(k, kc) * ((p * (p - 1) / 2) % 2 ? -1 : 1);
    out.add_term(x | (kc << n), signed_coeff(s, c));
  }
  return out;
}

template <class T>
Form<T> pullback(const Form<T>& a, const std::vector<Form<T>>& images, Layout target) {
  if (static_cast<int>(images.size()) != a.generators())
    throw ValidationError("pullback: need one image per source generator");
  for (const auto& img : images) {
    check_layout(img.layout(), target, "pullback");
    if (!img.is_homogeneous(1)) throw ValidationError("pullback: generator images must be 1-forms");
  }
  Form<T> out(target);
  for (const auto& [m, c] : a.terms()) {
    Form<T> term = Form<T>::constant(target, c);
    Mask rest = m;
    while (rest && !term.is_zero()) {
      int i = __builtin_ctz(rest);
      rest &= rest - 1;
      term = wedge(term, images[i]);
    }
    out += term;
  }
  return out;
}

template <class T>
Form<T> restrict_to_frame(const Form<T>& a, const std::vector<std::vector<T>>& frame) {
  const int m = static_cast<int>(frame.size());
  Layout target = Layout::plain(m);
  std::vector<Form<T>> images;
  images.reserve(a.generators());
  for (int s = 0; s < a.generators(); ++s) {
    Form<T> img(target);
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(frame[i].size()) != a.generators())
        throw ValidationError("restrict_to_frame: frame vector dimension mismatch");
      img.add_term(Mask{1} << i, Complex<T>(frame[i][s]));
    }
    images.push_back(std::move(img));
  }
  return pullback(a, images, target);
}

template <class T>
Complex<T> evaluate(const Form<T>& a, const std::vector<std::vector<T>>& vectors) {
  Form<T> cur = a.part(static_cast<int>(vectors.size()));
  for (const auto& v : vectors) cur = contract(v, cur);
  return cur.coefficient(0);
}

std::string generator_name(const Layout& layout, int index) {
  if (!layout.phase) return "e" + std::to_string(index + 1);
  if (index < layout.n) return "dx" + std::to_string(index + 1);
  std::string j = std::to_string(index - layout.n + 1);
  return layout.frame == Frame::dual ? "dy_" + j : "dy" + j;
}

std::string monomial_name(const Layout& layout, Mask m) {
  if (m == 0) return "1";
  std::string out;
  Mask rest = m;
  while (rest) {
    int i = __builtin_ctz(rest);
    rest &= rest - 1;
    if (!out.empty()) out += '^';
    out += generator_name(layout, i);
  }
  return out;
}

namespace {

std::string scalar_text(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
std::string scalar_text(const Rational& x) { return to_string(x); }

// Decimal or exponent literals go through strtod; "p/q" through the exact parser.
std::string trimmed(const std::string& s) {
  auto a = s.find_first_not_of(' '), b = s.find_last_not_of(' ');
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double parse_scalar(const std::string& text, double*) {
  std::string s = trimmed(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin && *end == '\0') return v;
  return to_double(parse_rational(s));
}
Rational parse_scalar(const std::string& s, Rational*) { return parse_rational(trimmed(s)); }

int parse_generator(const Layout& layout, const std::string& name) {
  for (int i = 0; i < layout.generators(); ++i)
    if (generator_name(layout, i) == name) return i;
  throw ValidationError("form text: unknown generator '" + name + "'");
}

}  // namespace

template <class T>
std::string to_text(const Form<T>& a) {
  std::vector<std::pair<Mask, const Complex<T>*>> order;
  for (const auto& [m, c] : a.terms()) order.emplace_back(m, &c);
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    int dx = degree_of(x.first), dy = degree_of(y.first);
    return dx != dy ? dx < dy : x.first < y.first;
  });
  std::string out;
  for (const auto& [m, c] : order) {
    out += '(' + scalar_text(c->re) + ',' + scalar_text(c->im) + ") " + monomial_name(a.layout(), m) + '\n';
  }
  return out;
}

template <class T>
Form<T> form_from_text(Layout layout, const std::string& text) {
  Form<T> out(layout);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto open = line.find('(');
    auto comma = line.find(',', open);
    auto close = line.find(')', comma);
    if (open == std::string::npos || comma == std::string::npos || close == std::string::npos)
      throw ValidationError("form text: malformed line '" + line + "'");
    T re = parse_scalar(line.substr(open + 1, comma - open - 1), static_cast<T*>(nullptr));
    T im = parse_scalar(line.substr(comma + 1, close - comma - 1), static_cast<T*>(nullptr));
    std::string mono = line.substr(close + 1);
    mono.erase(0, mono.find_first_not_of(' '));
    mono.erase(mono.find_last_not_of(" \r") + 1);
    Form<T> term = Form<T>::constant(layout, Complex<T>(re, im));
    if (mono != "1") {
      std::istringstream parts(mono);
      std::string g;
      while (std::getline(parts, g, '^')) term = wedge(term, Form<T>::generator(layout, parse_generator(layout, g)));
    }
    out += term;
  }
  return out;
}

const RealForm& AnyForm::real() const {
  if (auto p = std::get_if<RealForm>(&value_)) return *p;
  throw PrecisionMismatch("expected a double-precision form");
}

const ExactForm& AnyForm::exact() const {
  if (auto p = std::get_if<ExactForm>(&value_)) return *p;
  throw PrecisionMismatch("expected an exact form");
}

std::string AnyForm::text() const {
  return std::visit([](const auto& f) { return to_text(f); }, value_);
}

AnyForm wedge(const AnyForm& a, const AnyForm& b) {
  if (a.precision() != b.precision()) throw PrecisionMismatch("wedge: mixed exact and double forms");
  if (a.precision() == AnyForm::Precision::real) return AnyForm(wedge(a.real(), b.real()));
  return AnyForm(wedge(a.exact(), b.exact()));
}

AnyForm operator+(const AnyForm& a, const AnyForm& b) {
  if (a.precision() != b.precision()) throw PrecisionMismatch("sum: mixed exact and double forms");
  if (a.precision() == AnyForm::Precision::real) return AnyForm(a.real() + b.real());
  return AnyForm(a.exact() + b.exact());
}

#define SYZLAB_INSTANTIATE_FORM(T)                                                                   \
  template class Form<T>;                                                                            \
  template Form<T> wedge(const Form<T>&, const Form<T>&);                                            \
  template Form<T> power(const Form<T>&, int);                                                       \
  template Form<T> contract(std::span<const Complex<T>>, const Form<T>&);                            \
  template Form<T> contract(const std::vector<T>&, const Form<T>&);                                  \
  template Complex<T> top_coefficient(const Form<T>&);                                               \
  template Form<T> fiber_fourier(const Form<T>&);                                                    \
  template Form<T> pullback(const Form<T>&, const std::vector<Form<T>>&, Layout);                    \
  template Form<T> restrict_to_frame(const Form<T>&, const std::vector<std::vector<T>>&);            \
  template Complex<T> evaluate(const Form<T>&, const std::vector<std::vector<T>>&);                  \
  template std::string to_text(const Form<T>&);                                                      \
  template Form<T> form_from_text(Layout, const std::string&);

SYZLAB_INSTANTIATE_FORM(double)
SYZLAB_INSTANTIATE_FORM(Rational)

}  // namespace syzlab
