#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "syzlab/complex.hpp"
#include "syzlab/errors.hpp"

namespace syzlab {

/// Which fiber coframe the dy generators refer to: dy^j on M, or the dual
/// coframe dy_j on the mirror fiber.
enum class Frame { primal, dual };

/// Generator layout of an exterior algebra.
///
/// A phase layout has 2n generators ordered dx^1 < ... < dx^n < dy^1 < ... < dy^n.
/// A plain layout has m generators e^1 < ... < e^m and is the target of
/// restrictions to cycles and sections.
struct Layout {
  int n = 0;
  bool phase = true;
  Frame frame = Frame::primal;

  static Layout phase_space(int n, Frame f = Frame::primal) { return {n, true, f}; }
  static Layout plain(int m) { return {m, false, Frame::primal}; }

  int generators() const { return phase ? 2 * n : n; }
  friend bool operator==(const Layout&, const Layout&) = default;
};

/// Basis monomial as a bitmask over generator indices (bit i = generator i).
using Mask = std::uint32_t;

inline int degree_of(Mask m) { return __builtin_popcount(m); }

/// Sign (+1/-1) of e_a ∧ e_b relative to the sorted monomial e_{a|b}; 0 if they share a generator.
int wedge_sign(Mask a, Mask b);

/// Complex-coefficient element of the exterior algebra with constant
/// coefficients. T is double or Rational; mixing the two does not compile.
/// Zero coefficients are never stored.
template <class T>
class Form {
 public:
  using Scalar = T;
  using Coeff = Complex<T>;

  Form() = default;
  explicit Form(Layout layout);

  static Form zero(Layout layout) { return Form(layout); }
  static Form constant(Layout layout, Coeff c);
  /// Generator with 0-based index (dx^{j+1} for j < n, dy^{j-n+1} after, in a phase layout).
  static Form generator(Layout layout, int index, Coeff c = Coeff(1));
  static Form dx(int n, int j) { return generator(Layout::phase_space(n), j - 1); }
  static Form dy(int n, int j) { return generator(Layout::phase_space(n), n + j - 1); }
  static Form monomial(Layout layout, Mask mask, Coeff c = Coeff(1));

  const Layout& layout() const { return layout_; }
  int n() const { return layout_.n; }
  int generators() const { return layout_.generators(); }
  const std::map<Mask, Coeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Coeff coefficient(Mask m) const;

  /// Adds c to the coefficient of the monomial, dropping it if the sum is zero.
  void add_term(Mask m, const Coeff& c);

  /// Highest degree present; -1 for the zero form.
  int max_degree() const;
  bool is_homogeneous(int k) const;
  /// Part of exactly degree k.
  Form part(int k) const;

  Form conj() const;
  Form with_frame(Frame f) const;

  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  Form& operator*=(const Coeff& s);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(Form a) { return a *= Coeff(-1); }
  friend Form operator*(Form a, const Coeff& s) { return a *= s; }
  friend Form operator*(const Coeff& s, Form a) { return a *= s; }
  friend bool operator==(const Form& a, const Form& b) { return a.layout_ == b.layout_ && a.terms_ == b.terms_; }

 private:
  Layout layout_{};
  std::map<Mask, Coeff> terms_;
};

using RealForm = Form<double>;
using ExactForm = Form<Rational>;

template <class T>
Form<T> wedge(const Form<T>& a, const Form<T>& b);

template <class T>
Form<T> power(const Form<T>& a, int k);

/// Interior product with a (possibly complex) vector of length `generators()`.
template <class T>
Form<T> contract(std::span<const Complex<T>> v, const Form<T>& a);
template <class T>
Form<T> contract(const std::vector<T>& v, const Form<T>& a);

/// Coefficient against the volume monomial: dx^1∧dy^1∧…∧dx^n∧dy^n in a phase
/// layout, e^1∧…∧e^m in a plain layout. Zero if absent.
template <class T>
Complex<T> top_coefficient(const Form<T>& a);

/// Fiberwise Fourier transform dx^J∧dy^K ↦ dx^J∧ι_{k_1}…ι_{k_p}(dy_1∧…∧dy_n), i.e.
/// s(K)·(−1)^{p(p−1)/2}·dx^J∧dy_{K^c} with s(K) the sign of the shuffle putting K
/// before its complement. Flips the frame tag. With this sign the conjugated
/// Lefschetz operators of the two sides commute.
template <class T>
Form<T> fiber_fourier(const Form<T>& a);

/// Pullback along a linear map given by the image of every source generator
/// (a degree-1 form in the target layout, or zero).
template <class T>
Form<T> pullback(const Form<T>& a, const std::vector<Form<T>>& generator_images, Layout target);

/// Restriction to the span of a frame: generator e^i of the plain result pairs
/// with frame[i]. This is the pullback along the inclusion R^m → R^{2n}.
template <class T>
Form<T> restrict_to_frame(const Form<T>& a, const std::vector<std::vector<T>>& frame);

/// a(v_1, …, v_k) for the degree-k part of a.
template <class T>
Complex<T> evaluate(const Form<T>& a, const std::vector<std::vector<T>>& vectors);

/// Canonical text: one line per monomial, "(re,im) dx1^dy2"; the empty
/// monomial prints as "1". Dual-frame generators print as dy_j, plain ones as e_j.
template <class T>
std::string to_text(const Form<T>& a);

template <class T>
Form<T> form_from_text(Layout layout, const std::string& text);

/// Name of generator `index` in a layout, e.g. "dx1", "dy2", "dy_2", "e3".
std::string generator_name(const Layout& layout, int index);
std::string monomial_name(const Layout& layout, Mask m);

/// Runtime-tagged form for code paths that choose precision from
/// configuration. Operations on mismatched precisions throw PrecisionMismatch.
class AnyForm {
 public:
  enum class Precision { exact, real };

  AnyForm(RealForm f) : value_(std::move(f)) {}   // NOLINT(google-explicit-constructor)
  AnyForm(ExactForm f) : value_(std::move(f)) {}  // NOLINT(google-explicit-constructor)

  Precision precision() const { return value_.index() == 0 ? Precision::real : Precision::exact; }
  const RealForm& real() const;
  const ExactForm& exact() const;
  std::string text() const;

  friend AnyForm wedge(const AnyForm& a, const AnyForm& b);
  friend AnyForm operator+(const AnyForm& a, const AnyForm& b);

 private:
  std::variant<RealForm, ExactForm> value_;
};

}  // namespace syzlab
