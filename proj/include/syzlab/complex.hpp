#pragma once

#include <cmath>
#include <complex>
#include <ostream>

#include "syzlab/rational.hpp"

namespace syzlab {

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return x.is_zero(); }
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Rational& x) { return std::abs(x.convert_to<double>()); }
inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Complex number over an ordered field. std::complex is only specified for
/// floating-point types, so exact coefficients need their own pair type.
template <class T>
struct Complex {
  T re{};
  T im{};

  Complex() = default;
  Complex(T r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
  Complex(int r) : re(r) {}  // NOLINT(google-explicit-constructor)

  static Complex i() { return Complex(T(0), T(1)); }

  bool zero() const { return is_zero(re) && is_zero(im); }
  Complex conj() const { return Complex(re, -im); }
  T norm_squared() const { return re * re + im * im; }

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    T i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    T d = o.norm_squared();
    T r = (re * o.re + im * o.im) / d;
    T i = (im * o.re - re * o.im) / d;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

using ComplexD = Complex<double>;
using ComplexQ = Complex<Rational>;

inline bool is_zero(const ComplexD& z) { return z.zero(); }
inline bool is_zero(const ComplexQ& z) { return z.zero(); }
template <class T>
double magnitude(const Complex<T>& z) {
  return std::hypot(to_double(z.re), to_double(z.im));
}
template <class T>
std::complex<double> to_std(const Complex<T>& z) {
  return {to_double(z.re), to_double(z.im)};
}
inline ComplexD from_std(std::complex<double> z) { return {z.real(), z.imag()}; }

/// Complex power i^k for integer k (exact).
template <class T>
Complex<T> i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return Complex<T>(T(1), T(0));
    case 1: return Complex<T>(T(0), T(1));
    case 2: return Complex<T>(T(-1), T(0));
    default: return Complex<T>(T(0), T(-1));
  }
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Complex<T>& z) {
  return os << '(' << z.re << ',' << z.im << ')';
}

}  // namespace syzlab
