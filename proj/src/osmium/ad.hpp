#pragma once

#include <cmath>

namespace osmium::ad {

// Order-2 forward-mode value: carries gradient and Hessian with respect to a
// small set of arguments (the transformed mole fractions and pressure). The
// capacity bounds the species count at n <= kMaxArgs. Only the leading n
// entries of the buffers are meaningful; operations never touch the rest.
inline constexpr int kMaxArgs = 9;

struct Dual {
  double v = 0.0;
  int n = 0;
  double g[kMaxArgs];
  double H[kMaxArgs][kMaxArgs];

  Dual() : v(0.0), n(0) {}
  explicit Dual(double value, int nargs) : v(value), n(nargs) {
    for (int i = 0; i < n; ++i) {
      g[i] = 0.0;
      for (int j = 0; j < n; ++j) H[i][j] = 0.0;
    }
  }

  // uninitialized derivative buffers; every operation below fills [0, n)
  static Dual raw(double value, int nargs) {
    Dual d;
    d.v = value;
    d.n = nargs;
    return d;
  }
  static Dual constant(double value, int nargs) { return Dual(value, nargs); }
  static Dual variable(double value, int index, int nargs) {
    Dual d(value, nargs);
    d.g[index] = 1.0;
    return d;
  }
};

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r = Dual::raw(a.v + b.v, a.n);
  for (int i = 0; i < r.n; ++i) {
    r.g[i] = a.g[i] + b.g[i];
    for (int j = 0; j < r.n; ++j) r.H[i][j] = a.H[i][j] + b.H[i][j];
  }
  return r;
}

inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r = Dual::raw(a.v - b.v, a.n);
  for (int i = 0; i < r.n; ++i) {
    r.g[i] = a.g[i] - b.g[i];
    for (int j = 0; j < r.n; ++j) r.H[i][j] = a.H[i][j] - b.H[i][j];
  }
  return r;
}

inline Dual operator-(const Dual& a) {
  Dual r = Dual::raw(-a.v, a.n);
  for (int i = 0; i < r.n; ++i) {
    r.g[i] = -a.g[i];
    for (int j = 0; j < r.n; ++j) r.H[i][j] = -a.H[i][j];
  }
  return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r = Dual::raw(a.v * b.v, a.n);
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j)
      r.H[i][j] = a.H[i][j] * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] + a.v * b.H[i][j];
  return r;
}

// Composition with a scalar function f given f(v), f'(v), f''(v).
inline Dual compose(const Dual& a, double f, double fp, double fpp) {
  Dual r = Dual::raw(f, a.n);
  for (int i = 0; i < r.n; ++i) r.g[i] = fp * a.g[i];
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j) r.H[i][j] = fpp * a.g[i] * a.g[j] + fp * a.H[i][j];
  return r;
}

inline Dual inv(const Dual& a) {
  const double iv = 1.0 / a.v;
  return compose(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Dual operator/(const Dual& a, const Dual& b) { return a * inv(b); }

inline Dual operator+(const Dual& a, double c) {
  Dual r = a;
  r.v += c;
  return r;
}
inline Dual operator+(double c, const Dual& a) { return a + c; }
inline Dual operator-(const Dual& a, double c) { return a + (-c); }
inline Dual operator-(double c, const Dual& a) { return (-a) + c; }
inline Dual operator*(const Dual& a, double c) {
  Dual r = Dual::raw(a.v * c, a.n);
  for (int i = 0; i < r.n; ++i) {
    r.g[i] = a.g[i] * c;
    for (int j = 0; j < r.n; ++j) r.H[i][j] = a.H[i][j] * c;
  }
  return r;
}
inline Dual operator*(double c, const Dual& a) { return a * c; }
inline Dual operator/(const Dual& a, double c) { return a * (1.0 / c); }
inline Dual operator/(double c, const Dual& a) { return inv(a) * c; }

inline Dual log(const Dual& a) {
  const double iv = 1.0 / a.v;
  return compose(a, std::log(a.v), iv, -iv * iv);
}

inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Dual tanh(const Dual& a) {
  const double t = std::tanh(a.v);
  const double sech2 = 1.0 - t * t;
  return compose(a, t, sech2, -2.0 * t * sech2);
}

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}

inline Dual pow(const Dual& a, int k) {
  if (k == 0) return Dual::constant(1.0, a.n);
  const double f = std::pow(a.v, k);
  const double fp = k * std::pow(a.v, k - 1);
  const double fpp = k * (k - 1) * std::pow(a.v, k - 2);
  return compose(a, f, fp, fpp);
}

inline Dual pow(const Dual& a, double e) {
  const double f = std::pow(a.v, e);
  const double fp = e * std::pow(a.v, e - 1.0);
  const double fpp = e * (e - 1.0) * std::pow(a.v, e - 2.0);
  return compose(a, f, fp, fpp);
}

}  // namespace osmium::ad
