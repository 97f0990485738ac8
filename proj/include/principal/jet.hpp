#pragma once

// Truncated multivariate Taylor polynomials (forward-mode jets).
//
// A Jet<NV, ORD> carries the Taylor coefficients of a scalar function of NV
// variables about a base point, truncated at total degree ORD. Surfaces are
// written once as templates over the scalar type and evaluated either on
// doubles or on jets, which yields exact derivatives through order ORD.

#include <array>
#include <cmath>
#include <cstddef>

namespace principal {

namespace detail {

constexpr std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of monomials of total degree <= ord in nv variables.
constexpr std::size_t monomial_count(std::size_t nv, std::size_t ord) {
  return binomial(nv + ord, ord);
}

template <std::size_t NV, std::size_t ORD>
struct MonomialTable {
  static constexpr std::size_t size = monomial_count(NV, ORD);
  std::array<std::array<int, NV>, size> exps{};
  std::array<int, size> degree{};
  // product[i][j] = index of monomial i*j, or -1 if truncated.
  std::array<std::array<int, size>, size> product{};

  constexpr MonomialTable() {
    std::size_t n = 0;
    std::array<int, NV> e{};
    for (std::size_t d = 0; d <= ORD; ++d) enumerate(e, 0, static_cast<int>(d), n);
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) {
        product[i][j] = -1;
        if (degree[i] + degree[j] > static_cast<int>(ORD)) continue;
        std::array<int, NV> s{};
        for (std::size_t v = 0; v < NV; ++v) s[v] = exps[i][v] + exps[j][v];
        product[i][j] = static_cast<int>(find(s));
      }
  }

  constexpr void enumerate(std::array<int, NV>& e, std::size_t var, int left, std::size_t& n) {
    if (var + 1 == NV) {
      e[var] = left;
      exps[n] = e;
      int d = 0;
      for (std::size_t v = 0; v < NV; ++v) d += e[v];
      degree[n] = d;
      ++n;
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[var] = k;
      enumerate(e, var + 1, left - k, n);
    }
  }

  constexpr std::size_t find(const std::array<int, NV>& e) const {
    for (std::size_t i = 0; i < size; ++i) {
      bool same = true;
      for (std::size_t v = 0; v < NV; ++v) same = same && exps[i][v] == e[v];
      if (same) return i;
    }
    return size;
  }
};

template <std::size_t NV, std::size_t ORD>
inline constexpr MonomialTable<NV, ORD> monomials{};

}  // namespace detail

template <std::size_t NV, std::size_t ORD>
class Jet {
 public:
  static constexpr std::size_t kVars = NV;
  static constexpr std::size_t kOrder = ORD;
  static constexpr std::size_t kSize = detail::monomial_count(NV, ORD);

  constexpr Jet() = default;
  constexpr Jet(double value) { c_[0] = value; }  // NOLINT: implicit constant promotion

  /// Independent variable number `var` expanded about `value`.
  static Jet variable(std::size_t var, double value) {
    Jet j(value);
    if constexpr (ORD >= 1) {
      std::array<int, NV> e{};
      e[var] = 1;
      j.c_[detail::monomials<NV, ORD>.find(e)] = 1.0;
    }
    return j;
  }

  double value() const { return c_[0]; }
  double coeff(std::size_t i) const { return c_[i]; }
  double& coeff(std::size_t i) { return c_[i]; }

  /// Taylor coefficient of the monomial with exponents `e`.
  double coeff(const std::array<int, NV>& e) const {
    const auto i = detail::monomials<NV, ORD>.find(e);
    return i < kSize ? c_[i] : 0.0;
  }

  /// Partial derivative with multi-index `e` (coefficient times e!).
  double derivative(const std::array<int, NV>& e) const {
    double f = 1.0;
    for (int k : e)
      for (int m = 2; m <= k; ++m) f *= m;
    return coeff(e) * f;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t i = 0; i < kSize; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, double s) {
    a.c_[0] -= s;
    return a;
  }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const auto& t = detail::monomials<NV, ORD>;
    Jet r(0.0);
    for (std::size_t i = 0; i < kSize; ++i) {
      if (a.c_[i] == 0.0) continue;
      for (std::size_t j = 0; j < kSize; ++j) {
        const int k = t.product[i][j];
        if (k >= 0) r.c_[k] += a.c_[i] * b.c_[j];
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
  friend Jet operator/(double s, const Jet& b) { return s * reciprocal(b); }

  /// f(u) = sum_k d[k]/k! (u - u0)^k, with d[k] the k-th derivative of f at u0.
  static Jet compose(const Jet& u, const std::array<double, ORD + 1>& d) {
    Jet delta = u;
    delta.c_[0] = 0.0;
    Jet r(d[0]);
    Jet power(1.0);
    double fact = 1.0;
    for (std::size_t k = 1; k <= ORD; ++k) {
      power = power * delta;
      fact *= static_cast<double>(k);
      r += power * (d[k] / fact);
    }
    return r;
  }

  friend Jet reciprocal(const Jet& u) {
    const double x = u.value();
    std::array<double, ORD + 1> d{};
    double v = 1.0 / x;
    for (std::size_t k = 0; k <= ORD; ++k) {
      d[k] = v;
      v *= -static_cast<double>(k + 1) / x;
    }
    return compose(u, d);
  }

 private:
  std::array<double, kSize> c_{};
};

template <std::size_t NV, std::size_t ORD>
Jet<NV, ORD> sqrt(const Jet<NV, ORD>& u) {
  const double x = u.value();
  std::array<double, ORD + 1> d{};
  double v = std::sqrt(x);
  double p = 0.5;
  for (std::size_t k = 0; k <= ORD; ++k) {
    d[k] = v;
    v *= p / x;
    p -= 1.0;
  }
  return Jet<NV, ORD>::compose(u, d);
}

template <std::size_t NV, std::size_t ORD>
Jet<NV, ORD> exp(const Jet<NV, ORD>& u) {
  std::array<double, ORD + 1> d{};
  d.fill(std::exp(u.value()));
  return Jet<NV, ORD>::compose(u, d);
}

template <std::size_t NV, std::size_t ORD>
Jet<NV, ORD> sin(const Jet<NV, ORD>& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const std::array<double, 4> cyc{s, c, -s, -c};
  std::array<double, ORD + 1> d{};
  for (std::size_t k = 0; k <= ORD; ++k) d[k] = cyc[k % 4];
  return Jet<NV, ORD>::compose(u, d);
}

template <std::size_t NV, std::size_t ORD>
Jet<NV, ORD> cos(const Jet<NV, ORD>& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const std::array<double, 4> cyc{c, -s, -c, s};
  std::array<double, ORD + 1> d{};
  for (std::size_t k = 0; k <= ORD; ++k) d[k] = cyc[k % 4];
  return Jet<NV, ORD>::compose(u, d);
}

template <std::size_t NV, std::size_t ORD>
Jet<NV, ORD> atan(const Jet<NV, ORD>& u) {
  // Derivatives of atan at x: 1/(1+x^2), -2x/(1+x^2)^2, (6x^2-2)/(1+x^2)^3.
  static_assert(ORD <= 3, "atan jets implemented through order 3");
  const double x = u.value();
  const double q = 1.0 / (1.0 + x * x);
  std::array<double, 4> all{std::atan(x), q, -2.0 * x * q * q, (6.0 * x * x - 2.0) * q * q * q};
  std::array<double, ORD + 1> d{};
  for (std::size_t k = 0; k <= ORD; ++k) d[k] = all[k];
  return Jet<NV, ORD>::compose(u, d);
}

/// Branch-correct atan2: angle of (x, y) expanded about the base angle.
template <std::size_t NV, std::size_t ORD>
Jet<NV, ORD> atan2(const Jet<NV, ORD>& y, const Jet<NV, ORD>& x) {
  const double x0 = x.value(), y0 = y.value();
  const double base = std::atan2(y0, x0);
  // tan(angle - base) = (x0*y - y0*x) / (x0*x + y0*y); the ratio has zero value.
  const auto t = (x0 * y - y0 * x) / (x0 * x + y0 * y);
  auto r = atan(t);
  return r + base;
}

template <std::size_t NV, std::size_t ORD>
Jet<NV, ORD> pow(const Jet<NV, ORD>& u, int n) {
  Jet<NV, ORD> r(1.0);
  const bool inv = n < 0;
  for (int k = 0; k < (inv ? -n : n); ++k) r = r * u;
  return inv ? reciprocal(r) : r;
}

/// Value used for branching inside templated surface code.
inline double value_of(double x) { return x; }
template <std::size_t NV, std::size_t ORD>
double value_of(const Jet<NV, ORD>& j) {
  return j.value();
}

}  // namespace principal
