#pragma once

// Built-in surfaces: quadrics, tori, synthetic Monge graphs, the rotated-cap
// ellipsoid family E_theta and the cubic deformation S_rho.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "principal/surface.hpp"

namespace principal::catalog {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// Charts

inline SurfaceChart sphere_chart(double r) {
  auto f = [r](const auto& u, const auto& v) {
    using std::cos, std::sin;
    using T = std::decay_t<decltype(u)>;
    return std::array<T, 3>{r * cos(v) * cos(u), r * cos(v) * sin(u), r * sin(v)};
  };
  auto c = SurfaceChart::analytic(f, {0.0, 2 * pi, -pi / 2, pi / 2}, true, false);
  c.scale = 2 * r;
  return c;
}

inline SurfaceChart plane_chart() {
  auto f = [](const auto& u, const auto& v) {
    using T = std::decay_t<decltype(u)>;
    return std::array<T, 3>{u, v, T(0.0)};
  };
  return SurfaceChart::analytic(f, {-1, 1, -1, 1});
}

inline SurfaceChart cylinder_chart(double r) {
  // u: angle around the axis, v: height along z.
  auto f = [r](const auto& u, const auto& v) {
    using std::cos, std::sin;
    using T = std::decay_t<decltype(u)>;
    return std::array<T, 3>{r * cos(u), r * sin(u), v};
  };
  auto c = SurfaceChart::analytic(f, {0.0, 2 * pi, -1.0, 1.0}, true, false);
  c.scale = 2 * r;
  return c;
}

/// Graph z = (k/2)(x^2+y^2) + (a/6)x^3 + (d/2)x^2 y + (b/2)x y^2 + (c/6)y^3.
inline SurfaceChart monge_graph_chart(double k, double a, double b, double c, double d = 0.0) {
  auto f = [=](const auto& x, const auto& y) {
    using T = std::decay_t<decltype(x)>;
    T z = 0.5 * k * (x * x + y * y) + (a / 6.0) * x * x * x + (d / 2.0) * x * x * y +
          (b / 2.0) * x * y * y + (c / 6.0) * y * y * y;
    return std::array<T, 3>{x, y, z};
  };
  return SurfaceChart::analytic(f, {-1, 1, -1, 1});
}

/// Ellipsoid chart: (a cos v cos u, b cos v sin u, c sin v).
inline SurfaceChart ellipsoid_chart(double a, double b, double c) {
  auto f = [=](const auto& u, const auto& v) {
    using std::cos, std::sin;
    using T = std::decay_t<decltype(u)>;
    return std::array<T, 3>{a * cos(v) * cos(u), b * cos(v) * sin(u), c * sin(v)};
  };
  auto ch = SurfaceChart::analytic(f, {0.0, 2 * pi, -pi / 2, pi / 2}, true, false);
  ch.scale = 2 * std::max({a, b, c});
  return ch;
}

/// Torus chart: u longitude around z, v angle around the tube.
inline SurfaceChart torus_chart(double R, double r) {
  auto f = [=](const auto& u, const auto& v) {
    using std::cos, std::sin;
    using T = std::decay_t<decltype(u)>;
    const T rho = R + r * cos(v);
    return std::array<T, 3>{rho * cos(u), rho * sin(u), r * sin(v)};
  };
  auto ch = SurfaceChart::analytic(f, {0.0, 2 * pi, 0.0, 2 * pi}, true, true);
  ch.scale = 2 * (R + r);
  return ch;
}

// ---------------------------------------------------------------------------
// Level sets

namespace detail {

/// Point of a star-shaped level set along the ray through `dir`.
inline Vec3 radial_point(const ImplicitSurface& s, const Vec3& dir, double r_max) {
  const Vec3 w = dir.normalized();
  auto g = [&](double t) { return s.value(t * w) - s.level; };
  double lo = 0.0, hi = r_max;
  if (g(lo) * g(hi) > 0.0) return r_max * w;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * r_max; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi) * w;
}

inline void star_sampler(ImplicitSurface& s, double r_max) {
  s.sampler.periodic_s = true;
  s.sampler.periodic_t = false;
  ImplicitSurface copy = s;
  s.sampler.point = [copy, r_max](double u, double v) {
    const double lon = 2 * pi * u;
    const double lat = pi * (v - 0.5);
    const Vec3 dir(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
    return radial_point(copy, dir, r_max);
  };
}

inline double smoothstep5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }

template <class T>
T smoothstep5(const T& t) {
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace detail

inline ImplicitSurface sphere(double r) {
  if (!(r > 0)) throw ParamError("sphere radius must be positive");
  auto f = [r](const auto& x, const auto& y, const auto& z) { return (x * x + y * y + z * z) / (r * r) - 1.0; };
  auto s = ImplicitSurface::analytic(f, {Vec3::Constant(-1.2 * r), Vec3::Constant(1.2 * r)});
  s.name = "sphere";
  s.diameter = 2 * r;
  s.euler_characteristic = 2;
  detail::star_sampler(s, 1.5 * r);
  return s;
}

inline ImplicitSurface ellipsoid(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0)) throw ParamError("ellipsoid axes must be positive");
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    return x * x / (a * a) + y * y / (b * b) + z * z / (c * c) - 1.0;
  };
  const Vec3 ext(a, b, c);
  auto s = ImplicitSurface::analytic(f, {-1.2 * ext, 1.2 * ext});
  s.name = "ellipsoid";
  s.diameter = 2 * std::max({a, b, c});
  s.euler_characteristic = 2;
  detail::star_sampler(s, 1.5 * ext.maxCoeff());
  return s;
}

inline ImplicitSurface torus(double R, double r) {
  if (!(R > r && r > 0)) throw ParamError("torus needs R > r > 0");
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    using std::sqrt;
    const auto rho = sqrt(x * x + y * y);
    return ((rho - R) * (rho - R) + z * z) / (r * r) - 1.0;
  };
  const Vec3 ext(R + r, R + r, r);
  auto s = ImplicitSurface::analytic(f, {-1.2 * ext, 1.2 * ext});
  s.name = "torus";
  s.diameter = 2 * (R + r);
  s.euler_characteristic = 0;
  s.sampler = {[=](double u, double v) {
                 const double lon = 2 * pi * u, a = 2 * pi * v;
                 const double rho = R + r * std::cos(a);
                 return Vec3(rho * std::cos(lon), rho * std::sin(lon), r * std::sin(a));
               },
               true, true};
  return s;
}

/// Tube radius of the perturbed torus in the half-plane at longitude psi,
/// tube angle a: r = r0 (1 + amp m(psi, a)).
/// A profile depending on psi alone (or on a product of a psi factor with a
/// fixed function of a) keeps every parallel closed; the coupling term below
/// twists the cross-section and leaves finitely many hyperbolic cycles.
inline double perturbed_torus_profile(double psi, double a) {
  return std::cos(2 * psi) + std::sin(3 * psi) + (std::cos(psi) + std::sin(2 * psi)) * (std::sin(2 * a) + std::cos(a));
}

inline ImplicitSurface perturbed_torus(double R, double r0, double amp) {
  if (!(R > 2 * r0 && r0 > 0 && std::abs(amp) <= 0.1)) throw ParamError("perturbed torus needs R > 2 r0 > 0 and |amp| <= 0.1");
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    using std::sqrt, std::sin, std::cos, std::atan2;
    const auto rho = sqrt(x * x + y * y);
    const auto psi = atan2(y, x);
    const auto a = atan2(z, rho - R);
    const auto m = cos(2.0 * psi) + sin(3.0 * psi) + (cos(psi) + sin(2.0 * psi)) * (sin(2.0 * a) + cos(a));
    const auto rt = r0 * (1.0 + amp * m);
    return ((rho - R) * (rho - R) + z * z) / (r0 * r0) - rt * rt / (r0 * r0);
  };
  const double rm = r0 * (1 + 6 * std::abs(amp));
  const Vec3 ext(R + rm, R + rm, rm);
  auto s = ImplicitSurface::analytic(f, {-1.2 * ext, 1.2 * ext});
  s.name = "perturbed_torus";
  s.diameter = 2 * (R + r0);
  s.euler_characteristic = 0;
  s.sampler = {[=](double u, double v) {
                 const double lon = 2 * pi * u, a = 2 * pi * v;
                 const double rt = r0 * (1 + amp * perturbed_torus_profile(lon, a));
                 const double rho = R + rt * std::cos(a);
                 return Vec3(rho * std::cos(lon), rho * std::sin(lon), rt * std::sin(a));
               },
               true, true};
  return s;
}

/// Synthetic Monge graph z = h(x', y') with (x', y') the (x, y) plane rotated
/// by -rotation, h(x,y) = (k/2)(x^2+y^2) + (a/6)x^3 + (d/2)x^2y + (b/2)xy^2 + (c/6)y^3.
inline ImplicitSurface monge_graph(double k, double a, double b, double c, double rotation = 0.0, double d = 0.0) {
  const double cr = std::cos(rotation), sr = std::sin(rotation);
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    const auto xr = cr * x + sr * y;
    const auto yr = -sr * x + cr * y;
    return z - (0.5 * k * (xr * xr + yr * yr) + (a / 6.0) * xr * xr * xr + (d / 2.0) * xr * xr * yr +
                (b / 2.0) * xr * yr * yr + (c / 6.0) * yr * yr * yr);
  };
  auto s = ImplicitSurface::analytic(f, {Vec3(-1, -1, -4), Vec3(1, 1, 4)});
  s.orientation = Orientation::Positive;
  s.name = "monge_graph";
  s.diameter = 2.0;
  ImplicitSurface copy = s;
  s.sampler = {[copy](double u, double v) {
                 const Vec3 p(-1 + 2 * u, -1 + 2 * v, 0.0);
                 return Vec3(p.x(), p.y(), p.z() - copy.value(p));
               },
               false, false};
  return s;
}

/// Parameters of the rotated-cap ellipsoid family.
struct EThetaParams {
  double theta = 0.0;
  double equatorial_radius = 1.0;  // A: band is (x^2+y^2)/A^2 + z^2/C^2 = 1
  double polar_radius = 2.0;       // C > A: polar axis is the major axis
  double cap_deformation = 0.1;    // caps use axes A(1+d), A(1-d), C
  double blend_start = 0.35;       // latitude (rad) where the blend begins
  double blend_end = 0.75;         // latitude (rad) where the caps are pure
};

/// Ellipsoid of revolution around the equator, triaxial caps, the upper half
/// rotated by theta about the polar axis. The blend weight is a quintic
/// smoothstep in sin(latitude).
inline ImplicitSurface e_theta(const EThetaParams& p) {
  const double A = p.equatorial_radius, C = p.polar_radius;
  if (!(C > A * (1 + p.cap_deformation) && p.cap_deformation > 0 && p.cap_deformation < 0.5 &&
        p.blend_start > 0 && p.blend_end > p.blend_start && p.blend_end < pi / 2))
    throw ParamError("E_theta needs C > A(1+d), 0 < d < 0.5 and 0 < blend_start < blend_end < pi/2");
  const double A1 = A * (1 + p.cap_deformation), B1 = A * (1 - p.cap_deformation);
  const double s0 = std::sin(p.blend_start), s1 = std::sin(p.blend_end);
  const double ct = std::cos(p.theta), st = std::sin(p.theta);
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    using std::sqrt;
    using T = std::decay_t<decltype(x)>;
    const double zv = value_of(z);
    const double rv = std::sqrt(value_of(x) * value_of(x) + value_of(y) * value_of(y) + zv * zv);
    const double asv = std::abs(zv) / rv;
    const T q0 = (x * x + y * y) / (A * A) + z * z / (C * C);
    if (asv <= s0) return q0 - 1.0;
    T xc = x, yc = y;
    if (zv > 0) {
      xc = ct * x + st * y;
      yc = -st * x + ct * y;
    }
    const T q1 = xc * xc / (A1 * A1) + yc * yc / (B1 * B1) + z * z / (C * C);
    if (asv >= s1) return q1 - 1.0;
    T s = z / sqrt(x * x + y * y + z * z);
    if (zv < 0) s = -s;
    const T w = detail::smoothstep5((s - s0) / (s1 - s0));
    return (1.0 - w) * q0 + w * q1 - 1.0;
  };
  const Vec3 ext(A1, A1, C);
  auto s = ImplicitSurface::analytic(f, {-1.2 * ext, 1.2 * ext});
  s.name = "E_theta";
  s.diameter = 2 * C;
  s.euler_characteristic = 2;
  detail::star_sampler(s, 1.5 * C);
  return s;
}

/// Cubic deformation f_rho = x^2/a^2 + y^2/b^2 + z^2 + rho xyz - 1.
inline ImplicitSurface s_rho(double rho, double a, double b) {
  if (!(a > 0 && b > 0)) throw ParamError("S_rho needs a > 0, b > 0");
  if (std::abs((a - 1) * (b - 1) * (a - b)) < 1e-12) throw ParamError("S_rho needs (a-1)(b-1)(a-b) != 0");
  if (std::abs(rho) * std::max({a, b, 1.0}) > 0.5) throw ParamError("S_rho is only star-shaped for small rho");
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    return x * x / (a * a) + y * y / (b * b) + z * z + rho * x * y * z - 1.0;
  };
  const Vec3 ext(a, b, 1.0);
  auto s = ImplicitSurface::analytic(f, {-1.3 * ext, 1.3 * ext});
  s.name = "S_rho";
  s.diameter = 2 * std::max({a, b, 1.0});
  s.euler_characteristic = 2;
  detail::star_sampler(s, 2.0 * ext.maxCoeff());
  return s;
}

/// Coefficients of a random cubic polynomial in normalized coordinates,
/// drawn reproducibly from `seed` (uniform in [-1, 1]).
inline std::array<double, 20> random_cubic(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::array<double, 20> c{};
  for (auto& v : c) v = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
  return c;
}

/// Ellipsoid perturbed by amp * P(x/a, y/b, z/c), P a random cubic polynomial.
inline ImplicitSurface perturbed_ellipsoid(double a, double b, double c, double amp, std::uint64_t seed) {
  if (!(a > 0 && b > 0 && c > 0)) throw ParamError("ellipsoid axes must be positive");
  if (std::abs(amp) > 0.1) throw ParamError("perturbation amplitude must be small (|amp| <= 0.1)");
  const auto coef = random_cubic(seed);
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    using T = std::decay_t<decltype(x)>;
    const T X = x / a, Y = y / b, Z = z / c;
    const std::array<T, 20> mono{T(1.0), X, Y, Z, X * X, Y * Y, Z * Z, X * Y, Y * Z, Z * X,
                                 X * X * X, Y * Y * Y, Z * Z * Z, X * X * Y, X * X * Z,
                                 Y * Y * X, Y * Y * Z, Z * Z * X, Z * Z * Y, X * Y * Z};
    T p(0.0);
    for (std::size_t i = 0; i < 20; ++i) p += coef[i] * mono[i];
    return X * X + Y * Y + Z * Z - 1.0 + amp * p;
  };
  const Vec3 ext(a, b, c);
  auto s = ImplicitSurface::analytic(f, {-1.3 * ext, 1.3 * ext});
  s.name = "perturbed_ellipsoid";
  s.diameter = 2 * std::max({a, b, c});
  s.euler_characteristic = 2;
  detail::star_sampler(s, 2.0 * ext.maxCoeff());
  return s;
}

}  // namespace principal::catalog
