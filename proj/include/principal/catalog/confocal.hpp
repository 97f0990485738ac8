#pragma once

// Ellipsoidal (confocal) coordinates and the Dupin check for principal lines
// on a triaxial ellipsoid.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "principal/errors.hpp"
#include "principal/foliation.hpp"
#include "principal/surface.hpp"

namespace principal::catalog {

struct ConfocalCoordinates {
  std::array<double, 3> lambda{};    // lambda1 < c^2 <= lambda2 <= b^2 <= lambda3 <= a^2
  std::array<double, 3> residual{};  // backward error of the confocal equation, per root
};

namespace detail {

// The cubic is evaluated in the offset t = l - base from a pole, so that
// a root hugging that pole keeps its relative precision.
struct ConfocalCubic {
  double a2, b2, c2, x2, y2, z2;

  // x^2 (b2-l)(c2-l) + y^2 (a2-l)(c2-l) + z^2 (a2-l)(b2-l) - (a2-l)(b2-l)(c2-l)
  double eval(double base, double t) const {
    const double A = (a2 - base) - t, B = (b2 - base) - t, C = (c2 - base) - t;
    return x2 * B * C + y2 * A * C + z2 * A * B - A * B * C;
  }
  double magnitude(double base, double t) const {
    const double A = std::abs((a2 - base) - t), B = std::abs((b2 - base) - t), C = std::abs((c2 - base) - t);
    return x2 * B * C + y2 * A * C + z2 * A * B + A * B * C;
  }
  // bisection for t in [lo, hi] with a (weak) sign change
  double root(double base, double lo, double hi) const {
    double flo = eval(base, lo), fhi = eval(base, hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = eval(base, mid);
      if (fm == 0.0) return mid;
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
        fhi = fm;
      }
    }
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
  }
  // root between the poles lo_pole < hi_pole, returned as (base, offset)
  std::pair<double, double> bracket_root(double lo_pole, double hi_pole) const {
    const double t = root(lo_pole, 0.0, hi_pole - lo_pole);
    if (t <= 0.5 * (hi_pole - lo_pole)) return {lo_pole, t};
    return {hi_pole, root(hi_pole, lo_pole - hi_pole, 0.0)};
  }
};

}  // namespace detail

/// Roots of x^2/(a^2-l) + y^2/(b^2-l) + z^2/(c^2-l) = 1, one per bracket
/// (-inf, c^2], [c^2, b^2], [b^2, a^2]. Bisection on the cleared cubic,
/// which changes sign (weakly) at the poles. Residuals are backward errors
/// of the root as held, i.e. as an offset from its nearest pole.
inline ConfocalCoordinates confocal_coordinates(const Vec3& p, double a, double b, double c) {
  if (!(a > b && b > c && c > 0)) throw DegenerateRoots("confocal coordinates need a > b > c > 0");
  const detail::ConfocalCubic q{a * a, b * b, c * c, p.x() * p.x(), p.y() * p.y(), p.z() * p.z()};
  const double far = q.c2 - p.squaredNorm() - q.a2;
  ConfocalCoordinates out;
  const std::pair<double, double> roots[3] = {
      {q.c2, q.root(q.c2, far - q.c2, 0.0)}, q.bracket_root(q.c2, q.b2), q.bracket_root(q.b2, q.a2)};
  for (int i = 0; i < 3; ++i) {
    const auto [base, t] = roots[i];
    out.lambda[static_cast<std::size_t>(i)] = base + t;
    const double m = q.magnitude(base, t);
    out.residual[static_cast<std::size_t>(i)] = m > 0 ? std::abs(q.eval(base, t)) / m : 0.0;
  }
  const double tol = 1e-9 * q.a2;
  int on_poles = 0;
  for (double pole : {q.c2, q.b2})
    for (double l : out.lambda)
      if (std::abs(l - pole) <= tol) ++on_poles;
  if (out.lambda[1] - out.lambda[0] <= tol || out.lambda[2] - out.lambda[1] <= tol)
    throw DegenerateRoots("two confocal roots coincide (focal conic)");
  if (on_poles >= 2) throw DegenerateRoots("point on a coordinate axis: two confocal roots sit on poles");
  return out;
}

struct DupinDrift {
  double drift = 0.0;      // min over the two hyperboloid roots of max |l - l0| / a^2
  int family = 1;          // 1: one-sheet hyperboloid root, 2: two-sheet
  std::array<double, 2> per_family{};
};

/// Drift of the hyperboloid confocal roots along a curve on the ellipsoid.
/// A principal line keeps one of them constant.
inline DupinDrift dupin_drift(double a, double b, double c, const std::vector<Vec3>& points) {
  if (points.empty()) throw ParamError("dupin_drift needs a nonempty curve");
  const auto c0 = confocal_coordinates(points.front(), a, b, c);
  DupinDrift d;
  for (const auto& p : points) {
    const auto cc = confocal_coordinates(p, a, b, c);
    for (int k = 0; k < 2; ++k)
      d.per_family[k] = std::max(d.per_family[k], std::abs(cc.lambda[k + 1] - c0.lambda[k + 1]) / (a * a));
  }
  d.family = d.per_family[0] <= d.per_family[1] ? 1 : 2;
  d.drift = std::min(d.per_family[0], d.per_family[1]);
  return d;
}

inline DupinDrift dupin_drift(double a, double b, double c, const Trajectory& t) {
  return dupin_drift(a, b, c, t.points);
}

}  // namespace principal::catalog
