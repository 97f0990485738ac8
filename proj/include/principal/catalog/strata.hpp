#pragma once

// Stratification of the space of quadrics by the eigenvalue pattern of the
// quadratic part: triaxial ellipsoids, ellipsoids of revolution, spheres.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "principal/errors.hpp"
#include "principal/surface.hpp"

namespace principal::catalog {

/// x^T A x + b^T x + c = 0.
struct QuadricSpec {
  Mat3 A = Mat3::Identity();
  Vec3 b = Vec3::Zero();
  double c = -1.0;
  bool normalized = false;  // true once scaled so that the centered constant is -1

  static QuadricSpec diagonal(double l1, double l2, double l3, double level = 1.0) {
    QuadricSpec q;
    q.A = Vec3(l1, l2, l3).asDiagonal();
    q.c = -level;
    return q;
  }

  /// The same quadric seen after x -> R x + t.
  QuadricSpec moved(const Mat3& R, const Vec3& t) const {
    // in new coordinates y = R x + t, x = R^T (y - t)
    QuadricSpec q;
    q.A = R * A * R.transpose();
    q.A = 0.5 * (q.A + q.A.transpose());
    q.b = R * b - 2.0 * q.A * t;
    q.c = c + t.dot(q.A * t) - (R * b).dot(t);
    q.normalized = false;
    return q;
  }
};

enum class StratumTag { E3_triaxial, E2_revolution, Sphere, NonCompact, Degenerate };

inline const char* to_string(StratumTag t) {
  switch (t) {
    case StratumTag::E3_triaxial: return "E3_triaxial";
    case StratumTag::E2_revolution: return "E2_revolution";
    case StratumTag::Sphere: return "Sphere";
    case StratumTag::NonCompact: return "NonCompact";
    case StratumTag::Degenerate: return "Degenerate";
  }
  return "?";
}

struct Stratum {
  StratumTag tag = StratumTag::Degenerate;
  std::array<double, 3> eigenvalues{};  // of the normalized quadratic part, ascending
  std::array<int, 3> multiplicity{};    // multiplicity of each eigenvalue's cluster
  Vec3 center = Vec3::Zero();
  double margin = 0.0;  // relative distance to the nearest other stratum
  std::string note;
};

/// Principal-axis reduction with tol-banded eigenvalue equality (relative
/// gap). Compact iff the centered form is definite with the constant of the
/// opposite sign.
inline Stratum quadric_stratum(const QuadricSpec& q, double tol = 1e-8) {
  Stratum s;
  const Mat3 A = 0.5 * (q.A + q.A.transpose());
  const double scale = A.cwiseAbs().maxCoeff();
  if (!(scale > 0)) {
    s.note = "quadratic part vanishes";
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(A);
  Vec3 ev = es.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  if (ev.cwiseAbs().minCoeff() <= tol * emax) {
    s.note = "quadratic part is rank deficient";
    for (int i = 0; i < 3; ++i) s.eigenvalues[i] = ev[i] / emax;
    return s;
  }
  s.center = -0.5 * A.ldlt().solve(q.b);
  const double k = q.c + 0.5 * q.b.dot(s.center);  // value of the form at the center
  const bool pos = ev.minCoeff() > 0, neg = ev.maxCoeff() < 0;
  if (!pos && !neg) {
    s.tag = StratumTag::NonCompact;
    s.note = "indefinite quadratic part";
  } else if (std::abs(k) <= tol * emax * std::max(1.0, s.center.squaredNorm()) || (pos && k > 0) || (neg && k < 0)) {
    s.note = std::abs(k) <= tol * emax ? "quadric collapses to its center" : "empty real locus";
    for (int i = 0; i < 3; ++i) s.eigenvalues[i] = ev[i] / emax;
    return s;
  }
  // normalize to x^T (A / -k) x = 1 around the center
  Vec3 lam = s.tag == StratumTag::NonCompact ? Vec3(ev / emax) : Vec3(ev / (-k));
  std::sort(lam.data(), lam.data() + 3);
  for (int i = 0; i < 3; ++i) s.eigenvalues[i] = lam[i];
  if (s.tag == StratumTag::NonCompact) {
    s.margin = lam.cwiseAbs().minCoeff() / lam.cwiseAbs().maxCoeff();
    s.multiplicity = {1, 1, 1};
    return s;
  }
  const double top = lam[2];
  auto same = [&](double x, double y) { return std::abs(x - y) <= tol * top; };
  const bool e01 = same(lam[0], lam[1]), e12 = same(lam[1], lam[2]);
  const double g01 = (lam[1] - lam[0]) / top, g12 = (lam[2] - lam[1]) / top;
  const double definite = lam[0] / top;  // distance to the non-compact boundary
  if (e01 && e12) {
    s.tag = StratumTag::Sphere;
    s.multiplicity = {3, 3, 3};
    s.margin = definite;
  } else if (e01 || e12) {
    s.tag = StratumTag::E2_revolution;
    s.multiplicity = e01 ? std::array<int, 3>{2, 2, 1} : std::array<int, 3>{1, 2, 2};
    s.margin = std::min(e01 ? g12 : g01, definite);
  } else {
    s.tag = StratumTag::E3_triaxial;
    s.multiplicity = {1, 1, 1};
    s.margin = std::min({g01, g12, definite});
  }
  return s;
}

}  // namespace principal::catalog
