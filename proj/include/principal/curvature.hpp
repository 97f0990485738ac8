#pragma once

// Pointwise curvature: fundamental forms, shape operator, principal
// curvatures and directions, normal curvature.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "principal/surface.hpp"

namespace principal {

struct FundamentalForms {
  double E = 1.0, F = 0.0, G = 1.0;  // first form (length^2)
  double e = 0.0, f = 0.0, g = 0.0;  // second form (length)
  Vec2 at = Vec2::Zero();
  Vec3 Xu = Vec3::UnitX(), Xv = Vec3::UnitY(), normal = Vec3::UnitZ();

  double metric_det() const { return E * G - F * F; }
  double first(const Vec2& a, const Vec2& b) const {
    return E * a[0] * b[0] + F * (a[0] * b[1] + a[1] * b[0]) + G * a[1] * b[1];
  }
  double second(const Vec2& a, const Vec2& b) const {
    return e * a[0] * b[0] + f * (a[0] * b[1] + a[1] * b[0]) + g * a[1] * b[1];
  }
};

struct PrincipalData {
  double k1 = 0.0, k2 = 0.0;  // k1 <= k2
  double H = 0.0, K = 0.0;
  double umbilic_deviation = 0.0;  // k2 - k1
  bool directions_defined = false;
  Vec3 d1 = Vec3::Zero(), d2 = Vec3::Zero();  // unit world tangents, up to sign
  Vec2 c1 = Vec2::Zero(), c2 = Vec2::Zero();  // chart directions (unit in the metric); zero for level sets
  Vec3 normal = Vec3::UnitZ();

  const Vec3& direction(int foliation) const { return foliation == 0 ? d1 : d2; }
  double curvature(int foliation) const { return foliation == 0 ? k1 : k2; }
};

struct CurvatureOptions {
  /// Umbilic flag threshold relative to max(|k1|, |k2|, 1).
  double direction_tol = 1e-7;
};

/// Eigen-decomposition of a symmetric 2x2 matrix [[p,q],[q,r]] with the
/// larger-pivot branch for the eigenvector. Returns the eigenvector of the
/// larger eigenvalue; the other one is its rotation by +90 degrees. Equal
/// eigenvalues give (1, 0).
struct Sym2Eigen {
  double lo = 0.0, hi = 0.0;
  Vec2 v_hi = Vec2::UnitX();
  Vec2 v_lo = Vec2::UnitY();
};

inline Sym2Eigen sym2_eigen(double p, double q, double r) {
  const double m = 0.5 * (p + r);
  const double d = 0.5 * (p - r);
  const double rad = std::hypot(d, q);
  Sym2Eigen out;
  out.lo = m - rad;
  out.hi = m + rad;
  if (rad == 0.0) {
    // Tie: minimal direction along the first frame axis.
    out.v_lo = Vec2::UnitX();
    out.v_hi = Vec2::UnitY();
    return out;
  }
  Vec2 v = d >= 0.0 ? Vec2(d + rad, q) : Vec2(q, rad - d);
  v.normalize();
  out.v_hi = v;
  out.v_lo = Vec2(v[1], -v[0]);
  return out;
}

/// Deterministic orthonormal tangent frame (t1, t2) with t1 x t2 = n.
inline std::pair<Vec3, Vec3> tangent_frame(const Vec3& n) {
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
  Vec3 a = Vec3::Unit(axis);
  Vec3 t1 = (a - a.dot(n) * n).normalized();
  return {t1, n.cross(t1)};
}

/// Tangent frame that follows a reference direction: t1 is the projection of
/// `reference` onto the tangent plane.
inline std::pair<Vec3, Vec3> tangent_frame(const Vec3& n, const Vec3& reference) {
  Vec3 t1 = reference - reference.dot(n) * n;
  const double len = t1.norm();
  if (len < 1e-12) return tangent_frame(n);
  t1 /= len;
  return {t1, n.cross(t1)};
}

// ---------------------------------------------------------------------------
// Charts

inline FundamentalForms fundamental_forms(const SurfaceChart& chart, double u, double v) {
  const ChartPartials p = chart.partials(u, v);
  const Vec3 cr = p.Xu.cross(p.Xv);
  const double area = cr.norm();
  if (!(area > 1e-10 * chart.scale))
    throw RegularityError("chart is not regular at (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  FundamentalForms ff;
  ff.at = Vec2(u, v);
  ff.Xu = p.Xu;
  ff.Xv = p.Xv;
  ff.normal = sign_of(chart.orientation) * cr / area;
  ff.E = p.Xu.dot(p.Xu);
  ff.F = p.Xu.dot(p.Xv);
  ff.G = p.Xv.dot(p.Xv);
  ff.e = p.Xuu.dot(ff.normal);
  ff.f = p.Xuv.dot(ff.normal);
  ff.g = p.Xvv.dot(ff.normal);
  return ff;
}

inline PrincipalData principal_data(const FundamentalForms& ff, const CurvatureOptions& opts = {}) {
  // Orthonormal basis of the tangent plane in parameter coordinates.
  const double sqE = std::sqrt(ff.E);
  const double det = ff.metric_det();
  if (!(ff.E > 0.0 && ff.G > 0.0 && det > 0.0)) throw RegularityError("first fundamental form is not positive definite");
  const Vec2 b1(1.0 / sqE, 0.0);
  const Vec2 b2(-ff.F / (sqE * std::sqrt(det)), sqE / std::sqrt(det));
  const double s11 = ff.second(b1, b1), s12 = ff.second(b1, b2), s22 = ff.second(b2, b2);
  const Sym2Eigen eig = sym2_eigen(s11, s12, s22);

  PrincipalData pd;
  pd.k1 = eig.lo;
  pd.k2 = eig.hi;
  pd.H = 0.5 * (s11 + s22);
  pd.K = pd.k1 * pd.k2;
  pd.umbilic_deviation = pd.k2 - pd.k1;
  pd.normal = ff.normal;
  const double tol = opts.direction_tol * std::max({std::abs(pd.k1), std::abs(pd.k2), 1.0});
  pd.directions_defined = pd.umbilic_deviation > tol;
  pd.c1 = eig.v_lo[0] * b1 + eig.v_lo[1] * b2;
  pd.c2 = eig.v_hi[0] * b1 + eig.v_hi[1] * b2;
  pd.d1 = (pd.c1[0] * ff.Xu + pd.c1[1] * ff.Xv).normalized();
  pd.d2 = (pd.c2[0] * ff.Xu + pd.c2[1] * ff.Xv).normalized();
  return pd;
}

inline PrincipalData principal_data(const SurfaceChart& chart, double u, double v, const CurvatureOptions& opts = {}) {
  return principal_data(fundamental_forms(chart, u, v), opts);
}

/// Euler's formula: normal curvature at angle theta from the minimal direction.
inline double normal_curvature(const PrincipalData& pd, double theta) {
  if (!pd.directions_defined) throw UmbilicReferenceError("principal directions undefined at an umbilic");
  const double c = std::cos(theta), s = std::sin(theta);
  return pd.k1 * c * c + pd.k2 * s * s;
}

// ---------------------------------------------------------------------------
// Level sets

/// Shape operator restricted to the tangent plane, in an orthonormal frame.
struct TangentShape {
  Vec3 normal;
  Vec3 t1, t2;
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;
  double grad_norm = 0.0;

  /// Traceless part (s11 - s22, 2 s12): vanishes exactly at umbilics.
  Vec2 deviator() const { return Vec2(s11 - s22, 2.0 * s12); }
};

inline TangentShape tangent_shape(const Local2& l, Orientation o, const Vec3* reference = nullptr) {
  TangentShape ts;
  ts.grad_norm = l.grad.norm();
  const double s = sign_of(o);
  ts.normal = s * l.grad / ts.grad_norm;
  std::tie(ts.t1, ts.t2) = reference ? tangent_frame(ts.normal, *reference) : tangent_frame(ts.normal);
  // S = -dn = -s P Hess P / |grad f|
  const double k = -s / ts.grad_norm;
  ts.s11 = k * ts.t1.dot(l.hess * ts.t1);
  ts.s12 = k * ts.t1.dot(l.hess * ts.t2);
  ts.s22 = k * ts.t2.dot(l.hess * ts.t2);
  return ts;
}

inline PrincipalData principal_data(const TangentShape& ts, const CurvatureOptions& opts = {}) {
  const Sym2Eigen eig = sym2_eigen(ts.s11, ts.s12, ts.s22);
  PrincipalData pd;
  pd.k1 = eig.lo;
  pd.k2 = eig.hi;
  pd.H = 0.5 * (ts.s11 + ts.s22);
  pd.K = pd.k1 * pd.k2;
  pd.umbilic_deviation = pd.k2 - pd.k1;
  pd.normal = ts.normal;
  const double tol = opts.direction_tol * std::max({std::abs(pd.k1), std::abs(pd.k2), 1.0});
  pd.directions_defined = pd.umbilic_deviation > tol;
  pd.d1 = eig.v_lo[0] * ts.t1 + eig.v_lo[1] * ts.t2;
  pd.d2 = eig.v_hi[0] * ts.t1 + eig.v_hi[1] * ts.t2;
  return pd;
}

inline PrincipalData implicit_principal_data(const ImplicitSurface& s, const Vec3& p,
                                             const CurvatureOptions& opts = {}) {
  const Local2 l = s.local2(p);
  if (!(l.grad.norm() > s.regularity_floor()))
    throw CriticalPointError("gradient vanishes at a point of the level set");
  return principal_data(tangent_shape(l, s.orientation), opts);
}

/// Mean and Gauss curvature from gradient and Hessian, generic over the scalar
/// type so that jets can carry directional derivatives through it.
template <class T>
struct MeanGauss {
  T H, K;
};

template <class T>
MeanGauss<T> mean_gauss(const std::array<T, 3>& g, const std::array<std::array<T, 3>, 3>& h, double sign) {
  using std::sqrt;
  const T g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
  const T gn = sqrt(g2);
  T ghg = T(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ghg += g[i] * h[i][j] * g[j];
  const T tr = h[0][0] + h[1][1] + h[2][2];
  // H = -sign (tr - n^T h n) / (2 |g|)
  const T H = -sign * (tr - ghg / g2) / (2.0 * gn);
  // K = g^T adj(h) g / |g|^4
  std::array<std::array<T, 3>, 3> adj;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
      adj[i][j] = h[i1][j1] * h[i2][j2] - h[i1][j2] * h[i2][j1];
    }
  T gag = T(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gag += g[i] * adj[i][j] * g[j];
  return {H, gag / (g2 * g2)};
}

/// Curvature scalars and their derivatives along a unit tangent t.
struct CurvatureRates {
  double H = 0.0, K = 0.0, k1 = 0.0, k2 = 0.0;
  double dH = 0.0, dK = 0.0, dk1 = 0.0, dk2 = 0.0;
};

inline CurvatureRates curvature_rates(const Local3& l, Orientation o, const Vec3& t) {
  using D = Jet<1, 1>;
  std::array<D, 3> g;
  std::array<std::array<D, 3>, 3> h;
  const Vec3 dg = l.hess * t;
  Mat3 dh = Mat3::Zero();
  for (int i = 0; i < 3; ++i) dh += t[i] * l.third[i];
  for (int i = 0; i < 3; ++i) {
    g[i] = D(l.grad[i]);
    g[i].coeff(1) = dg[i];
    for (int j = 0; j < 3; ++j) {
      h[i][j] = D(l.hess(i, j));
      h[i][j].coeff(1) = dh(i, j);
    }
  }
  const auto mg = mean_gauss(g, h, sign_of(o));
  const D disc = mg.H * mg.H - mg.K;
  const double disc0 = std::max(disc.value(), 0.0);
  const double R = std::sqrt(disc0);
  const double dR = R > 0.0 ? disc.coeff(1) / (2.0 * R) : 0.0;
  CurvatureRates r;
  r.H = mg.H.value();
  r.K = mg.K.value();
  r.dH = mg.H.coeff(1);
  r.dK = mg.K.coeff(1);
  r.k1 = r.H - R;
  r.k2 = r.H + R;
  r.dk1 = r.dH - dR;
  r.dk2 = r.dH + dR;
  return r;
}

}  // namespace principal
