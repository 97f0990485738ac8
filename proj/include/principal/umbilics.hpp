#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "principal/curvature.hpp"
#include "principal/errors.hpp"
#include "principal/jet.hpp"
#include "principal/parallel.hpp"
#include "principal/surface.hpp"

namespace principal {

enum class UmbilicType { D1, D2, D3, NonTransversal, NearBoundary };

inline const char* to_string(UmbilicType t) {
  switch (t) {
    case UmbilicType::D1: return "D1";
    case UmbilicType::D2: return "D2";
    case UmbilicType::D3: return "D3";
    case UmbilicType::NonTransversal: return "NonTransversal";
    case UmbilicType::NearBoundary: return "NearBoundary";
  }
  return "?";
}

inline bool is_darbouxian(UmbilicType t) {
  return t == UmbilicType::D1 || t == UmbilicType::D2 || t == UmbilicType::D3;
}

/// z = (k/2)(x^2+y^2) + (a/6)x^3 + (b/2)xy^2 + (c/6)y^3 in the frame
/// (origin; e1, e2, normal).
struct MongeCoefficients {
  double k = 0.0, a = 0.0, b = 0.0, c = 0.0;
  double rotation = 0.0;
  Vec3 origin = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY(), normal = Vec3::UnitZ();
  double residual_x2y = 0.0;        // x^2y coefficient left after the rotation
  double quadratic_residual = 0.0;  // |hess - k I| of the graph, zero at an exact umbilic

  double cubic(double x, double y) const {
    return a / 6 * x * x * x + b / 2 * x * y * y + c / 6 * y * y * y;
  }
  double height(double x, double y) const { return 0.5 * k * (x * x + y * y) + cubic(x, y); }
  Vec3 point(double x, double y) const { return origin + x * e1 + y * e2 + height(x, y) * normal; }
  /// Unit tangent at angle `theta` from e1.
  Vec3 tangent(double theta) const { return std::cos(theta) * e1 + std::sin(theta) * e2; }
};

struct ClassifyOptions {
  double transversality_tol = 1e-6;
  double margin_tol = 1e-6;
};

struct Classification {
  UmbilicType type = UmbilicType::NonTransversal;
  UmbilicType nominal = UmbilicType::NonTransversal;  // type from the bare inequalities
  double margin = 0.0;
};

struct Separatrix {
  double angle = 0.0;  // from the Monge e1 axis, in the tangent plane
  double confidence = 0.0;
};

enum class SeparatrixStatus { NotSearched, Converged, LowConfidence, Failed };

inline const char* to_string(SeparatrixStatus s) {
  switch (s) {
    case SeparatrixStatus::NotSearched: return "not_searched";
    case SeparatrixStatus::Converged: return "converged";
    case SeparatrixStatus::LowConfidence: return "low_confidence";
    case SeparatrixStatus::Failed: return "failed";
  }
  return "?";
}

struct UmbilicRecord {
  Vec3 point = Vec3::Zero();
  Vec2 param = Vec2::Zero();  // sampler coordinates of the seed that found it
  MongeCoefficients monge;
  UmbilicType type = UmbilicType::NonTransversal;
  double margin = 0.0;
  double index = 0.0;
  int winding = 0;  // turns of the doubled direction angle, equals 2 * index
  std::array<std::vector<Separatrix>, 2> separatrices;  // per foliation (0 minimal, 1 maximal)
  SeparatrixStatus separatrix_status = SeparatrixStatus::NotSearched;
  std::string warning;
};

struct UmbilicSearch {
  bool all_umbilic = false;  // the AllUmbilicSurface marker
  std::vector<UmbilicRecord> umbilics;
};

struct LocateOptions {
  int grid = 48;
  int max_grid = 384;  // grid doublings stop here or once nothing new turns up
  double refine_tol = 1e-18;  // accept when H^2 - K falls below this
  double merge_radius = 1e-4;  // relative to the surface diameter
  int max_iter = 60;
};

// Classification

inline Classification classify(double a, double b, double c, const ClassifyOptions& opts = {}) {
  Classification out;
  const double scale = std::pow(std::max({std::abs(a), std::abs(b), std::abs(c), 1.0}), 2);
  if (std::abs(b * (b - a)) <= opts.transversality_tol * scale) return out;
  const double X = a / b;
  const double y = c / (2 * b);
  if (X > y * y + 2)
    out.nominal = UmbilicType::D1;
  else if (X < 1)
    out.nominal = UmbilicType::D3;
  else
    out.nominal = UmbilicType::D2;

  // Euclidean distance from (X, y) to the parabola X = t^2 + 2: the foot
  // satisfies 4t^3 + (2 - 4(X - 2)) t - 2y = 0.
  double dist_par = std::abs(X - y * y - 2);
  {
    const double p = (2 - 4 * (X - 2)) / 4, q = -2 * y / 4;  // t^3 + p t + q = 0
    std::vector<double> roots;
    const double disc = q * q / 4 + p * p * p / 27;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      roots.push_back(std::cbrt(-q / 2 + sq) + std::cbrt(-q / 2 - sq));
    } else {
      const double r = 2 * std::sqrt(-p / 3);
      const double phi = std::acos(std::clamp(3 * q / (p * r), -1.0, 1.0));
      for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos((phi - 2 * pi * k) / 3));
    }
    for (double t : roots) dist_par = std::min(dist_par, std::hypot(X - t * t - 2, y - t));
  }
  out.margin = std::min({dist_par, std::abs(X - 1), std::abs(X - 2)});
  out.type = out.margin <= opts.margin_tol ? UmbilicType::NearBoundary : out.nominal;
  return out;
}

inline Classification classify(const MongeCoefficients& m, const ClassifyOptions& opts = {}) {
  return classify(m.a, m.b, m.c, opts);
}

inline double umbilic_index(UmbilicType t) {
  switch (t) {
    case UmbilicType::D1:
    case UmbilicType::D2: return 0.5;
    case UmbilicType::D3: return -0.5;
    default: return 0.0;
  }
}

// Monge form

namespace detail {

using J2D = Jet<2, 3>;

inline J2D compose_graph(const Jet<3, 3>& G, const J2D& x, const J2D& y, const J2D& z) {
  const auto& table = monomials<3, 3>;
  std::array<J2D, 4> px{J2D(1.0)}, py{J2D(1.0)}, pz{J2D(1.0)};
  for (int i = 1; i < 4; ++i) {
    px[i] = px[i - 1] * x;
    py[i] = py[i - 1] * y;
    pz[i] = pz[i - 1] * z;
  }
  J2D out(0.0);
  for (std::size_t i = 0; i < Jet<3, 3>::kSize; ++i) {
    const double c = G.coeff(i);
    if (c == 0.0) continue;
    const auto& e = table.exps[i];
    out += c * (px[e[0]] * py[e[1]] * pz[e[2]]);
  }
  return out;
}

/// Symmetric cubic form with components (A, D, B, C) = (xxx, xxy, xyy, yyy).
struct Cubic {
  double A, D, B, C;
  double eval(const Vec2& u, const Vec2& v, const Vec2& w) const {
    const double T[2][2][2] = {{{A, D}, {D, B}}, {{D, B}, {B, C}}};
    double s = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) s += T[i][j][k] * u[i] * v[j] * w[k];
    return s;
  }
  double x2y(double phi) const {
    const Vec2 u(std::cos(phi), std::sin(phi)), v(-std::sin(phi), std::cos(phi));
    return eval(u, u, v);
  }
};

/// Smallest phi in [0, pi) with no x^2y term after rotating the frame by phi.
inline double killing_rotation(const Cubic& cub) {
  const double scale = std::max({std::abs(cub.A), std::abs(cub.D), std::abs(cub.B), std::abs(cub.C), 1e-300});
  if (std::abs(cub.D) <= 1e-15 * scale) return 0.0;
  const int n = 1440;
  double prev = cub.x2y(0.0);
  for (int i = 1; i <= n; ++i) {
    const double phi = pi * i / n;
    const double cur = cub.x2y(phi);
    if (cur == 0.0) return i == n ? 0.0 : phi;
    if ((prev < 0) != (cur < 0)) {
      double lo = pi * (i - 1) / n, hi = phi, flo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = cub.x2y(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double r = 0.5 * (lo + hi);
      return r >= pi ? 0.0 : r;
    }
    prev = cur;
  }
  return 0.0;  // q(pi) = -q(0) guarantees a sign change; unreachable
}

}  // namespace detail

inline MongeCoefficients monge_form(const ImplicitSurface& s, const Vec3& p) {
  const Local2 l = s.local2(p);
  const double gn = l.grad.norm();
  if (!(gn > s.regularity_floor())) throw FrameError("normal undefined: gradient vanishes");
  const Vec3 n = sign_of(s.orientation) * l.grad / gn;
  const auto [t1, t2] = tangent_frame(n);
  Mat3 M;
  M.col(0) = t1;
  M.col(1) = t2;
  M.col(2) = n;
  Jet<3, 3> G = s.affine_jet(p, M);
  G.coeff(0) -= s.level;
  const double Gz = G.coeff(std::array<int, 3>{0, 0, 1});
  if (!(std::abs(Gz) > s.regularity_floor())) throw FrameError("surface is not a graph over its tangent plane");

  using detail::J2D;
  const J2D x = J2D::variable(0, 0.0), y = J2D::variable(1, 0.0);
  J2D phi(0.0);
  // Each sweep fixes one more order of the implicit function.
  for (int it = 0; it < 4; ++it) phi -= detail::compose_graph(G, x, y, phi) * (1.0 / Gz);

  const double qxx = phi.derivative({2, 0}), qxy = phi.derivative({1, 1}), qyy = phi.derivative({0, 2});
  const detail::Cubic cub{phi.derivative({3, 0}), phi.derivative({2, 1}), phi.derivative({1, 2}),
                          phi.derivative({0, 3})};

  MongeCoefficients m;
  m.k = 0.5 * (qxx + qyy);
  m.quadratic_residual = std::hypot(0.5 * (qxx - qyy), qxy);
  m.rotation = detail::killing_rotation(cub);
  const double cr = std::cos(m.rotation), sr = std::sin(m.rotation);
  const Vec2 u(cr, sr), v(-sr, cr);
  m.a = cub.eval(u, u, u);
  m.b = cub.eval(u, v, v);
  m.c = cub.eval(v, v, v);
  m.residual_x2y = cub.eval(u, u, v);
  m.origin = p;
  m.e1 = cr * t1 + sr * t2;
  m.e2 = -sr * t1 + cr * t2;
  m.normal = n;
  return m;
}

// Index by angle accumulation

/// Turns of the doubled principal-direction angle along a circle of
/// `radius` around the Monge origin. Equals 2 * index at a simple umbilic.
inline int winding_number(const ImplicitSurface& s, const MongeCoefficients& m, double radius, int samples = 720) {
  double total = 0.0, prev = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double al = 2 * pi * i / samples;
    const Vec3 q = s.project(m.origin + radius * m.tangent(al));
    const TangentShape ts = tangent_shape(s.local2(q), s.orientation, &m.e1);
    const Vec2 dev = ts.deviator();
    const double ang = std::atan2(dev[1], dev[0]);
    if (i > 0) total += std::remainder(ang - prev, 2 * pi);
    prev = ang;
  }
  return static_cast<int>(std::lround(total / (2 * pi)));
}

// Location

namespace detail {

inline double deviation(const ImplicitSurface& s, const Vec3& p) {
  const TangentShape ts = tangent_shape(s.local2(p), s.orientation);
  return ts.deviator().norm();  // = k2 - k1
}

struct Refined {
  bool ok = false;
  Vec3 point = Vec3::Zero();
};

/// Damped Newton on the deviator expressed in a frame transported from e1.
inline Refined refine_umbilic(const ImplicitSurface& s, Vec3 p, const LocateOptions& opts) {
  Refined out;
  const double diam = s.diameter;
  const double h = 1e-6 * diam;
  const Vec3 ref = tangent_frame(tangent_shape(s.local2(p), s.orientation).normal).first;
  auto residual = [&](const Vec3& q, Vec3* t1, Vec3* t2) {
    const TangentShape ts = tangent_shape(s.local2(q), s.orientation, &ref);
    if (t1) *t1 = ts.t1;
    if (t2) *t2 = ts.t2;
    return ts.deviator();
  };
  try {
    Vec3 t1, t2;
    Vec2 r = residual(p, &t1, &t2);
    for (int it = 0; it < opts.max_iter; ++it) {
      if (0.25 * r.squaredNorm() < opts.refine_tol) {
        out.ok = true;
        out.point = p;
        return out;
      }
      Mat2 J;
      for (int k = 0; k < 2; ++k) {
        const Vec3 dir = k == 0 ? t1 : t2;
        const Vec2 rp = residual(s.project(p + h * dir), nullptr, nullptr);
        const Vec2 rm = residual(s.project(p - h * dir), nullptr, nullptr);
        J.col(k) = (rp - rm) / (2 * h);
      }
      if (std::abs(J.determinant()) < 1e-300) return out;
      Vec2 step = -J.fullPivLu().solve(r);
      const double cap = 0.05 * diam;
      if (step.norm() > cap) step *= cap / step.norm();
      double lam = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls) {
        const Vec3 q = s.project(p + lam * (step[0] * t1 + step[1] * t2));
        Vec3 q1, q2;
        const Vec2 rq = residual(q, &q1, &q2);
        if (rq.norm() < r.norm() || lam * step.norm() < 1e-15 * diam) {
          p = q;
          r = rq;
          t1 = q1;
          t2 = q2;
          accepted = true;
          break;
        }
        lam *= 0.5;
      }
      if (!accepted || !s.bounding_box.contains(p)) return out;
    }
    if (0.25 * r.squaredNorm() < opts.refine_tol) {
      out.ok = true;
      out.point = p;
    }
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace detail

namespace detail {

inline UmbilicSearch locate_on_grid(const ImplicitSurface& s, const LocateOptions& opts, int N) {
  struct Node {
    Vec3 p;
    double dev;
    double kmax;
  };
  std::vector<Node> nodes = parallel_map(static_cast<std::size_t>(N * N), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / N, j = static_cast<int>(idx) % N;
    const Vec3 p = s.project(s.sampler.point((i + 0.5) / N, (j + 0.5) / N));
    const PrincipalData pd = principal_data(tangent_shape(s.local2(p), s.orientation));
    return Node{p, pd.umbilic_deviation, std::max(std::abs(pd.k1), std::abs(pd.k2))};
  });

  UmbilicSearch out;
  double max_dev = 0.0, max_k = 0.0;
  for (const auto& n : nodes) {
    max_dev = std::max(max_dev, n.dev);
    max_k = std::max(max_k, n.kmax);
  }
  if (max_dev <= 1e-9 * std::max(max_k, 1e-300)) {
    out.all_umbilic = true;
    return out;
  }

  auto at = [&](int i, int j) -> const Node* {
    if (s.sampler.periodic_s)
      i = (i % N + N) % N;
    else if (i < 0 || i >= N)
      return nullptr;
    if (s.sampler.periodic_t)
      j = (j % N + N) % N;
    else if (j < 0 || j >= N)
      return nullptr;
    return &nodes[static_cast<std::size_t>(i * N + j)];
  };
  std::vector<std::pair<Vec3, Vec2>> seeds;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const Node& c = *at(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (!di && !dj) continue;
          const Node* o = at(i + di, j + dj);
          if (o && o->dev < c.dev) {
            is_min = false;
            break;
          }
        }
      if (is_min) seeds.emplace_back(c.p, Vec2((i + 0.5) / N, (j + 0.5) / N));
    }

  const auto refined = parallel_map(seeds.size(), [&](std::size_t i) {
    return detail::refine_umbilic(s, seeds[i].first, opts);
  });

  const double merge = opts.merge_radius * s.diameter;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!refined[i].ok) continue;
    const Vec3& p = refined[i].point;
    const bool dup = std::any_of(out.umbilics.begin(), out.umbilics.end(),
                                 [&](const UmbilicRecord& r) { return (r.point - p).norm() <= merge; });
    if (dup) continue;
    UmbilicRecord rec;
    rec.point = p;
    rec.param = seeds[i].second;
    out.umbilics.push_back(rec);
  }
  return out;
}

}  // namespace detail

/// Grid scan of k2 - k1 over the surface sampler, local minima refined by
/// damped Newton, duplicates merged. The grid is doubled (up to max_grid)
/// until a doubling finds nothing new. Returns the AllUmbilicSurface marker
/// when k2 - k1 vanishes at every grid node.
inline UmbilicSearch locate_umbilics(const ImplicitSurface& s, const LocateOptions& opts = {}) {
  if (!s.sampler.point) throw Error("surface has no sampler for the umbilic grid scan");
  if (opts.grid < 16) throw Error("umbilic grid resolution must be at least 16 per axis");
  UmbilicSearch out = detail::locate_on_grid(s, opts, opts.grid);
  const double merge = opts.merge_radius * s.diameter;
  for (int N = 2 * opts.grid; !out.all_umbilic && N <= opts.max_grid; N *= 2) {
    const UmbilicSearch finer = detail::locate_on_grid(s, opts, N);
    bool added = false;
    for (const auto& r : finer.umbilics) {
      const bool dup = std::any_of(out.umbilics.begin(), out.umbilics.end(),
                                   [&](const UmbilicRecord& q) { return (q.point - r.point).norm() <= merge; });
      if (dup) continue;
      out.umbilics.push_back(r);
      added = true;
    }
    if (!added) break;
  }
  std::sort(out.umbilics.begin(), out.umbilics.end(), [](const UmbilicRecord& l, const UmbilicRecord& r) {
    return std::lexicographical_compare(l.point.data(), l.point.data() + 3, r.point.data(), r.point.data() + 3);
  });
  return out;
}

struct UmbilicOptions {
  LocateOptions locate;
  ClassifyOptions classify;
  double winding_radius = 1e-3;  // relative to the diameter
};

/// Fills Monge form, type, margin, index and winding for a located umbilic.
inline void characterize(const ImplicitSurface& s, UmbilicRecord& rec, const UmbilicOptions& opts = {}) {
  rec.monge = monge_form(s, rec.point);
  const Classification cl = classify(rec.monge, opts.classify);
  rec.type = cl.type;
  rec.margin = cl.margin;
  rec.winding = winding_number(s, rec.monge, opts.winding_radius * s.diameter);
  rec.index = is_darbouxian(rec.type) ? umbilic_index(rec.type) : 0.5 * rec.winding;
}

inline UmbilicSearch find_umbilics(const ImplicitSurface& s, const UmbilicOptions& opts = {}) {
  UmbilicSearch out = locate_umbilics(s, opts.locate);
  auto done = parallel_map(out.umbilics.size(), [&](std::size_t i) {
    UmbilicRecord r = out.umbilics[i];
    characterize(s, r, opts);
    return r;
  });
  out.umbilics = std::move(done);
  return out;
}

struct IndexSum {
  double sum = 0.0;
  std::optional<int> chi;
  bool consistent = false;
  bool inconclusive = false;
};

inline IndexSum index_sum_check(const ImplicitSurface& s, const std::vector<UmbilicRecord>& umbilics) {
  IndexSum out;
  out.chi = s.euler_characteristic;
  for (const auto& u : umbilics) {
    if (!is_darbouxian(u.type)) out.inconclusive = true;
    out.sum += u.index;
  }
  out.consistent = !out.inconclusive && out.chi && std::abs(out.sum - *out.chi) < 1e-12;
  return out;
}

}  // namespace principal
