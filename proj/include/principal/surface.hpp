#pragma once

// Surface representations: parametrized charts and implicit level sets, both
// carrying derivatives through order 3.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "principal/errors.hpp"
#include "principal/jet.hpp"

namespace principal {

using std::numbers::pi;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Sign convention for the unit normal. For charts, Positive means
/// n = X_u x X_v / |X_u x X_v|; for level sets, n = grad f / |grad f|.
enum class Orientation { Positive, Negative };

inline double sign_of(Orientation o) { return o == Orientation::Positive ? 1.0 : -1.0; }
inline Orientation flipped(Orientation o) {
  return o == Orientation::Positive ? Orientation::Negative : Orientation::Positive;
}

struct Rect {
  double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
  bool contains(double u, double v) const { return u >= u0 && u <= u1 && v >= v0 && v <= v1; }
};

struct Box {
  Vec3 lo = Vec3::Constant(-1.0);
  Vec3 hi = Vec3::Constant(1.0);
  double scale() const { return (hi - lo).norm(); }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
};

// ---------------------------------------------------------------------------
// Charts

/// All partials of an immersion through order 3 at one parameter point.
struct ChartPartials {
  Vec3 X, Xu, Xv, Xuu, Xuv, Xvv, Xuuu, Xuuv, Xuvv, Xvvv;
};

class SurfaceChart {
 public:
  using J = Jet<2, 3>;
  using JetMap = std::function<std::array<J, 3>(const J&, const J&)>;
  using ValueMap = std::function<Vec3(double, double)>;

  /// Chart from a functor templated over the scalar type; derivatives are exact.
  template <class F>
  static SurfaceChart analytic(F f, Rect domain, bool periodic_u = false, bool periodic_v = false) {
    SurfaceChart c;
    c.jet_ = [f](const J& u, const J& v) { return f(u, v); };
    c.value_ = [f](double u, double v) {
      const auto p = f(u, v);
      return Vec3(p[0], p[1], p[2]);
    };
    c.domain = domain;
    c.periodic_u = periodic_u;
    c.periodic_v = periodic_v;
    return c;
  }

  /// Chart from point evaluations only; partials come from 4th-order central
  /// differences.
  static SurfaceChart sampled(ValueMap f, Rect domain, bool periodic_u = false,
                              bool periodic_v = false) {
    SurfaceChart c;
    c.value_ = std::move(f);
    c.domain = domain;
    c.periodic_u = periodic_u;
    c.periodic_v = periodic_v;
    return c;
  }

  Vec3 eval(double u, double v) const { return value_(u, v); }

  ChartPartials partials(double u, double v) const {
    return jet_ ? exact_partials(u, v) : finite_difference_partials(u, v);
  }

  bool has_analytic_derivatives() const { return static_cast<bool>(jet_); }

  /// Characteristic length of the domain in parameter units.
  double domain_scale() const { return std::hypot(domain.u1 - domain.u0, domain.v1 - domain.v0); }

  Rect domain;
  bool periodic_u = false;
  bool periodic_v = false;
  Orientation orientation = Orientation::Positive;
  /// Length scale of the image, used for the regularity floor.
  double scale = 1.0;

 private:
  ChartPartials exact_partials(double u, double v) const {
    const auto m = jet_(J::variable(0, u), J::variable(1, v));
    auto pick = [&](int a, int b) {
      return Vec3(m[0].derivative({a, b}), m[1].derivative({a, b}), m[2].derivative({a, b}));
    };
    return {pick(0, 0), pick(1, 0), pick(0, 1), pick(2, 0), pick(1, 1),
            pick(0, 2), pick(3, 0), pick(2, 1), pick(1, 2), pick(0, 3)};
  }

  ChartPartials finite_difference_partials(double u, double v) const {
    const double s = domain_scale();
    const double h1 = 1e-3 * s, h2 = 2e-3 * s, h3 = 4e-3 * s;
    auto f = [&](double du, double dv) { return value_(u + du, v + dv); };
    auto d1 = [](auto g, double h) {
      return Vec3((-g(2 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2 * h)) / (12.0 * h));
    };
    auto d2 = [](auto g, double h) {
      return Vec3((-g(2 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2 * h)) / (12.0 * h * h));
    };
    auto d3 = [](auto g, double h) {
      return Vec3((-g(3 * h) + 8.0 * g(2 * h) - 13.0 * g(h) + 13.0 * g(-h) - 8.0 * g(-2 * h) + g(-3 * h)) /
                  (8.0 * h * h * h));
    };
    ChartPartials p;
    p.X = f(0, 0);
    p.Xu = d1([&](double t) { return f(t, 0); }, h1);
    p.Xv = d1([&](double t) { return f(0, t); }, h1);
    p.Xuu = d2([&](double t) { return f(t, 0); }, h2);
    p.Xvv = d2([&](double t) { return f(0, t); }, h2);
    p.Xuv = d1([&](double t) { return d1([&](double w) { return f(t, w); }, h2); }, h2);
    p.Xuuu = d3([&](double t) { return f(t, 0); }, h3);
    p.Xvvv = d3([&](double t) { return f(0, t); }, h3);
    p.Xuuv = d1([&](double t) { return d2([&](double w) { return f(w, t); }, h3); }, h3);
    p.Xuvv = d1([&](double t) { return d2([&](double w) { return f(t, w); }, h3); }, h3);
    return p;
  }

  JetMap jet_;
  ValueMap value_;
};

// ---------------------------------------------------------------------------
// Level sets

/// Value, gradient and Hessian of the defining function at a point.
struct Local2 {
  double value = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

/// Local2 plus the symmetric third-derivative tensor.
struct Local3 : Local2 {
  std::array<Mat3, 3> third{};  // third[i](j,k) = d^3 f / dx_i dx_j dx_k
};

/// Covering map of the surface used for grid scans: (s,t) in [0,1]^2 to an
/// approximate surface point (projected afterwards).
struct SampleMap {
  std::function<Vec3(double, double)> point;
  bool periodic_s = false;
  bool periodic_t = false;
};

class ImplicitSurface {
 public:
  using J2 = Jet<3, 2>;
  using J3 = Jet<3, 3>;

  template <class F>
  static ImplicitSurface analytic(F f, Box box) {
    ImplicitSurface s;
    s.value_ = [f](const Vec3& p) { return f(p.x(), p.y(), p.z()); };
    s.jet2_ = [f](const J2& x, const J2& y, const J2& z) { return f(x, y, z); };
    s.jet3_ = [f](const J3& x, const J3& y, const J3& z) { return f(x, y, z); };
    s.bounding_box = box;
    return s;
  }

  /// Level set of a black-box function; derivatives by central differences.
  static ImplicitSurface sampled(std::function<double(const Vec3&)> f, Box box) {
    ImplicitSurface s;
    s.value_ = std::move(f);
    s.bounding_box = box;
    return s;
  }

  double value(const Vec3& p) const { return value_(p); }
  bool has_analytic_derivatives() const { return static_cast<bool>(jet2_); }

  Local2 local2(const Vec3& p) const {
    if (!jet2_) return fd_local3(p);
    const auto j = jet2_(J2::variable(0, p.x()), J2::variable(1, p.y()), J2::variable(2, p.z()));
    Local2 r;
    r.value = j.value();
    for (int i = 0; i < 3; ++i) {
      std::array<int, 3> e{};
      e[i] = 1;
      r.grad[i] = j.derivative(e);
      for (int k = 0; k < 3; ++k) {
        std::array<int, 3> e2{};
        e2[i] += 1;
        e2[k] += 1;
        r.hess(i, k) = j.derivative(e2);
      }
    }
    return r;
  }

  Local3 local3(const Vec3& p) const {
    if (!jet3_) return fd_local3(p);
    const auto j = jet3_(J3::variable(0, p.x()), J3::variable(1, p.y()), J3::variable(2, p.z()));
    Local3 r;
    r.value = j.value();
    for (int i = 0; i < 3; ++i) {
      std::array<int, 3> e{};
      e[i] = 1;
      r.grad[i] = j.derivative(e);
      for (int k = 0; k < 3; ++k) {
        std::array<int, 3> e2{};
        e2[i] += 1;
        e2[k] += 1;
        r.hess(i, k) = j.derivative(e2);
        for (int l = 0; l < 3; ++l) {
          auto e3 = e2;
          e3[l] += 1;
          r.third[i](k, l) = j.derivative(e3);
        }
      }
    }
    return r;
  }

  /// Raw third-order jet of f composed with an affine map origin + M * (x,y,z).
  /// Used by the Monge-form extraction.
  J3 affine_jet(const Vec3& origin, const Mat3& axes) const {
    if (!jet3_) throw Error("affine_jet requires analytic derivatives");
    std::array<J3, 3> c;
    const J3 x = J3::variable(0, 0.0), y = J3::variable(1, 0.0), z = J3::variable(2, 0.0);
    for (int i = 0; i < 3; ++i) c[i] = origin[i] + axes(i, 0) * x + axes(i, 1) * y + axes(i, 2) * z;
    return jet3_(c[0], c[1], c[2]);
  }

  /// Newton projection onto the level set along the gradient.
  Vec3 project(Vec3 p, double tol = 1e-14, int max_iter = 30) const {
    const double s = scale();
    for (int it = 0; it < max_iter; ++it) {
      const Local2 l = local2(p);
      const double g2 = l.grad.squaredNorm();
      if (g2 <= 0.0) throw CriticalPointError("projection hit a critical point of f");
      const Vec3 step = (l.value - level) / g2 * l.grad;
      p -= step;
      if (step.norm() <= tol * s) break;
    }
    return p;
  }

  double scale() const { return bounding_box.scale(); }
  double regularity_floor() const { return 1e-10 * scale(); }

  double level = 0.0;
  Box bounding_box;
  Orientation orientation = Orientation::Negative;
  double on_surface_tol = 1e-8;
  SampleMap sampler;
  std::optional<int> euler_characteristic;
  std::string name = "implicit";
  /// Diameter of the surface itself (not the box); used for relative radii.
  double diameter = 2.0;

 private:
  Local3 fd_local3(const Vec3& p) const {
    const double h1 = 1e-4 * scale(), h2 = 1e-3 * scale();
    auto f = [&](const Vec3& q) { return value_(q); };
    Local3 r;
    r.value = f(p);
    auto e = [](int i) { return Vec3(Vec3::Unit(i)); };
    auto d1 = [&](auto g, const Vec3& dir, double h) {
      return (-g(2 * h * dir) + 8.0 * g(h * dir) - 8.0 * g(-h * dir) + g(-2 * h * dir)) / (12.0 * h);
    };
    for (int i = 0; i < 3; ++i) r.grad[i] = d1([&](const Vec3& d) { return f(p + d); }, e(i), h1);
    for (int i = 0; i < 3; ++i)
      for (int k = i; k < 3; ++k) {
        r.hess(i, k) = r.hess(k, i) = d1(
            [&](const Vec3& d) { return d1([&](const Vec3& d2) { return f(p + d + d2); }, e(k), h1); },
            e(i), h1);
      }
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          r.third[i](k, l) = d1(
              [&](const Vec3& d) {
                return d1([&](const Vec3& d2) {
                  return d1([&](const Vec3& d3) { return f(p + d + d2 + d3); }, e(l), h2);
                }, e(k), h2);
              },
              e(i), h2);
    return r;
  }

  std::function<double(const Vec3&)> value_;
  std::function<J2(const J2&, const J2&, const J2&)> jet2_;
  std::function<J3(const J3&, const J3&, const J3&)> jet3_;
};

}  // namespace principal
