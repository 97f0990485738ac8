#pragma once

// Surfaces and quadrics addressed by name, as written on the command line or
// in config files: "ellipsoid:3,2,1", "E_theta:0.3", "diag:1/9,1/4,1".

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "principal/catalog/strata.hpp"
#include "principal/catalog/surfaces.hpp"
#include "principal/errors.hpp"

namespace principal::catalog {

struct SurfaceSpec {
  std::string name;
  std::vector<double> params;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// A decimal number or a fraction p/q.
inline double parse_number(const std::string& tok) {
  const std::string t = trim(tok);
  auto one = [&](const std::string& x) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(x, &used);
    } catch (const std::exception&) {
      throw ParamError("not a number: '" + t + "'");
    }
    if (used != x.size()) throw ParamError("not a number: '" + t + "'");
    return v;
  };
  const auto slash = t.find('/');
  if (slash == std::string::npos) return one(t);
  const double q = one(trim(t.substr(slash + 1)));
  if (q == 0.0) throw ParamError("zero denominator in '" + t + "'");
  return one(trim(t.substr(0, slash))) / q;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = s.find(',', pos);
    out.push_back(parse_number(s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

inline SurfaceSpec parse_surface_spec(const std::string& text) {
  SurfaceSpec spec;
  const auto colon = text.find(':');
  spec.name = detail::trim(text.substr(0, colon));
  if (spec.name.empty()) throw ParamError("empty surface name");
  if (colon != std::string::npos) spec.params = detail::parse_list(text.substr(colon + 1));
  return spec;
}

inline std::vector<std::string> surface_names() {
  return {"sphere", "ellipsoid", "torus", "perturbed_torus", "perturbed_ellipsoid", "E_theta", "S_rho", "monge"};
}

/// Missing trailing parameters take their defaults; `seed` only matters for
/// perturbed_ellipsoid.
inline ImplicitSurface make_surface(const SurfaceSpec& spec, std::uint64_t seed = 0) {
  const auto& p = spec.params;
  auto arg = [&](std::size_t i, double def) { return i < p.size() ? p[i] : def; };
  auto at_most = [&](std::size_t n) {
    if (p.size() > n)
      throw ParamError(spec.name + " takes at most " + std::to_string(n) + " parameters, got " +
                       std::to_string(p.size()));
  };
  if (spec.name == "sphere") {
    at_most(1);
    return sphere(arg(0, 1.0));
  }
  if (spec.name == "ellipsoid") {
    at_most(3);
    return ellipsoid(arg(0, 3.0), arg(1, 2.0), arg(2, 1.0));
  }
  if (spec.name == "torus") {
    at_most(2);
    return torus(arg(0, 2.0), arg(1, 1.0));
  }
  if (spec.name == "perturbed_torus") {
    at_most(3);
    return perturbed_torus(arg(0, 2.0), arg(1, 0.5), arg(2, 0.05));
  }
  if (spec.name == "perturbed_ellipsoid") {
    at_most(4);
    return perturbed_ellipsoid(arg(0, 3.0), arg(1, 2.0), arg(2, 1.0), arg(3, 0.02), seed);
  }
  if (spec.name == "E_theta") {
    at_most(4);
    EThetaParams e;
    e.theta = arg(0, 0.0);
    e.cap_deformation = arg(1, e.cap_deformation);
    e.blend_start = arg(2, e.blend_start);
    e.blend_end = arg(3, e.blend_end);
    return e_theta(e);
  }
  if (spec.name == "S_rho") {
    at_most(3);
    return s_rho(arg(0, 0.0), arg(1, 3.0), arg(2, 2.0));
  }
  if (spec.name == "monge") {
    at_most(4);
    return monge_graph(arg(0, 1.0), arg(1, 0.5), arg(2, 1.0), arg(3, 0.0));
  }
  throw ParamError("unknown surface '" + spec.name + "'");
}

inline ImplicitSurface make_surface(const std::string& text, std::uint64_t seed = 0) {
  return make_surface(parse_surface_spec(text), seed);
}

/// "diag:l1,l2,l3[,level]" or "sym:a11,a12,a13,a22,a23,a33[,b1,b2,b3[,c]]".
inline QuadricSpec parse_quadric(const std::string& text) {
  const SurfaceSpec s = parse_surface_spec(text);
  const auto& p = s.params;
  if (s.name == "diag") {
    if (p.size() != 3 && p.size() != 4) throw ParamError("diag takes 3 eigenvalues and an optional level");
    return QuadricSpec::diagonal(p[0], p[1], p[2], p.size() == 4 ? p[3] : 1.0);
  }
  if (s.name == "sym") {
    if (p.size() != 6 && p.size() != 9 && p.size() != 10)
      throw ParamError("sym takes 6 matrix entries, then optionally 3 linear terms and a constant");
    QuadricSpec q;
    q.A << p[0], p[1], p[2], p[1], p[3], p[4], p[2], p[4], p[5];
    if (p.size() >= 9) q.b = Vec3(p[6], p[7], p[8]);
    if (p.size() == 10) q.c = p[9];
    if (q.A.cwiseAbs().maxCoeff() == 0.0) throw ParamError("quadratic part is the zero form");
    return q;
  }
  throw ParamError("unknown quadric form '" + s.name + "' (use diag: or sym:)");
}

}  // namespace principal::catalog
