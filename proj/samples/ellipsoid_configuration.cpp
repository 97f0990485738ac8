// Umbilics, separatrices and a handful of principal lines on the triaxial
// ellipsoid, rendered to an SVG (first argument, default ellipsoid.svg).

#include <cstdio>
#include <fstream>
#include <iostream>

#include "principal/catalog/surfaces.hpp"
#include "principal/catalog/stability.hpp"
#include "principal/io/svg.hpp"
#include "principal/separatrices.hpp"
#include "principal/umbilics.hpp"

using namespace principal;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "ellipsoid.svg";
  const auto s = catalog::ellipsoid(3, 2, 1);

  auto found = find_umbilics(s);
  for (auto& u : found.umbilics) separatrix_directions(s, u);
  double isum = 0;
  for (const auto& u : found.umbilics) {
    std::printf("%-3s at (%+.6f, %+.6f, %+.6f)  index %+.1f  margin %.3f\n", to_string(u.type), u.point.x(),
                u.point.y(), u.point.z(), u.index, u.margin);
    isum += u.index;
  }
  std::printf("index sum %g\n", isum);

  ConnectionOptions co;
  co.keep_traces = true;
  const auto scan = separatrix_connection_scan(s, found.umbilics, co);
  for (const auto& c : scan.connections)
    std::printf("connection u%d -> u%d (%s, length %.4f)\n", c.from, c.to, to_string(c.foliation), c.length);

  TraceOptions t;
  t.max_length = 12;
  for (const auto& u : found.umbilics) t.umbilics.push_back(u.point);
  std::vector<Trajectory> lines;
  for (const auto& p : catalog::detail::ensemble_seeds(s, t.umbilics, 8))
    for (auto f : {FoliationId::Minimal, FoliationId::Maximal}) lines.push_back(trace(s, p, f, t));

  auto scene = io::strokes(lines);
  for (auto& st : io::strokes(scan.separatrix_traces, true)) scene.push_back(st);
  std::ofstream(path) << io::render_svg(scene, found.umbilics, io::view_from("0.4,1,0.6"), &s);
  std::cout << "wrote " << path << "\n";
}
