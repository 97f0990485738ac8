// principal: command-line front end.
//
//   principal <command> [--surface NAME:P1,P2,...] [--config FILE] [--set key=value]...
//             [--seed N] [--out DIR] [--view +y] [--threads N] [--no-svg] [--timing]
//
// Writes DIR/report.json, DIR/<command>.svg and DIR/<command>.csv.
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "principal/io/commands.hpp"

namespace fs = std::filesystem;
using namespace principal;

namespace {

constexpr int kUsage = 2;
constexpr int kNumerical = 3;

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw io::ConfigError("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw io::ConfigError("write failed for '" + p.string() + "'");
}

struct Flags {
  std::string surface, quadric, config_file, out = "principal_out", view, section;
  std::vector<std::string> sets;
  std::string seed;
  int threads = 0;
  bool no_svg = false, no_csv = false, timing = false;
};

io::RunConfig build_config(const std::string& command, const Flags& fl) {
  io::RunConfig cfg;
  cfg.command = command;
  if (!fl.config_file.empty()) cfg.values = io::read_config_file(fl.config_file);
  // flags override the file
  for (const auto& kv : fl.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw io::ConfigError("--set expects key=value, got '" + kv + "'");
    const auto parsed = io::parse_config_text(kv);
    for (const auto& [k, v] : parsed) cfg.set(k, v);
  }
  if (!fl.surface.empty()) cfg.set("surface", fl.surface);
  if (!fl.quadric.empty()) cfg.set("quadric", fl.quadric);
  if (!fl.seed.empty()) cfg.set("seed", fl.seed);
  if (!fl.view.empty()) cfg.set("view", fl.view);
  if (!fl.section.empty()) cfg.set("section", fl.section);
  if (fl.no_svg) cfg.set("svg", "false");
  if (fl.no_csv) cfg.set("csv", "false");
  if (fl.timing) cfg.set("timing", "true");
  if (fl.threads > 0) cfg.set("threads", std::to_string(fl.threads));
  return cfg;
}

int run(const std::string& command, const Flags& fl) {
  const io::RunConfig cfg = build_config(command, fl);
  if (cfg.has("threads")) {
    const int n = cfg.count("threads", 1, 1);
    setenv("PRINCIPAL_CONFIG_THREADS", std::to_string(n).c_str(), 1);
  }
  const io::CommandOutput out = io::run_command(cfg);

  const fs::path dir = fl.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::ConfigError("cannot create output directory '" + dir.string() + "'");
  write_file(dir / "report.json", io::serialize(out.report));
  if (!out.svg.empty()) write_file(dir / (command + ".svg"), out.svg);
  if (!out.csv.empty()) write_file(dir / (command + ".csv"), out.csv);
  std::cout << command << ": " << out.summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal curvature configurations: umbilics, lines, cycles, rotation, strata, stability"};
  app.require_subcommand(1);
  Flags fl;
  std::string chosen;
  for (const auto& name : io::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--surface", fl.surface, "surface as name:params, e.g. ellipsoid:3,2,1");
    if (name == "strata")
      sub->add_option("--quadric", fl.quadric, "diag:l1,l2,l3[,level] or sym:a11,a12,a13,a22,a23,a33[,b1,b2,b3[,c]]");
    if (name == "rotation") sub->add_option("--section", fl.section, "equator or meridian");
    sub->add_option("--config", fl.config_file, "key = value config file");
    sub->add_option("--set", fl.sets, "extra key=value (repeatable)");
    sub->add_option("--seed", fl.seed, "random seed (default 0)");
    sub->add_option("--out", fl.out, "output directory")->capture_default_str();
    sub->add_option("--view", fl.view, "view axis: +x, -y, ... or x,y,z");
    sub->add_option("--threads", fl.threads, "worker cap (sets PRINCIPAL_CONFIG_THREADS)");
    sub->add_flag("--no-svg", fl.no_svg, "skip the SVG");
    sub->add_flag("--no-csv", fl.no_csv, "skip the CSV");
    sub->add_flag("--timing", fl.timing, "record wall time in the report");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    return run(chosen, fl);
  } catch (const io::ConfigError& e) {
    std::cerr << "principal: " << e.what() << "\n";
    return kUsage;
  } catch (const ParamError& e) {
    std::cerr << "principal: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "principal: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "principal: numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}
