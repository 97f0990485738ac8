#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::temp_directory_path() / "principal_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(PRINCIPAL_CLI) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path dir(const std::string& name) {
  const fs::path d = kTmp / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Cli, UmbilicsWritesArtifacts) {
  const auto d = dir("umb");
  ASSERT_EQ(run("umbilics --surface ellipsoid:3,2,1 --out " + d.string()), 0);
  ASSERT_TRUE(fs::exists(d / "report.json"));
  ASSERT_TRUE(fs::exists(d / "umbilics.svg"));
  ASSERT_TRUE(fs::exists(d / "umbilics.csv"));
  const auto j = nlohmann::json::parse(slurp(d / "report.json"));
  EXPECT_EQ(j.at("umbilics").size(), 4u);
  EXPECT_EQ(j.at("command"), "umbilics");
  EXPECT_EQ(j.at("config").at("surface"), "ellipsoid:3,2,1");
  EXPECT_TRUE(j.at("timing_seconds").is_null());
}

TEST(Cli, ExitCodes) {
  const auto d = dir("codes");
  EXPECT_EQ(run("umbilics --surface nosuch --out " + d.string()), 2);
  EXPECT_EQ(run("umbilics --bogus-flag"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("strata --out " + d.string()), 2);
  EXPECT_EQ(run("trace --surface ellipsoid --set length=-1 --out " + d.string()), 2);
  EXPECT_EQ(run("trace --surface ellipsoid --config /nonexistent.cfg --out " + d.string()), 2);
  // no principal lines on the sphere, so no return to the section
  EXPECT_EQ(run("rotation --surface sphere:1 --out " + d.string()), 3);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, ConfigFileWithOverrides) {
  const auto d = dir("cfg");
  fs::create_directories(d);
  {
    std::ofstream f(d / "run.cfg");
    f << "# strata run\nquadric = diag:1,1,1\ntol = 1e-8\n";
  }
  ASSERT_EQ(run("strata --config " + (d / "run.cfg").string() + " --quadric diag:1/9,1/4,1 --out " + d.string()), 0);
  const auto j = nlohmann::json::parse(slurp(d / "report.json"));
  EXPECT_EQ(j.at("strata").at("tag"), "E3_triaxial");
  EXPECT_EQ(j.at("config").at("tol"), "1e-8");
}

TEST(Cli, RerunsAreByteIdentical) {
  const char* runs[] = {
      "umbilics --surface ellipsoid:3,2,1",
      "trace --surface perturbed_ellipsoid:3,2,1,0.02 --seed 5 --set seeds=2 --set length=5",
      "rotation --surface E_theta:0.3 --section equator --set seeds=3",
      "stability --surface ellipsoid:3,2,1 --view +z",
  };
  int k = 0;
  for (const char* args : runs) {
    const auto a = dir("det_a" + std::to_string(k)), b = dir("det_b" + std::to_string(k));
    ASSERT_EQ(run(std::string(args) + " --out " + a.string()), 0) << args;
    ASSERT_EQ(run(std::string(args) + " --threads 1 --out " + b.string()), 0) << args;
    for (const auto& e : fs::directory_iterator(a)) {
      const auto name = e.path().filename();
      ASSERT_TRUE(fs::exists(b / name)) << name;
      EXPECT_EQ(slurp(e.path()), slurp(b / name)) << args << " " << name;
    }
    ++k;
  }
}
