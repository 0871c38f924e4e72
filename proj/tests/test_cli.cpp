#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "assouad/io.hpp"

using namespace assouad;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("assouad_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  int run(const std::string& args) const {
    const std::string cmd =
        "cd '" + dir_.string() + "' && '" + std::string(ASSOUAD_CLI) + "' " + args + " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }
  json read(const std::string& name) const { return parse_json(read_text(path(name))); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidateExitCodes) {
  ASSERT_EQ(run("family --family M --kappa 1 --c 0.5 --out m.json"), 0);
  EXPECT_EQ(run("validate m.json --report r.json"), 0);
  EXPECT_TRUE(read("r.json")["passed"].get<bool>());

  write("id.json", R"({"d":1,"form":"table","breakpoints":[0,0.25,0.5,0.75,1],"values":[0,0.25,0.5,0.75,1]})");
  EXPECT_EQ(run("validate id.json --report r2.json"), 1);
  const json r = read("r2.json");
  EXPECT_FALSE(r["passed"].get<bool>());
  bool has_witness = false;
  for (const auto& c : r["checks"])
    if (!c["passed"].get<bool>()) has_witness = has_witness || !c["witness"].empty();
  EXPECT_TRUE(has_witness);

  write("bad.json", R"({"d":1,"form":"beta","breakpoints":[0,)");
  EXPECT_EQ(run("validate bad.json"), 2);
  EXPECT_EQ(run("validate missing.json"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, FamilyOutputs) {
  ASSERT_EQ(run("family --family C --kappa 1 --c1 0.3333333 --c2 0.5 --out c.json"), 0);
  const SpectrumFn c = read_spectrum(path("c.json"));
  EXPECT_NEAR(c.phi(1.0 / 3.0), 0.75, 1e-6);
  EXPECT_EQ(run("validate c.json"), 0);

  ASSERT_EQ(run("family --family holder --out h.json"), 0);
  EXPECT_NEAR(read("h.json")["theta0"].get<double>(), 0.801712, 1e-6);
  EXPECT_EQ(run("validate h.json"), 0);

  ASSERT_EQ(run("family --family M --kappa 0 --out z.json"), 0);
  for (double v : read("z.json")["values"]) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(run("validate z.json"), 0);

  ASSERT_EQ(run("family --family nonmono --kappa 1 --c 0.5 --eps 0.1 --depth 4 --out n.json"), 0);
  EXPECT_EQ(read("n.json")["choices"].size(), 15u);
  EXPECT_EQ(run("validate n.json"), 0);

  EXPECT_EQ(run("family --family C --c1 0.3 --c2 0.2"), 2);
  EXPECT_EQ(run("family --family Q"), 2);
}

TEST_F(Cli, RoundtripAndReplay) {
  ASSERT_EQ(run("family --family M --kappa 1 --c 0.5 --out m.json"), 0);
  ASSERT_EQ(run("--manifest man.json roundtrip m.json --xmax 60 --out rt.csv"), 0);
  const CsvData d = parse_csv(read_text(path("rt.csv")));
  ASSERT_EQ(d.rows.size(), 9u);
  for (const auto& row : d.rows) EXPECT_LE(row[4], 0.01);
  const std::string before = read_text(path("rt.csv"));
  fs::remove(path("rt.csv"));
  EXPECT_EQ(run("replay man.json"), 0);
  EXPECT_EQ(read_text(path("rt.csv")), before);
  EXPECT_EQ(read("man.json")["outputs"][0], "rt.csv");

  EXPECT_EQ(run("roundtrip m.json --alpha 0.5"), 2);

  ASSERT_EQ(run("family --family M --kappa 0 --out z.json"), 0);
  ASSERT_EQ(run("roundtrip z.json --out rz.csv"), 0);
  for (const auto& row : parse_csv(read_text(path("rz.csv"))).rows) EXPECT_EQ(row[2], 0.0);

  ASSERT_EQ(run("family --family holder --out h.json"), 0);
  ASSERT_EQ(run("roundtrip h.json --out rh.csv"), 0);
  for (const auto& row : parse_csv(read_text(path("rh.csv"))).rows) EXPECT_LE(row[4], 0.05);
}

TEST_F(Cli, PlotScheduleAndPoints) {
  ASSERT_EQ(run("family --family C --kappa 1 --c1 0.3333333333333333 --c2 0.5 --out c.json"), 0);
  ASSERT_EQ(run("family --family M --kappa 1 --c 0.3333333333333333 --out m.json"), 0);
  ASSERT_EQ(run("plot c.json m.json --out fig.svg"), 0);
  const std::string svg = read_text(path("fig.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(run("plot c.json m.json --out fig2.svg"), 0);
  EXPECT_EQ(read_text(path("fig2.svg")), svg);
  EXPECT_EQ(run("plot c.json --secant 0.3,0.6 --out sec.svg"), 0);
  EXPECT_EQ(run("plot --out empty.svg"), 2);
  EXPECT_EQ(run("plot nothing.json --out x.svg"), 2);

  ASSERT_EQ(run("schedule m.json --xmax 3 --out s.csv"), 0);
  ASSERT_EQ(run("schedule --ratio 0.3333333333333333 --levels 6 --out c.csv"), 0);
  ASSERT_EQ(run("points c.csv --level 2 --out p.csv"), 0);
  const CsvData p = parse_csv(read_text(path("p.csv")));
  ASSERT_EQ(p.rows.size(), 4u);
  EXPECT_NEAR(p.rows[1][0], 2.0 / 9.0, 1e-15);
  EXPECT_EQ(run("points c.csv --level 6 --max-points 10"), 2);
  ASSERT_EQ(run("plot p.csv --out pts.svg"), 0);
  EXPECT_NE(read_text(path("pts.svg")).find("<circle"), std::string::npos);
  EXPECT_EQ(run("plot c.csv --out sched.svg"), 0);
}
