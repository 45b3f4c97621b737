#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oiss/cli.hpp"
#include "oiss/csv.hpp"
#include "oiss/piecewise.hpp"

using namespace oiss;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::filesystem::path temp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

}  // namespace

TEST(Cli, Usage) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"young", "check", "--phi", "power:2", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  const auto r = run({"young", "check", "--phi", "cosh"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_EQ(lines(r.err).size(), 1u);
}

TEST(Cli, YoungCheck) {
  const auto r = run({"young", "check", "--phi", "power:2"});
  EXPECT_EQ(r.code, cli::kExitOk);
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "property,pass,first_failure,detail");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].starts_with("#")) continue;
    EXPECT_NE(rows[i].find(",pass,"), std::string::npos) << rows[i];
  }
}

TEST(Cli, YoungCheckFailureExitsOne) {
  const auto path = temp("oiss_cli_bounded.csv");
  write(path, "s,phi\n0,0\n1,1\n2000,1\n");
  EXPECT_EQ(run({"young", "check", "--phi", "tabulated:" + path.string()}).code, cli::kExitVerdictFailed);
}

TEST(Cli, YoungDelta2) {
  const auto r = run({"young", "delta2", "--phi", "power:3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[1], "8,delta2");
  EXPECT_EQ(lines(run({"young", "delta2", "--phi", "exp_minus"}).out)[1].substr(
                lines(run({"young", "delta2", "--phi", "exp_minus"}).out)[1].find(',') + 1),
            "not-delta2");
}

TEST(Cli, Norm) {
  const auto path = temp("oiss_cli_chi.csv");
  write(path, to_csv(PiecewiseFn::indicator(0.0, 4.0)));
  const auto r = run({"norm", "--phi", "power:2", "--kind", "luxemburg", "--input", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto row = csv::split(lines(r.out)[1], ',');
  EXPECT_NEAR(csv::parse_double(row[0]), 2.0, 1e-9);
  const auto lp = run({"norm", "--kind", "lp", "--p", "2", "--input", path.string()});
  EXPECT_EQ(lines(lp.out)[1], "2");
  EXPECT_EQ(lines(run({"norm", "--kind", "linf", "--input", path.string()}).out)[1], "1");
  EXPECT_EQ(run({"norm", "--kind", "lp", "--p", "0.5", "--input", path.string()}).code, cli::kExitUsage);
}

TEST(Cli, SimulateScalar) {
  const auto r = run({"simulate", "--model", "scalar:-1:1", "--x0", "0", "--input", "1", "--t", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "k,x");
  EXPECT_NEAR(csv::parse_double(csv::split(rows[1], ',')[1]), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_TRUE(rows.back().starts_with("# norm="));
}

TEST(Cli, SimulateTranslation) {
  const auto path = temp("oiss_cli_u.csv");
  write(path, to_csv(PiecewiseFn::indicator(0.0, 1.0)));
  const auto r = run({"simulate", "--model", "translation", "--input", path.string(), "--t", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).back(), "# norm=0.5");
}

TEST(Cli, CounterexampleThreeBlocks) {
  const auto r = run({"counterexample", "--phi", "power:2", "--blocks", "3", "--t-grid", "breakpoints"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "t,x_norm_fubini,x_norm_direct,u_l1,u_ephi,ephi_bound,ratio_l1,ratio_ephi,ratio_linf");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = csv::split(rows[i], ',');
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_LE(csv::parse_double(cells[6]), 1.0 + 1e-9);
  }
}

TEST(Cli, CounterexampleDumpAndOut) {
  const auto dir = temp("oiss_cli_dump");
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto out = dir / "report.csv";
  const auto r = run({"counterexample", "--blocks", "3", "--out", out.string(), "--dump-functions", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(std::filesystem::exists(dir / "u0.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "h.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "g.csv"));
  EXPECT_EQ(lines(slurp(out)).size(), 4u);
}

TEST(Cli, Admissibility) {
  const auto r = run({"admissibility", "--model", "translation", "--z", "l1", "--t-grid", "log:1:1e6:13", "--family",
                      "shifted-bumps"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "t,best_ratio,witness,verdict");
  EXPECT_EQ(rows.size(), 14u);
  EXPECT_TRUE(rows.back().ends_with(",bounded-evidence"));
}

TEST(Cli, AdmissibilityRandomBumpsDeterministic) {
  const std::vector<std::string> args{"admissibility", "--model", "scalar:-1:1", "--z", "linf",
                                      "--family",      "random-bumps", "--seed", "42"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, VerifyScalarPasses) {
  const auto r = run({"verify", "--mode", "siss", "--model", "scalar:-1:1", "--x0", "1", "--beta", "exp:1:1", "--z",
                      "l1"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto s = run({"verify", "--mode", "siiss", "--model", "scalar:-1:1", "--x0", "1", "--beta", "exp:1:1",
                      "--theta", "power:0.5", "--mu", "power:2"});
  EXPECT_EQ(s.code, 0) << s.out << s.err;
}

TEST(Cli, VerifyCounterexampleFails) {
  const auto r = run({"verify", "--mode", "siss", "--model", "translation", "--z", "linf", "--family", "counterexample",
                      "--blocks", "20"});
  EXPECT_EQ(r.code, cli::kExitVerdictFailed);
  EXPECT_NE(r.out.find(",fail"), std::string::npos);
}

TEST(Cli, VerifyRejectedCertificate) {
  const auto r = run({"verify", "--model", "scalar:-1:1", "--x0", "1", "--beta", "exp:1:1", "--mu", "power:-1"});
  EXPECT_EQ(r.code, cli::kExitUsage);
}

TEST(Cli, SlackFromEnvironment) {
  ::setenv("OISS_TOL", "-1", 1);
  const auto r = run({"verify", "--model", "scalar:-1:1", "--x0", "1", "--beta", "exp:1:1"});
  ::unsetenv("OISS_TOL");
  EXPECT_EQ(r.code, cli::kExitUsage);
}

TEST(Cli, ConfigFile) {
  const auto cfg = temp("oiss_cli.cfg");
  write(cfg, "# three blocks\ncommand = counterexample\nphi = power:2\nblocks = 3\nt-grid = breakpoints\n");
  const auto a = run({"--config", cfg.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run({"counterexample", "--phi", "power:2", "--blocks", "3"});
  EXPECT_EQ(a.out, b.out);
  // command-line flags win over the file
  const auto c = run({"--config", cfg.string(), "--blocks", "2"});
  EXPECT_EQ(lines(c.out).size(), 3u);
  EXPECT_EQ(run({"--config", temp("oiss_missing.cfg").string()}).code, cli::kExitUsage);
}

TEST(Cli, SeventeenDigits) {
  const auto r = run({"young", "eval", "--phi", "exp_minus", "--t", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = csv::split(lines(r.out)[1], ',')[1];
  EXPECT_EQ(csv::parse_double(v), std::exp(1.0) - 2.0);
}
