#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "stbc/infotheory.hpp"
#include "stbc/text_format.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(STBC_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("stbc_cli_test_" + name);
}

// "label = value +/- err ..." -> {value, err}
std::pair<double, double> parse_estimate(const std::string& line) {
  std::istringstream is(line);
  std::string label, eq, value, pm, err;
  is >> label >> eq >> value >> pm >> err;
  return {stbc::text::parse_double(value, "value"), stbc::text::parse_double(err, "std error")};
}

}  // namespace

TEST(Cli, Table1) {
  const auto r = run("table1");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out,
            "M,ssdd_rate,cod_Q,cod_T,cod_rate\n"
            "2,1,2,2,1\n"
            "3,3/4,3,4,3/4\n"
            "4,3/4,3,4,3/4\n"
            "5,2/3,10,15,2/3\n"
            "6,2/3,20,30,2/3\n");
}

TEST(Cli, Table1ToFile) {
  const auto path = temp_path("table1.csv");
  std::filesystem::remove(path);
  const auto r = run("table1 --out " + path.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), run("table1").out);
  std::filesystem::remove(path);
}

TEST(Cli, Bound) {
  const auto r = run("bound --snr-db 30 --n 2 --rate 1");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("ssdd_upper_bound = 10.966505451905741 +/- 0 bits/channel-use", 0), 0u) << r.out;
}

TEST(Cli, BoundRationalRateAndNegativeDb) {
  const auto r = run("bound --snr-db 30 --n 4 --rate 3/4");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NEAR(parse_estimate(r.out).first, 0.75 * std::log2(1.0 + 4000.0 / 0.75), 1e-12);

  const auto tiny = run("bound --snr-db -120 --n 1 --rate 1");
  EXPECT_EQ(tiny.exit_code, 0) << tiny.out;
  EXPECT_LT(parse_estimate(tiny.out).first, 1e-11);
}

TEST(Cli, CapacityMatchesQuadrature) {
  const auto r = run("capacity --snr-db 0 --m 1 --n 1 --trials 1e6 --seed 3");
  ASSERT_EQ(r.exit_code, 0);
  const auto [value, err] = parse_estimate(r.out);
  const double exact = stbc::clpod_mmi_exact(stbc::SnrSpec(1.0), 1, 1, {1, 1}).value;
  EXPECT_GT(err, 0.0);
  EXPECT_LE(std::abs(value - exact), 3.0 * err) << value << " +/- " << err << " vs " << exact;
  EXPECT_NE(r.out.find("trials=1000000"), std::string::npos);
}

TEST(Cli, ArgumentErrorsExitTwo) {
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("nonsense").exit_code, 2);
  EXPECT_EQ(run("bound").exit_code, 2);
  EXPECT_EQ(run("bound --snr-db 10 --rate 0").exit_code, 2);
  EXPECT_EQ(run("bound --snr-db 10 --rate x/y").exit_code, 2);
  EXPECT_EQ(run("bound --snr-db 10 --n 0").exit_code, 2);
  EXPECT_EQ(run("capacity --snr-db 10 --trials 0").exit_code, 2);
  EXPECT_EQ(run("capacity --snr-db 10 --trials 2.5").exit_code, 2);
  EXPECT_EQ(run("fig1 --antennas 7").exit_code, 2);
  EXPECT_EQ(run("fig1 --normalization other --trials 10").exit_code, 2);
  EXPECT_EQ(run("fig1 --nodes 1 --trials 10").exit_code, 2);
  EXPECT_EQ(run("fig2 --tol 0 --trials 10").exit_code, 2);
  EXPECT_EQ(run("verify --tol -1").exit_code, 2);
  EXPECT_EQ(run("verify --code /nonexistent/file").exit_code, 2);
  EXPECT_EQ(run("code golden").exit_code, 2);
  EXPECT_EQ(run("--help").exit_code, 0);
}

TEST(Cli, VerifyBuiltins) {
  const auto r = run("verify --trials 20000");
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);

  const auto tight = run("verify --tol 1e-15 --trials 5000");
  EXPECT_EQ(tight.exit_code, 0) << tight.out;
}

TEST(Cli, VerifyMutatedCodeFails) {
  const auto dump = run("code alamouti");
  ASSERT_EQ(dump.exit_code, 0);
  const auto good = temp_path("alamouti.txt");
  const auto bad = temp_path("alamouti_flipped.txt");
  std::ofstream(good, std::ios::binary) << dump.out;

  // third block is Re c2: "0+0j 1+0j" on its first line
  std::string text = dump.out;
  const std::string needle = "0+0j 1+0j\n-1+0j 0+0j\n";
  const auto pos = text.find(needle);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, needle.size(), "0+0j -1+0j\n-1+0j 0+0j\n");
  std::ofstream(bad, std::ios::binary) << text;

  EXPECT_EQ(run("verify --trials 5000 --code " + good.string()).exit_code, 0);
  const auto r = run("verify --trials 5000 --code " + bad.string());
  EXPECT_EQ(r.exit_code, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST(Cli, Fig1IsIndependentOfThreadCount) {
  const auto a = run("fig1 --seed 42 --trials 5000 --threads 1");
  const auto b = run("fig1 --seed 42 --trials 5000 --threads 3");
  ASSERT_EQ(a.exit_code, 0);
  ASSERT_EQ(b.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("M,N,snr_db,", 0), 0u);
}

TEST(Cli, Fig2SmallRunAndGnuplot) {
  const auto csv = temp_path("fig2.csv");
  const auto gp = temp_path("fig2.gp");
  const auto r = run("fig2 --antennas 3,2 --snr-db 20 --trials 2000 --out " + csv.string() + " --gnuplot " +
                     gp.string());
  ASSERT_EQ(r.exit_code, 0);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("M,N,snr_db,capacity,capacity_std_error,capacity_trials,necessary_rate\n2,2,20,", 0), 0u)
      << text;
  EXPECT_NE(text.find("\n3,3,20,"), std::string::npos);
  EXPECT_NE(slurp(gp).find(csv.string()), std::string::npos);
  std::filesystem::remove(csv);
  std::filesystem::remove(gp);
}
