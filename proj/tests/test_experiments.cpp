#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "stbc/experiments.hpp"

using namespace stbc;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

ExperimentConfig small_config(ExperimentConfig cfg, std::uint64_t trials) {
  cfg.trials = trials;
  cfg.seed = 42;
  return cfg;
}

// Frozen from the first verified run: M = N = 2, 30 dB, seed 1, 10^6 capacity draws.
constexpr double kFig2BaselineCapacity = 17.744298785941716;
constexpr double kFig2BaselineRate = 1.7459678649902344;
// Ergodic 2x2 capacity at 30 dB by numerical integration of the eigenvalue density.
constexpr double kCapacity2x2At30dB = 17.744262624090261;

}  // namespace

TEST(Table1, ExactRows) {
  std::ostringstream os;
  write_table1_csv(os, table1());
  EXPECT_EQ(os.str(),
            "M,ssdd_rate,cod_Q,cod_T,cod_rate\n"
            "2,1,2,2,1\n"
            "3,3/4,3,4,3/4\n"
            "4,3/4,3,4,3/4\n"
            "5,2/3,10,15,2/3\n"
            "6,2/3,20,30,2/3\n");
}

TEST(Table1, RateIsQOverT) {
  for (const auto& r : table1()) {
    EXPECT_EQ(r.cod_rate(), Rational(r.cod_q, r.cod_t));
    EXPECT_EQ(r.cod_parameters().symbol_rate(), r.cod_rate());
  }
  EXPECT_EQ(table1_row(5)->cod_q, 10);
  EXPECT_EQ(table1_row(5)->cod_t, 15);
  EXPECT_EQ(table1_row(2)->ssdd_rate, Rational(1));
  EXPECT_FALSE(table1_row(7).has_value());
}

TEST(Config, Validation) {
  auto cfg = fig1_defaults();
  EXPECT_NO_THROW(cfg.validate());
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = fig2_defaults();
  cfg.antenna_range = {0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = fig2_defaults();
  cfg.snr_db_list.clear();
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = fig1_defaults();
  cfg.quadrature_nodes = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Fig1, RowsAndInequalities) {
  const auto rows = fig1(small_config(fig1_defaults(), 20000));
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    EXPECT_EQ(r.num_antennas, static_cast<int>(i) + 2);
    EXPECT_EQ(r.snr_db, 30.0);
    EXPECT_GE(r.ssdd_bound.value + 3.0 * r.cod_mmi.std_error, r.cod_mmi.value);
    EXPECT_GE(r.cod_mmi.value, 0.0);
    EXPECT_LE(r.cod_mmi.value, r.capacity.value + 3.0 * r.capacity.std_error);
    EXPECT_EQ(r.capacity.trials, 20000u);
  }
  EXPECT_DOUBLE_EQ(rows[0].ssdd_bound.value, std::log2(2001.0));
  const double gap2 = (rows[0].ssdd_bound.value - rows[0].cod_mmi.value) / rows[0].ssdd_bound.value;
  const double gap6 = (rows[4].ssdd_bound.value - rows[4].cod_mmi.value) / rows[4].ssdd_bound.value;
  EXPECT_LT(gap2, gap6);
}

TEST(Fig1, RejectsAntennaCountsWithoutCodParameters) {
  auto cfg = small_config(fig1_defaults(), 100);
  cfg.antenna_range = {2, 7};
  EXPECT_THROW(fig1(cfg), std::invalid_argument);
}

TEST(Fig1, CsvSchemaAndOrdering) {
  auto cfg = small_config(fig1_defaults(), 500);
  cfg.antenna_range = {4, 2};
  cfg.snr_db_list = {30, 10};
  std::ostringstream os;
  write_fig1_csv(os, fig1(cfg));
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls[0],
            "M,N,snr_db,ssdd_rate,ssdd_bound,cod_Q,cod_T,cod_mmi,cod_mmi_std_error,cod_mmi_method,"
            "capacity,capacity_std_error,capacity_trials");
  EXPECT_EQ(ls[1].rfind("2,2,10,1,", 0), 0u);
  EXPECT_EQ(ls[2].rfind("2,2,30,1,10.966505451905741,2,2,", 0), 0u);
  EXPECT_EQ(ls[3].rfind("4,4,10,3/4,", 0), 0u);
  EXPECT_EQ(ls[4].rfind("4,4,30,3/4,", 0), 0u);
  EXPECT_NE(ls[4].find(",0,quadrature,"), std::string::npos);
  EXPECT_EQ(ls[4].substr(ls[4].rfind(',')), ",500");
  EXPECT_EQ(os.str().find('\r'), std::string::npos);
}

TEST(Fig1, DeterministicAcrossThreadCounts) {
  auto a = small_config(fig1_defaults(), 3000);
  auto b = a;
  a.threads = 1;
  b.threads = 4;
  std::ostringstream sa, sb;
  write_fig1_csv(sa, fig1(a));
  write_fig1_csv(sb, fig1(b));
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Fig1, PowerConsistentNormalizationOnlyMovesRowsWithTNotM) {
  auto a = small_config(fig1_defaults(), 200);
  auto b = a;
  b.normalization_mode = ClpodNormalization::power_consistent;
  const auto ra = fig1(a), rb = fig1(b);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const bool t_equals_m = ra[i].parameters.cod_t == ra[i].num_antennas;
    if (t_equals_m) EXPECT_EQ(ra[i].cod_mmi.value, rb[i].cod_mmi.value);
    else EXPECT_NE(ra[i].cod_mmi.value, rb[i].cod_mmi.value);
    EXPECT_EQ(ra[i].capacity.value, rb[i].capacity.value);
  }
}

TEST(Fig2, PropertiesAndSchema) {
  auto cfg = small_config(fig2_defaults(), 10000);
  const auto rows = fig2(cfg);
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].result.rate, 0.75);
    if (i >= 3) {
      ASSERT_EQ(rows[i].snr_db, rows[i - 3].snr_db);
      EXPECT_GT(rows[i].result.rate, rows[i - 3].result.rate);
    }
  }
  std::ostringstream os;
  write_fig2_csv(os, rows);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 22u);
  EXPECT_EQ(ls[0], "M,N,snr_db,capacity,capacity_std_error,capacity_trials,necessary_rate");
  EXPECT_EQ(ls[1].rfind("2,2,10,", 0), 0u);
  EXPECT_EQ(ls[3].rfind("2,2,30,", 0), 0u);
  EXPECT_EQ(ls[21].rfind("8,8,30,", 0), 0u);
}

TEST(Fig2, RegressionBaseline) {
  ExperimentConfig cfg = fig2_defaults();
  cfg.antenna_range = {2};
  cfg.snr_db_list = {30};
  cfg.trials = 1000000;
  const auto rows = fig2(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].result.capacity.value, kFig2BaselineCapacity);
  EXPECT_NEAR(rows[0].result.rate, kFig2BaselineRate, 1e-9);
  EXPECT_LE(std::abs(rows[0].result.capacity.value - kCapacity2x2At30dB), 3.0 * rows[0].result.capacity.std_error);
}

TEST(Fig2, UnreachableCapacityCarriesContext) {
  // At -40 dB a small-sample capacity estimate overshoots rho N log2(e) whenever
  // the sample mean of |h|^2 lands above ~1 + rho/2.
  ExperimentConfig cfg = fig2_defaults();
  cfg.snr_db_list = {-40};
  cfg.antenna_range = {1};
  cfg.trials = 200;
  int thrown = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    try {
      fig2(cfg);
    } catch (const PreconditionError& e) {
      ++thrown;
      EXPECT_NE(std::string(e.what()).find("M=N=1, -40 dB"), std::string::npos) << e.what();
    }
  }
  EXPECT_GT(thrown, 0);
}

TEST(Gnuplot, ScriptsReferenceCsv) {
  std::ostringstream a, b;
  write_fig1_gnuplot(a, "f1.csv");
  write_fig2_gnuplot(b, "f2.csv");
  EXPECT_NE(a.str().find("'f1.csv'"), std::string::npos);
  EXPECT_NE(b.str().find("'f2.csv'"), std::string::npos);
}

TEST(Verify, BuiltinsPass) {
  VerifyOptions opt;
  opt.expectation_trials = 20000;
  const auto report = verify_builtin(opt);
  EXPECT_TRUE(report.all_passed()) << report;
  EXPECT_EQ(report.checks.size(), 12u);
}

TEST(Verify, ExactEntriesPassAtTightTolerance) {
  VerifyOptions opt;
  opt.algebraic_tol = 1e-15;
  opt.expectation_trials = 5000;
  EXPECT_TRUE(verify_builtin(opt).all_passed());
}

TEST(Verify, SignFlipIsCaught) {
  auto mats = alamouti().matrices();
  mats[2](0, 1) *= -1.0;
  const DispersionSet broken(2, 2, 2, mats, "alamouti-flipped");
  VerifyOptions opt;
  opt.expectation_trials = 5000;
  const auto report = verify_codes({broken}, opt);
  EXPECT_FALSE(report.all_passed());
  std::ostringstream os;
  os << report;
  EXPECT_NE(os.str().find("FAIL  alamouti-flipped: classify"), std::string::npos);
}
