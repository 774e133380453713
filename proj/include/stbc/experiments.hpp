#pragma once

// Reproduction harness: the parameter table, the bound-vs-COD comparison, the
// necessary-rate sweep and the verification suite, with their CSV encodings.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stbc/channel.hpp"
#include "stbc/dispersion.hpp"
#include "stbc/infotheory.hpp"
#include "stbc/rational.hpp"
#include "stbc/rng.hpp"
#include "stbc/text_format.hpp"

namespace stbc {

struct Table1Row {
  int num_antennas;  // M = N
  Rational ssdd_rate;
  int cod_q;
  int cod_t;

  Rational cod_rate() const { return Rational(cod_q, cod_t); }
  RateParameters cod_parameters() const { return RateParameters(cod_q, cod_t); }
};

/// Delay-optimal COD parameters and the matching SSDD rate for M = N = 2..6.
inline std::vector<Table1Row> table1() {
  return {
      {2, Rational(1), 2, 2},
      {3, Rational(3, 4), 3, 4},
      {4, Rational(3, 4), 3, 4},
      {5, Rational(2, 3), 10, 15},
      {6, Rational(2, 3), 20, 30},
  };
}

inline std::optional<Table1Row> table1_row(int num_antennas) {
  for (const auto& r : table1()) {
    if (r.num_antennas == num_antennas) return r;
  }
  return std::nullopt;
}

inline void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  os << "M,ssdd_rate,cod_Q,cod_T,cod_rate\n";
  for (const auto& r : rows) {
    os << r.num_antennas << ',' << r.ssdd_rate << ',' << r.cod_q << ',' << r.cod_t << ',' << r.cod_rate() << '\n';
  }
}

struct ExperimentConfig {
  std::vector<double> snr_db_list;
  std::vector<int> antenna_range;  // M = N
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int quadrature_nodes = 128;
  ClpodNormalization normalization_mode = ClpodNormalization::paper;
  unsigned threads = 0;
  double rate_tol = 1e-6;
  std::string output_path;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (quadrature_nodes < 2) throw std::invalid_argument("quadrature node count must be at least 2");
    if (snr_db_list.empty()) throw std::invalid_argument("SNR list is empty");
    if (antenna_range.empty()) throw std::invalid_argument("antenna list is empty");
    for (int m : antenna_range) {
      if (m < 1) throw std::invalid_argument("antenna counts must be >= 1");
    }
  }
};

inline ExperimentConfig fig1_defaults() {
  ExperimentConfig c;
  c.snr_db_list = {30.0};
  c.antenna_range = {2, 3, 4, 5, 6};
  return c;
}

inline ExperimentConfig fig2_defaults() {
  ExperimentConfig c;
  c.snr_db_list = {10.0, 20.0, 30.0};
  c.antenna_range = {2, 3, 4, 5, 6, 7, 8};
  return c;
}

namespace detail {

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

/// Per-row master seed so that rows draw independent channels.
inline std::uint64_t row_seed(std::uint64_t seed, std::uint64_t figure, int antennas, std::size_t snr_index) {
  return derive_seed(derive_seed(seed, figure), (static_cast<std::uint64_t>(antennas) << 20) | snr_index);
}

}  // namespace detail

struct Fig1Row {
  int num_antennas;
  double snr_db;
  Table1Row parameters;
  EstimateWithError ssdd_bound;
  EstimateWithError cod_mmi;
  EstimateWithError capacity;
};

inline std::vector<Fig1Row> fig1(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto antennas = detail::sorted_unique(cfg.antenna_range);
  const auto snrs = detail::sorted_unique(cfg.snr_db_list);
  for (int m : antennas) {
    if (!table1_row(m)) {
      throw std::invalid_argument("fig1: no delay-optimal COD parameters for M=" + std::to_string(m) +
                                  " (supported: 2..6)");
    }
  }
  std::vector<Fig1Row> rows;
  for (int m : antennas) {
    const Table1Row p = *table1_row(m);
    for (std::size_t k = 0; k < snrs.size(); ++k) {
      const SnrSpec rho = SnrSpec::from_db(snrs[k]);
      const RateParameters ssdd_rate(static_cast<int>(p.ssdd_rate.num()), static_cast<int>(p.ssdd_rate.den()));
      ClpodOptions clpod;
      clpod.nodes = cfg.quadrature_nodes;
      clpod.normalization = cfg.normalization_mode;
      const McOptions mc{cfg.trials, detail::row_seed(cfg.seed, 1, m, k), cfg.threads};
      rows.push_back({m, snrs[k], p, ssdd_upper_bound(rho, m, ssdd_rate),
                      clpod_mmi_exact(rho, m, m, p.cod_parameters(), clpod), mimo_capacity(rho, m, m, mc)});
    }
  }
  return rows;
}

inline void write_fig1_csv(std::ostream& os, const std::vector<Fig1Row>& rows) {
  using text::format_double;
  os << "M,N,snr_db,ssdd_rate,ssdd_bound,cod_Q,cod_T,cod_mmi,cod_mmi_std_error,cod_mmi_method,"
        "capacity,capacity_std_error,capacity_trials\n";
  for (const auto& r : rows) {
    os << r.num_antennas << ',' << r.num_antennas << ',' << format_double(r.snr_db) << ','
       << r.parameters.ssdd_rate << ',' << format_double(r.ssdd_bound.value) << ',' << r.parameters.cod_q << ','
       << r.parameters.cod_t << ',' << format_double(r.cod_mmi.value) << ','
       << format_double(r.cod_mmi.std_error) << ',' << to_string(r.cod_mmi.method) << ','
       << format_double(r.capacity.value) << ',' << format_double(r.capacity.std_error) << ','
       << r.capacity.trials << '\n';
  }
}

struct Fig2Row {
  int num_antennas;
  double snr_db;
  NecessaryRate result;
};

inline std::vector<Fig2Row> fig2(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto antennas = detail::sorted_unique(cfg.antenna_range);
  const auto snrs = detail::sorted_unique(cfg.snr_db_list);
  std::vector<Fig2Row> rows;
  for (int m : antennas) {
    for (std::size_t k = 0; k < snrs.size(); ++k) {
      const McOptions mc{cfg.trials, detail::row_seed(cfg.seed, 2, m, k), cfg.threads};
      try {
        rows.push_back({m, snrs[k], necessary_symbol_rate(SnrSpec::from_db(snrs[k]), m, m, cfg.rate_tol, mc)});
      } catch (const PreconditionError& e) {
        std::ostringstream msg;
        msg << "fig2 at M=N=" << m << ", " << snrs[k] << " dB: " << e.what();
        throw PreconditionError(msg.str());
      }
    }
  }
  return rows;
}

inline void write_fig2_csv(std::ostream& os, const std::vector<Fig2Row>& rows) {
  using text::format_double;
  os << "M,N,snr_db,capacity,capacity_std_error,capacity_trials,necessary_rate\n";
  for (const auto& r : rows) {
    os << r.num_antennas << ',' << r.num_antennas << ',' << format_double(r.snr_db) << ','
       << format_double(r.result.capacity.value) << ',' << format_double(r.result.capacity.std_error) << ','
       << r.result.capacity.trials << ',' << format_double(r.result.rate) << '\n';
  }
}

inline void write_fig1_gnuplot(std::ostream& os, const std::string& csv_path) {
  os << "set datafile separator ','\n"
        "set key autotitle columnhead top left\n"
        "set xlabel 'M = N'\n"
        "set ylabel 'bits per channel use'\n"
        "set grid\n"
        "plot '"
     << csv_path
     << "' using 1:5 with linespoints title 'SSDD upper bound', \\\n"
        "     '' using 1:8 with linespoints title 'COD MMI', \\\n"
        "     '' using 1:11:12 with yerrorlines title 'capacity'\n";
}

inline void write_fig2_gnuplot(std::ostream& os, const std::string& csv_path) {
  os << "set datafile separator ','\n"
        "set key autotitle columnhead top left\n"
        "set xlabel 'M = N'\n"
        "set ylabel 'necessary symbol rate'\n"
        "set grid\n"
        "plot for [db in '10 20 30'] '"
     << csv_path << "' using 1:($3 == db+0 ? $7 : 1/0) with linespoints title db.' dB'\n";
}

// ---------------------------------------------------------------------------
// verification suite

struct VerificationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

inline std::ostream& operator<<(std::ostream& os, const VerificationReport& report) {
  for (const auto& c : report.checks) {
    os << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  " << c.detail << '\n';
  }
  return os;
}

struct VerifyOptions {
  double algebraic_tol = 1e-9;  // classify
  double numeric_tol = 1e-9;    // floating-point identities
  int lemma_vectors = 100;
  int gram_realizations = 1000;
  std::uint64_t expectation_trials = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

inline VerificationReport verify_codes(const std::vector<DispersionSet>& codes, const VerifyOptions& opt = {}) {
  VerificationReport report;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) {
    report.checks.push_back({name, ok, detail});
  };
  std::uint64_t code_index = 0;
  for (const auto& code : codes) {
    const std::string tag = code.name().empty() ? "code#" + std::to_string(code_index) : code.name();
    const std::uint64_t base = derive_seed(opt.seed, code_index++);

    {
      const CodeClassReport c = classify(code, opt.algebraic_tol);
      std::ostringstream d;
      d << "ssdd=" << c.is_ssdd << " clpod=" << c.is_clpod << " cod=" << c.is_cod
        << " ssdd_residual=" << c.max_ssdd_residual << " clpod_residual=" << c.max_clpod_residual;
      add(tag + ": classify", c.is_ssdd && c.is_clpod && c.is_cod, d.str());
    }
    {
      Engine gen = make_engine({base, 0});
      std::normal_distribution<double> normal;
      LemmaResidual worst;
      for (int k = 0; k < opt.lemma_vectors; ++k) {
        Eigen::VectorXd x(code.num_tx()), y(code.num_tx());
        for (auto& v : x) v = normal(gen);
        for (auto& v : y) v = normal(gen);
        const LemmaResidual r = lemma_residual(code, x, y);
        worst.real_form = std::max(worst.real_form, r.real_form);
        worst.imag_form = std::max(worst.imag_form, r.imag_form);
      }
      std::ostringstream d;
      d << "max |x'Re(Aq^H Ar)x|=" << worst.real_form << " max |x'(Im-Im')y|=" << worst.imag_form;
      add(tag + ": lemma quadratic forms", worst.real_form < opt.numeric_tol && worst.imag_form < opt.numeric_tol,
          d.str());
    }
    {
      double worst = 0.0;
      for (int k = 0; k < opt.gram_realizations; ++k) {
        const int n_rx = 1 + k % 3;
        const ChannelRealization h = sample_channel(code.num_tx(), n_rx, RngSpec{base, 1 + static_cast<std::uint64_t>(k)});
        worst = std::max(worst, relative_off_diagonal(gram(build_equivalent(code, h))));
      }
      std::ostringstream d;
      d << "max off-diagonal / max diagonal over " << opt.gram_realizations << " channels = " << worst;
      add(tag + ": per-realization Gram diagonality", worst < opt.numeric_tol, d.str());
    }
    {
      const GramMoments g = gram_expectation(code, 1, {opt.expectation_trials, derive_seed(base, 7), opt.threads});
      const Eigen::VectorXd da = power_diagonal(code).entries;
      const Eigen::MatrixXd expected = da.asDiagonal();
      const double floor = 1e-12 * da.cwiseAbs().maxCoeff();
      double worst_sigma = 0.0;
      bool ok = true;
      for (Eigen::Index i = 0; i < expected.rows(); ++i) {
        for (Eigen::Index j = 0; j < expected.cols(); ++j) {
          const double dev = std::abs(g.mean(i, j) - expected(i, j));
          const double allowed = 3.0 * g.std_error(i, j) + floor;
          ok = ok && dev <= allowed;
          if (g.std_error(i, j) > 0.0) worst_sigma = std::max(worst_sigma, dev / g.std_error(i, j));
        }
      }
      std::ostringstream d;
      d << "worst deviation " << worst_sigma << " std errors over " << g.trials << " draws";
      add(tag + ": E[G'G] = D_A", ok, d.str());
    }
  }
  return report;
}

inline VerificationReport verify_builtin(const VerifyOptions& opt = {}) { return verify_codes(builtin_codes(), opt); }

}  // namespace stbc
