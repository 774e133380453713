// stbc: reproduce the parameter table and the bound / necessary-rate data sets,
// verify the built-in codes, and evaluate single points.
//
// Exit codes: 0 success, 1 verification or precondition failure, 2 bad arguments.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stbc/stbc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Trial counts may be written in scientific notation ("1e6").
std::uint64_t parse_count(const std::string& text, const char* what) {
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(text, &pos);
    if (pos != text.size()) throw UsageError("");
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + ": not a number: '" + text + "'");
  }
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) {
    throw UsageError(std::string(what) + " must be a positive integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

stbc::ClpodNormalization parse_normalization(const std::string& text) {
  if (text == "paper") return stbc::ClpodNormalization::paper;
  if (text == "power-consistent") return stbc::ClpodNormalization::power_consistent;
  throw UsageError("--normalization must be 'paper' or 'power-consistent'");
}

/// Writes to --out when given, otherwise to stdout.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
  write(os);
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

struct CommonFlags {
  std::vector<double> snr_db;
  std::vector<int> antennas;
  std::string trials = "1e5";
  std::uint64_t seed = 1;
  int nodes = 128;
  std::string normalization = "paper";
  std::string out;
  std::string gnuplot;
  unsigned threads = 0;
  double tol = 1e-6;
};

void add_experiment_flags(CLI::App* cmd, CommonFlags& f, bool with_quadrature) {
  cmd->add_option("--snr-db", f.snr_db, "SNR values in dB (comma separated)")->delimiter(',');
  cmd->add_option("--antennas", f.antennas, "antenna counts M = N (comma separated)")->delimiter(',');
  cmd->add_option("--trials", f.trials, "Monte Carlo trials per capacity estimate");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_option("--out", f.out, "output CSV path (default stdout)");
  cmd->add_option("--gnuplot", f.gnuplot, "also write a gnuplot script for the CSV");
  if (with_quadrature) {
    cmd->add_option("--nodes", f.nodes, "quadrature nodes");
    cmd->add_option("--normalization", f.normalization, "CLPOD power normalization: paper | power-consistent");
  } else {
    cmd->add_option("--tol", f.tol, "bisection tolerance in bits");
  }
}

stbc::ExperimentConfig make_config(const CommonFlags& f, stbc::ExperimentConfig cfg) {
  if (!f.snr_db.empty()) cfg.snr_db_list = f.snr_db;
  if (!f.antennas.empty()) cfg.antenna_range = f.antennas;
  cfg.trials = parse_count(f.trials, "--trials");
  cfg.seed = f.seed;
  cfg.quadrature_nodes = f.nodes;
  cfg.normalization_mode = parse_normalization(f.normalization);
  cfg.threads = f.threads;
  cfg.rate_tol = f.tol;
  cfg.output_path = f.out;
  if (!(cfg.rate_tol > 0.0)) throw UsageError("--tol must be positive");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void write_gnuplot(const CommonFlags& f, bool fig1) {
  if (f.gnuplot.empty()) return;
  const std::string csv = f.out.empty() ? std::string("fig.csv") : f.out;
  emit(f.gnuplot, [&](std::ostream& os) {
    if (fig1) stbc::write_fig1_gnuplot(os, csv);
    else stbc::write_fig2_gnuplot(os, csv);
  });
}

double single_snr(const std::vector<double>& list) {
  if (list.size() != 1) throw UsageError("--snr-db takes exactly one value for this command");
  return list.front();
}

void print_estimate(const char* label, const stbc::EstimateWithError& e) {
  std::cout << label << " = " << stbc::text::format_double(e.value) << " +/- "
            << stbc::text::format_double(e.std_error) << " bits/channel-use (" << stbc::to_string(e.method)
            << ", trials=" << e.trials << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolwise-decodable space-time block codes: bounds, exact MMI and capacity"};
  app.require_subcommand(1);

  auto* table1_cmd = app.add_subcommand("table1", "delay-optimal COD parameters (CSV)");
  std::string table1_out;
  table1_cmd->add_option("--out", table1_out, "output CSV path (default stdout)");

  CommonFlags fig1_flags;
  auto* fig1_cmd = app.add_subcommand("fig1", "SSDD upper bound vs COD MMI vs capacity (CSV)");
  add_experiment_flags(fig1_cmd, fig1_flags, true);

  CommonFlags fig2_flags;
  auto* fig2_cmd = app.add_subcommand("fig2", "necessary SSDD symbol rate to reach capacity (CSV)");
  add_experiment_flags(fig2_cmd, fig2_flags, false);

  auto* verify_cmd = app.add_subcommand("verify", "check code classes, Lemma and Gram identities");
  double verify_tol = 1e-9;
  std::string verify_trials = "1e5";
  std::uint64_t verify_seed = 1;
  unsigned verify_threads = 0;
  std::vector<std::string> verify_files;
  verify_cmd->add_option("--tol", verify_tol, "algebraic tolerance for classify");
  verify_cmd->add_option("--trials", verify_trials, "channel draws for the E[G'G] check");
  verify_cmd->add_option("--seed", verify_seed, "master seed");
  verify_cmd->add_option("--threads", verify_threads, "worker threads (0 = all cores)");
  verify_cmd->add_option("--code", verify_files, "dispersion-set file(s) to verify instead of the built-ins");

  auto* bound_cmd = app.add_subcommand("bound", "closed-form SSDD upper bound");
  std::vector<double> bound_snr;
  int bound_n = 1;
  std::string bound_rate = "1";
  bound_cmd->add_option("--snr-db", bound_snr, "SNR in dB")->required();
  bound_cmd->add_option("--n", bound_n, "receive antennas");
  bound_cmd->add_option("--rate", bound_rate, "symbol rate Q/T, e.g. 1, 3/4, 10/15");

  auto* capacity_cmd = app.add_subcommand("capacity", "Monte Carlo ergodic MIMO capacity");
  std::vector<double> cap_snr;
  int cap_m = 1;
  int cap_n = 1;
  std::string cap_trials = "1e5";
  std::uint64_t cap_seed = 1;
  unsigned cap_threads = 0;
  capacity_cmd->add_option("--snr-db", cap_snr, "SNR in dB")->required();
  capacity_cmd->add_option("--m", cap_m, "transmit antennas");
  capacity_cmd->add_option("--n", cap_n, "receive antennas");
  capacity_cmd->add_option("--trials", cap_trials, "Monte Carlo trials");
  capacity_cmd->add_option("--seed", cap_seed, "master seed");
  capacity_cmd->add_option("--threads", cap_threads, "worker threads (0 = all cores)");

  auto* code_cmd = app.add_subcommand("code", "print a built-in dispersion set in text form");
  std::string code_name;
  code_cmd->add_option("name", code_name, "alamouti | cod-g3 | cod-g4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*table1_cmd) {
      emit(table1_out, [](std::ostream& os) { stbc::write_table1_csv(os, stbc::table1()); });
    } else if (*fig1_cmd) {
      const auto cfg = make_config(fig1_flags, stbc::fig1_defaults());
      std::vector<stbc::Fig1Row> rows;
      try {
        rows = stbc::fig1(cfg);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      emit(cfg.output_path, [&](std::ostream& os) { stbc::write_fig1_csv(os, rows); });
      write_gnuplot(fig1_flags, true);
    } else if (*fig2_cmd) {
      const auto cfg = make_config(fig2_flags, stbc::fig2_defaults());
      const auto rows = stbc::fig2(cfg);
      emit(cfg.output_path, [&](std::ostream& os) { stbc::write_fig2_csv(os, rows); });
      write_gnuplot(fig2_flags, false);
    } else if (*verify_cmd) {
      if (!(verify_tol > 0.0)) throw UsageError("--tol must be positive");
      stbc::VerifyOptions opt;
      opt.algebraic_tol = verify_tol;
      opt.expectation_trials = parse_count(verify_trials, "--trials");
      opt.seed = verify_seed;
      opt.threads = verify_threads;
      std::vector<stbc::DispersionSet> codes;
      if (verify_files.empty()) {
        codes = stbc::builtin_codes();
      } else {
        for (const auto& path : verify_files) {
          std::ifstream is(path);
          if (!is) throw UsageError("cannot open code file '" + path + "'");
          try {
            codes.push_back(stbc::read_dispersion_set(is, path));
          } catch (const stbc::ParseError& e) {
            throw UsageError(path + ": " + e.what());
          } catch (const std::invalid_argument& e) {
            throw UsageError(path + ": " + e.what());
          }
        }
      }
      const auto report = stbc::verify_codes(codes, opt);
      std::cout << report;
      if (!report.all_passed()) {
        std::cout << "verification FAILED\n";
        return kExitFailure;
      }
      std::cout << "all checks passed\n";
    } else if (*bound_cmd) {
      if (bound_n < 1) throw UsageError("--n must be positive");
      stbc::Rational r;
      try {
        r = stbc::Rational::parse(bound_rate);
      } catch (const stbc::ParseError& e) {
        throw UsageError(e.what());
      }
      if (r.num() < 1) throw UsageError("--rate must be positive");
      const stbc::SnrSpec rho = stbc::SnrSpec::from_db(single_snr(bound_snr));
      const stbc::RateParameters rate(static_cast<int>(r.num()), static_cast<int>(r.den()));
      print_estimate("ssdd_upper_bound", stbc::ssdd_upper_bound(rho, bound_n, rate));
    } else if (*capacity_cmd) {
      if (cap_m < 1 || cap_n < 1) throw UsageError("--m and --n must be positive");
      const stbc::SnrSpec rho = stbc::SnrSpec::from_db(single_snr(cap_snr));
      const stbc::McOptions mc{parse_count(cap_trials, "--trials"), cap_seed, cap_threads};
      print_estimate("capacity", stbc::mimo_capacity(rho, cap_m, cap_n, mc));
    } else if (*code_cmd) {
      try {
        stbc::write_dispersion_set(std::cout, stbc::builtin_code(code_name));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const stbc::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
