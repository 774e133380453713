#pragma once

// Mutual-information quantities for symbolwise-decodable codes over Rayleigh
// fading. All results are in bits per channel use.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "stbc/channel.hpp"
#include "stbc/dispersion.hpp"
#include "stbc/error.hpp"
#include "stbc/parallel.hpp"
#include "stbc/quadrature.hpp"
#include "stbc/rational.hpp"
#include "stbc/rng.hpp"

namespace stbc {

enum class EstimateMethod { monte_carlo, quadrature, closed_form };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::monte_carlo: return "monte-carlo";
    case EstimateMethod::quadrature: return "quadrature";
    case EstimateMethod::closed_form: return "closed-form";
  }
  return "?";
}

/// A scalar result with its standard error. std_error is exactly zero for
/// deterministic methods, whose trials count is 1.
struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 1;
  EstimateMethod method = EstimateMethod::closed_form;
};

/// |a - b| <= k * sqrt(sa^2 + sb^2).
inline bool agree_within(const EstimateWithError& a, const EstimateWithError& b, double k = 3.0) {
  return std::abs(a.value - b.value) <= k * std::hypot(a.std_error, b.std_error);
}

inline double bits_to_nats(double bits) { return bits * std::numbers::ln2; }

/// Q complex symbols over T channel uses.
struct RateParameters {
  int num_symbols = 1;   // Q
  int block_length = 1;  // T

  RateParameters(int q, int t) : num_symbols(q), block_length(t) {
    if (q < 1 || t < 1) throw std::invalid_argument("RateParameters: Q and T must be positive");
  }

  Rational symbol_rate() const { return Rational(num_symbols, block_length); }
  double symbol_rate_value() const { return static_cast<double>(num_symbols) / block_length; }
};

/// How the CLPOD input power is normalized. `paper` uses the coefficient rho/Q
/// of the published closed form; `power_consistent` uses tr(Gamma_u) <= T,
/// i.e. rho T / (M Q). They coincide when T == M.
enum class ClpodNormalization { paper, power_consistent };

inline double clpod_coefficient(SnrSpec rho, int num_tx, const RateParameters& rate, ClpodNormalization mode) {
  const double q = rate.num_symbols;
  if (mode == ClpodNormalization::paper) return rho.linear() / q;
  return rho.linear() * rate.block_length / (static_cast<double>(num_tx) * q);
}

/// Jensen bound (Q/T) log2(1 + rho N T/Q). Independent of M.
inline EstimateWithError ssdd_upper_bound(SnrSpec rho, int num_rx, const RateParameters& rate) {
  if (num_rx < 1) throw std::invalid_argument("ssdd_upper_bound: N must be positive");
  const double r = rate.symbol_rate_value();
  return {r * std::log2(1.0 + rho.linear() * num_rx / r), 0.0, 1, EstimateMethod::closed_form};
}

namespace detail {

/// log2 det(I + A) for symmetric positive semi-definite A.
inline double log2_det_identity_plus(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd::Identity(n, n) + a);
  if (llt.info() != Eigen::Success) throw NumericalError("log-det: matrix is not positive definite");
  const double v = 2.0 * llt.matrixLLT().diagonal().array().log().sum() / std::numbers::ln2;
  if (!std::isfinite(v)) throw NumericalError("log-det: non-finite determinant");
  return v;
}

inline double log2_det_identity_plus(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::LLT<Eigen::MatrixXcd> llt(Eigen::MatrixXcd::Identity(n, n) + a);
  if (llt.info() != Eigen::Success) throw NumericalError("log-det: matrix is not positive definite");
  const double v = 2.0 * llt.matrixLLT().diagonal().real().array().log().sum() / std::numbers::ln2;
  if (!std::isfinite(v)) throw NumericalError("log-det: non-finite determinant");
  return v;
}

inline EstimateWithError monte_carlo_estimate(const std::vector<double>& samples) {
  const SampleMoments m = sample_moments(samples);
  return {m.mean, m.std_error, m.count, EstimateMethod::monte_carlo};
}

inline void require_trials(const McOptions& mc, const char* who) {
  if (mc.trials < 1) throw std::invalid_argument(std::string(who) + ": trials must be >= 1");
}

}  // namespace detail

/// Monte Carlo mean over H of (1/2T) log2 det(I + (2 rho/M) G^t G Gamma_u) with
/// the fixed input Gamma_u = (TM/2Q) D_A^{-1}. This is the mutual information of
/// one admissible input, so it lower-estimates the code's maximum.
inline EstimateWithError ssdd_mmi_estimate(const DispersionSet& set, SnrSpec rho, int num_rx, const McOptions& mc) {
  detail::require_trials(mc, "ssdd_mmi_estimate");
  if (num_rx < 1) throw std::invalid_argument("ssdd_mmi_estimate: N must be positive");
  const InputCovariance cov = maximizing_input_covariance(set);
  const Eigen::VectorXd root = cov.diagonal.array().sqrt();
  const double gain = 2.0 * rho.linear() / set.num_tx();
  const double per_use = 1.0 / (2.0 * set.block_length());

  const auto samples = evaluate_trials<double>(mc.trials, mc.threads, [&](std::uint64_t t) {
    Engine gen = make_engine({mc.seed, t});
    const ChannelRealization h = sample_channel(set.num_tx(), num_rx, gen);
    const Eigen::MatrixXd g = equivalent_matrix(set, h);
    // det(I + c G^tG D) = det(I + c D^{1/2} G^tG D^{1/2})
    const Eigen::MatrixXd gs = g * root.asDiagonal();
    return per_use * detail::log2_det_identity_plus(Eigen::MatrixXd(gain * (gs.transpose() * gs)));
  });
  return detail::monte_carlo_estimate(samples);
}

/// Ergodic capacity E[log2 det(I_N + (rho/M) H^H H)] with isotropic input.
inline EstimateWithError mimo_capacity(SnrSpec rho, int num_tx, int num_rx, const McOptions& mc) {
  detail::require_trials(mc, "mimo_capacity");
  if (num_tx < 1 || num_rx < 1) throw std::invalid_argument("mimo_capacity: M and N must be positive");
  const double gain = rho.linear() / num_tx;
  const auto samples = evaluate_trials<double>(mc.trials, mc.threads, [&](std::uint64_t t) {
    Engine gen = make_engine({mc.seed, t});
    const ChannelRealization h = sample_channel(num_tx, num_rx, gen);
    if (num_rx == 1) return std::log2(1.0 + gain * h.gains.squaredNorm());
    return detail::log2_det_identity_plus(Eigen::MatrixXcd(gain * (h.gains.adjoint() * h.gains)));
  });
  return detail::monte_carlo_estimate(samples);
}

struct ClpodOptions {
  EstimateMethod method = EstimateMethod::quadrature;
  int nodes = 128;
  QuadratureRule rule = QuadratureRule::log_mapped_legendre;
  ClpodNormalization normalization = ClpodNormalization::paper;
  McOptions mc{};  // used when method == monte_carlo
};

/// Exact CLPOD mutual information (Q/T) E[log2(1 + c X)], X = sum |h_mn|^2 ~ Gamma(MN, 1),
/// with c = rho/Q (paper) or rho T/(M Q) (power-consistent).
inline EstimateWithError clpod_mmi_exact(SnrSpec rho, int num_tx, int num_rx, const RateParameters& rate,
                                         const ClpodOptions& opt = {}) {
  if (num_tx < 1 || num_rx < 1) throw std::invalid_argument("clpod_mmi_exact: M and N must be positive");
  const double c = clpod_coefficient(rho, num_tx, rate, opt.normalization);
  const double r = rate.symbol_rate_value();
  const int shape = num_tx * num_rx;

  switch (opt.method) {
    case EstimateMethod::quadrature:
      return {r * gamma_log2_1p_expectation(shape, c, opt.nodes, opt.rule), 0.0, 1, EstimateMethod::quadrature};
    case EstimateMethod::monte_carlo: {
      detail::require_trials(opt.mc, "clpod_mmi_exact");
      const auto samples = evaluate_trials<double>(opt.mc.trials, opt.mc.threads, [&](std::uint64_t t) {
        Engine gen = make_engine({opt.mc.seed, t});
        std::normal_distribution<double> half{0.0, std::numbers::sqrt2 / 2.0};
        double x = 0.0;
        for (int i = 0; i < 2 * shape; ++i) {
          const double z = half(gen);
          x += z * z;
        }
        return r * std::log2(1.0 + c * x);
      });
      return detail::monte_carlo_estimate(samples);
    }
    case EstimateMethod::closed_form:
      break;
  }
  throw std::invalid_argument("clpod_mmi_exact: method must be quadrature or monte-carlo");
}

/// The CLPOD value next to (Q/T) C(MN rho/Q, MN, 1); the two are equal in theory.
inline std::pair<EstimateWithError, EstimateWithError> capacity_relation_check(SnrSpec rho, int num_tx, int num_rx,
                                                                               const RateParameters& rate,
                                                                               const ClpodOptions& clpod,
                                                                               const McOptions& capacity_mc) {
  const EstimateWithError lhs = clpod_mmi_exact(rho, num_tx, num_rx, rate, clpod);
  const int mn = num_tx * num_rx;
  const double q = rate.num_symbols;
  const double r = rate.symbol_rate_value();
  EstimateWithError rhs = mimo_capacity(SnrSpec(mn * rho.linear() / q), mn, 1, capacity_mc);
  rhs.value *= r;
  rhs.std_error *= r;
  return {lhs, rhs};
}

/// Smallest symbol rate q with q log2(1 + rho N/q) = capacity, by bisection.
/// The left side is strictly increasing in q with supremum rho N log2(e).
inline double rate_reaching(SnrSpec rho, int num_rx, double capacity, double tol = 1e-6) {
  if (!(tol > 0.0)) throw std::invalid_argument("necessary_symbol_rate: tol must be positive");
  if (num_rx < 1) throw std::invalid_argument("necessary_symbol_rate: N must be positive");
  const double a = rho.linear() * num_rx;
  const double supremum = a / std::numbers::ln2;
  if (!(capacity < supremum)) {
    std::ostringstream msg;
    msg << "necessary_symbol_rate: capacity " << capacity << " reaches the bound's supremum " << supremum
        << " (rho=" << rho.linear() << ", N=" << num_rx << "); no finite rate suffices";
    throw PreconditionError(msg.str());
  }
  auto f = [a](double q) { return q * std::log2(1.0 + a / q); };

  constexpr double kLow = 1e-6;
  constexpr double kCap = 1048576.0;  // 2^20
  double lo = kLow;
  double hi = 1.0;
  while (f(hi) < capacity) {
    if (hi >= kCap) {
      throw PreconditionError("necessary_symbol_rate: no rate up to 2^20 reaches the capacity");
    }
    lo = hi;
    hi *= 2.0;
  }
  if (f(lo) >= capacity) return lo;

  double mid = hi;
  for (int iter = 0; iter < 400; ++iter) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm - capacity) <= tol) break;
    if (fm < capacity) lo = mid;
    else hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return mid;
}

struct NecessaryRate {
  double rate = 0.0;
  EstimateWithError capacity;
};

/// Symbol rate at which the SSDD bound meets the ergodic capacity C(rho, M, N).
/// C is estimated once by Monte Carlo and held fixed during the root search.
inline NecessaryRate necessary_symbol_rate(SnrSpec rho, int num_tx, int num_rx, double tol, const McOptions& mc) {
  if (!(tol > 0.0)) throw std::invalid_argument("necessary_symbol_rate: tol must be positive");
  const EstimateWithError cap = mimo_capacity(rho, num_tx, num_rx, mc);
  try {
    return {rate_reaching(rho, num_rx, cap.value, tol), cap};
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string(e.what()) + " [M=" + std::to_string(num_tx) + "]");
  }
}

}  // namespace stbc
