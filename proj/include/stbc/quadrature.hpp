#pragma once

// Gauss rules by Golub–Welsch and the Gamma expectation E[log2(1 + c X)],
// X ~ Gamma(k, 1), used for the exact CLPOD mutual information.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace stbc {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

/// Nodes are the eigenvalues of the Jacobi matrix; weights are mu0 * v_0^2.
inline GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigen-decomposition failed");
  const auto n = static_cast<std::size_t>(diag.size());
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    rule.nodes[i] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace detail

/// Gauss–Legendre on [-1, 1].
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd b(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) {
    const double kk = k;
    b(k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  return detail::golub_welsch(a, b, 2.0);
}

/// Generalized Gauss–Laguerre for the probability weight x^alpha e^{-x} / Gamma(alpha + 1)
/// on [0, inf); weights sum to one.
inline GaussRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: need at least one node");
  if (!(alpha > -1.0)) throw std::invalid_argument("gauss_laguerre: alpha must exceed -1");
  Eigen::VectorXd a(n);
  Eigen::VectorXd b(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) a(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) b(k - 1) = std::sqrt(k * (k + alpha));
  return detail::golub_welsch(a, b, 1.0);
}

enum class QuadratureRule {
  /// Gauss–Legendre in s = ln(1 + c x) over the numerically relevant Gamma support.
  log_mapped_legendre,
  /// Generalized Gauss–Laguerre against x^{k-1} e^{-x} / (k-1)!.
  gauss_laguerre,
};

/// E[log2(1 + c X)] for X ~ Gamma(shape, 1) with integer shape >= 1 and c > 0.
///
/// The log-mapped rule substitutes x = (e^s - 1)/c. That removes the branch
/// point of log(1 + c x) at x = -1/c, which sits next to the origin for large c
/// and limits plain Gauss–Laguerre to algebraic convergence.
inline double gamma_log2_1p_expectation(int shape, double c, int nodes,
                                        QuadratureRule rule = QuadratureRule::log_mapped_legendre) {
  if (shape < 1) throw std::invalid_argument("gamma expectation: shape must be >= 1");
  if (nodes < 2) throw std::invalid_argument("quadrature node count must be at least 2");
  if (!(c > 0.0)) throw std::invalid_argument("gamma expectation: coefficient must be positive");
  const double k = shape;

  if (rule == QuadratureRule::gauss_laguerre) {
    const GaussRule gl = gauss_laguerre(nodes, k - 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) sum += gl.weights[i] * std::log1p(c * gl.nodes[i]);
    return sum / std::numbers::ln2;
  }

  // Upper tail of Gamma(k) beyond k + 12 sqrt(k) + 45 is below 1e-20.
  const double x_hi = k + 12.0 * std::sqrt(k) + 45.0;
  const double s_hi = std::log1p(c * x_hi);
  const GaussRule leg = gauss_legendre(nodes);
  const double log_norm = std::lgamma(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < leg.nodes.size(); ++i) {
    const double s = 0.5 * s_hi * (leg.nodes[i] + 1.0);
    const double w = 0.5 * s_hi * leg.weights[i];
    const double x = std::expm1(s) / c;
    // density(x) * dx/ds, dx/ds = e^s / c
    const double log_term = (k - 1.0) * std::log(x) - x - log_norm + s - std::log(c);
    sum += w * s * std::exp(log_term);
  }
  return sum / std::numbers::ln2;
}

}  // namespace stbc
