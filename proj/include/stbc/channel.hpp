#pragma once

// Quasi-static Rayleigh fading: R = sqrt(rho/M) S H + V, and the equivalent
// real model r = sqrt(rho/M) G u + w for a linear dispersion code.

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stbc/dispersion.hpp"
#include "stbc/error.hpp"
#include "stbc/parallel.hpp"
#include "stbc/rng.hpp"
#include "stbc/text_format.hpp"

namespace stbc {

/// SNR at each receive antenna, linear scale.
class SnrSpec {
 public:
  explicit SnrSpec(double rho_linear) : rho_(rho_linear) {
    if (!(rho_linear > 0.0) || !std::isfinite(rho_linear)) {
      throw std::invalid_argument("SNR must be a positive finite linear value");
    }
  }

  static SnrSpec from_db(double db) { return SnrSpec(std::pow(10.0, db / 10.0)); }

  double linear() const { return rho_; }
  double db() const { return 10.0 * std::log10(rho_); }

 private:
  double rho_;
};

/// M x N fading matrix, entry (m, n) couples transmit antenna m to receive antenna n.
struct ChannelRealization {
  Eigen::MatrixXcd gains;

  int num_tx() const { return static_cast<int>(gains.rows()); }
  int num_rx() const { return static_cast<int>(gains.cols()); }
};

/// T x N received signals.
struct ReceivedBlock {
  Eigen::MatrixXcd signals;
};

struct EquivalentChannel {
  Eigen::MatrixXd matrix;  // 2TN x 2Q
  std::string code_name;
  ChannelRealization channel;
};

template <class Urbg>
ChannelRealization sample_channel(int num_tx, int num_rx, Urbg& gen) {
  if (num_tx < 1 || num_rx < 1) throw std::invalid_argument("sample_channel: M and N must be positive");
  ComplexGaussian draw;
  ChannelRealization h{Eigen::MatrixXcd(num_tx, num_rx)};
  // column-major fill: receive antenna n, then transmit antenna m
  for (Eigen::Index i = 0; i < h.gains.size(); ++i) h.gains.data()[i] = draw(gen);
  return h;
}

inline ChannelRealization sample_channel(int num_tx, int num_rx, RngSpec spec) {
  Engine gen = make_engine(spec);
  return sample_channel(num_tx, num_rx, gen);
}

inline ReceivedBlock transmit_noiseless(const Eigen::MatrixXcd& codeword, const ChannelRealization& h, SnrSpec rho) {
  if (codeword.cols() != h.gains.rows()) {
    throw DimensionError("transmit: codeword has " + std::to_string(codeword.cols()) +
                         " columns but the channel has " + std::to_string(h.gains.rows()) + " transmit antennas");
  }
  const double scale = std::sqrt(rho.linear() / static_cast<double>(h.num_tx()));
  return ReceivedBlock{scale * (codeword * h.gains)};
}

template <class Urbg>
ReceivedBlock transmit(const Eigen::MatrixXcd& codeword, const ChannelRealization& h, SnrSpec rho, Urbg& gen) {
  ReceivedBlock r = transmit_noiseless(codeword, h, rho);
  ComplexGaussian draw;
  for (Eigen::Index i = 0; i < r.signals.size(); ++i) r.signals.data()[i] += draw(gen);
  return r;
}

/// [[Re A, -Im A], [Im A, Re A]].
inline Eigen::MatrixXd real_expand(const Eigen::MatrixXcd& a) {
  const Eigen::Index t = a.rows();
  const Eigen::Index m = a.cols();
  Eigen::MatrixXd b(2 * t, 2 * m);
  b.topLeftCorner(t, m) = a.real();
  b.topRightCorner(t, m) = -a.imag();
  b.bottomLeftCorner(t, m) = a.imag();
  b.bottomRightCorner(t, m) = a.real();
  return b;
}

/// Stacks each column n as [Re x_n; Im x_n], columns in increasing order.
inline Eigen::VectorXd stack_real(const Eigen::MatrixXcd& x) {
  const Eigen::Index rows = x.rows();
  Eigen::VectorXd v(2 * x.size());
  for (Eigen::Index n = 0; n < x.cols(); ++n) {
    v.segment(2 * rows * n, rows) = x.col(n).real();
    v.segment(2 * rows * n + rows, rows) = x.col(n).imag();
  }
  return v;
}

/// G with row block n, column q equal to B_q g_n, g_n = [Re h_n; Im h_n].
/// B_q g_n is the real stacking of A_q h_n, which is what is computed.
inline Eigen::MatrixXd equivalent_matrix(const DispersionSet& set, const ChannelRealization& h) {
  if (h.num_tx() != set.num_tx()) {
    throw DimensionError("build_equivalent: channel has " + std::to_string(h.num_tx()) +
                         " transmit antennas, code expects " + std::to_string(set.num_tx()));
  }
  const Eigen::Index t = set.block_length();
  const int n_rx = h.num_rx();
  Eigen::MatrixXd g(2 * t * n_rx, set.num_real_symbols());
  for (int q = 0; q < set.num_real_symbols(); ++q) {
    const Eigen::MatrixXcd ah = set.matrix(q) * h.gains;  // T x N
    g.col(q) = stack_real(ah);
  }
  return g;
}

inline EquivalentChannel build_equivalent(const DispersionSet& set, const ChannelRealization& h) {
  return EquivalentChannel{equivalent_matrix(set, h), set.name(), h};
}

inline Eigen::MatrixXd gram(const EquivalentChannel& g) { return g.matrix.transpose() * g.matrix; }

/// Diagonal of G^t G from the quadratic forms
/// sum_n h_{R,n}^t Re(A_q^H A_q) h_{R,n} + h_{I,n}^t Re(A_q^H A_q) h_{I,n}.
inline Eigen::VectorXd gram_diagonal_formula(const DispersionSet& set, const ChannelRealization& h) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(set.num_real_symbols());
  for (int q = 0; q < set.num_real_symbols(); ++q) {
    const Eigen::MatrixXd k = (set.matrix(q).adjoint() * set.matrix(q)).real();
    for (int n = 0; n < h.num_rx(); ++n) {
      const Eigen::VectorXd hr = h.gains.col(n).real();
      const Eigen::VectorXd hi = h.gains.col(n).imag();
      d(q) += hr.dot(k * hr) + hi.dot(k * hi);
    }
  }
  return d;
}

/// Largest |off-diagonal| of a square matrix relative to its largest diagonal entry.
inline double relative_off_diagonal(const Eigen::MatrixXd& a) {
  double off = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) off = std::max(off, std::abs(a(i, j)));
    }
  }
  const double diag = a.diagonal().cwiseAbs().maxCoeff();
  if (diag == 0.0) return off == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return off / diag;
}

struct GramMoments {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd std_error;
  std::uint64_t trials = 0;
};

/// Entrywise sample mean and standard error of G^t G over iid channel draws.
/// For any code the mean converges to N * D_A off the SSDD cross terms.
inline GramMoments gram_expectation(const DispersionSet& set, int num_rx, const McOptions& mc) {
  if (mc.trials < 1) throw std::invalid_argument("gram_expectation: trials must be >= 1");
  const int dim = set.num_real_symbols();
  const auto samples = evaluate_trials<Eigen::MatrixXd>(mc.trials, mc.threads, [&](std::uint64_t t) {
    Engine gen = make_engine({mc.seed, t});
    const ChannelRealization h = sample_channel(set.num_tx(), num_rx, gen);
    const Eigen::MatrixXd g = equivalent_matrix(set, h);
    return Eigen::MatrixXd(g.transpose() * g);
  });
  GramMoments out{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim), mc.trials};
  for (const auto& s : samples) out.mean += s;
  const double n = static_cast<double>(mc.trials);
  out.mean /= n;
  if (mc.trials > 1) {
    for (const auto& s : samples) out.std_error.array() += (s - out.mean).array().square();
    out.std_error = (out.std_error.array() / ((n - 1.0) * n)).sqrt().matrix();
  }
  return out;
}

/// Header "M N", then M lines of N "re+imj" entries.
inline void write_channel(std::ostream& os, const ChannelRealization& h) {
  os << h.num_tx() << ' ' << h.num_rx() << '\n';
  text::write_matrix(os, h.gains);
}

inline ChannelRealization read_channel(std::istream& is) {
  std::string line;
  if (!text::next_content_line(is, line)) throw ParseError("channel: missing 'M N' header");
  std::istringstream hs(line);
  int m = 0, n = 0;
  if (!(hs >> m >> n) || m < 1 || n < 1) throw ParseError("channel: bad header '" + line + "'");
  return ChannelRealization{text::read_matrix(is, m, n)};
}

}  // namespace stbc
