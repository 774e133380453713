#pragma once

// Linear dispersion codes: S = sum_q u_q A_q over 2Q real symbols, with the
// single-symbol-decodability (SSDD), orthogonality (CLPOD) and complex
// orthogonal design (COD) predicates and the built-in reference codes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stbc/error.hpp"
#include "stbc/text_format.hpp"

namespace stbc {

using cdouble = std::complex<double>;

/// 2Q complex T x M dispersion matrices. Real symbol u_{2k-1} is Re(c_k) and
/// u_{2k} is Im(c_k) (1-based), so matrices 2k and 2k+1 (0-based) belong to
/// complex symbol k.
class DispersionSet {
 public:
  DispersionSet(int num_tx, int block_length, int num_symbols, std::vector<Eigen::MatrixXcd> matrices,
                std::string name = {})
      : num_tx_(num_tx),
        block_length_(block_length),
        num_symbols_(num_symbols),
        matrices_(std::move(matrices)),
        name_(std::move(name)) {
    if (num_tx_ < 1 || block_length_ < 1 || num_symbols_ < 1) {
      throw std::invalid_argument("DispersionSet: M, T and Q must be positive");
    }
    if (matrices_.size() != static_cast<std::size_t>(2 * num_symbols_)) {
      throw DimensionError("DispersionSet: expected " + std::to_string(2 * num_symbols_) +
                           " dispersion matrices, got " + std::to_string(matrices_.size()));
    }
    for (const auto& a : matrices_) {
      if (a.rows() != block_length_ || a.cols() != num_tx_) {
        throw DimensionError("DispersionSet: every dispersion matrix must be T x M = " +
                             std::to_string(block_length_) + " x " + std::to_string(num_tx_));
      }
    }
  }

  int num_tx() const { return num_tx_; }
  int block_length() const { return block_length_; }
  int num_symbols() const { return num_symbols_; }
  int num_real_symbols() const { return 2 * num_symbols_; }
  const std::string& name() const { return name_; }

  const std::vector<Eigen::MatrixXcd>& matrices() const { return matrices_; }
  const Eigen::MatrixXcd& matrix(int q) const { return matrices_.at(static_cast<std::size_t>(q)); }

 private:
  int num_tx_;
  int block_length_;
  int num_symbols_;
  std::vector<Eigen::MatrixXcd> matrices_;
  std::string name_;
};

/// The 2Q real information symbols.
struct SymbolVector {
  Eigen::VectorXd entries;
};

/// diag(tr(A_q^H A_q)).
struct PowerDiagonal {
  Eigen::VectorXd entries;
};

struct CodeClassReport {
  bool is_ssdd = false;
  bool is_clpod = false;
  bool is_cod = false;
  double max_ssdd_residual = 0.0;
  double max_clpod_residual = 0.0;
};

/// Diagonal input covariance Gamma_u.
struct InputCovariance {
  Eigen::VectorXd diagonal;

  Eigen::MatrixXd matrix() const { return diagonal.asDiagonal(); }
};

enum class CovarianceMode { paper_bound };

inline Eigen::MatrixXcd encode(const DispersionSet& set, const SymbolVector& u) {
  if (u.entries.size() != set.num_real_symbols()) {
    throw DimensionError("encode: symbol vector has " + std::to_string(u.entries.size()) +
                         " entries, code expects " + std::to_string(set.num_real_symbols()));
  }
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(set.block_length(), set.num_tx());
  for (int q = 0; q < set.num_real_symbols(); ++q) {
    s += u.entries(q) * set.matrix(q);
  }
  return s;
}

namespace detail {

inline bool near_cod_alphabet(cdouble z, double tol) {
  static constexpr std::array<cdouble, 5> alphabet{cdouble{0, 0}, cdouble{1, 0}, cdouble{-1, 0},
                                                   cdouble{0, 1}, cdouble{0, -1}};
  return std::any_of(alphabet.begin(), alphabet.end(), [&](cdouble a) { return std::abs(z - a) <= tol; });
}

/// Entry positions where either matrix of complex symbol k is nonzero.
inline Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> pair_support(const DispersionSet& set, int k,
                                                                      double tol) {
  const auto& a = set.matrix(2 * k);
  const auto& b = set.matrix(2 * k + 1);
  return (a.array().abs() > tol) || (b.array().abs() > tol);
}

}  // namespace detail

/// SSDD: ||A_q^H A_r + A_r^H A_q||_F <= tol for all q != r.
/// CLPOD: SSDD and ||A_q^H A_q - I||_F <= tol.
/// COD: CLPOD, entries within tol of {0, +-1, +-i}, and the supports of the
/// complex-symbol pairs {A_{2k}, A_{2k+1}} are pairwise disjoint.
inline CodeClassReport classify(const DispersionSet& set, double tol = 1e-9) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify: tol must be positive");
  const int n = set.num_real_symbols();
  const int m = set.num_tx();
  CodeClassReport report;

  for (int q = 0; q < n; ++q) {
    const auto& aq = set.matrix(q);
    for (int r = q + 1; r < n; ++r) {
      const auto& ar = set.matrix(r);
      const Eigen::MatrixXcd sym = aq.adjoint() * ar + ar.adjoint() * aq;
      report.max_ssdd_residual = std::max(report.max_ssdd_residual, sym.norm());
    }
    const Eigen::MatrixXcd self = aq.adjoint() * aq - Eigen::MatrixXcd::Identity(m, m);
    report.max_clpod_residual = std::max(report.max_clpod_residual, self.norm());
  }
  report.is_ssdd = report.max_ssdd_residual <= tol;
  report.is_clpod = report.is_ssdd && report.max_clpod_residual <= tol;

  bool alphabet_ok = true;
  for (const auto& a : set.matrices()) {
    for (Eigen::Index i = 0; i < a.size() && alphabet_ok; ++i) {
      alphabet_ok = detail::near_cod_alphabet(a.data()[i], tol);
    }
  }
  bool disjoint = true;
  for (int k = 0; k < set.num_symbols() && disjoint; ++k) {
    const auto sk = detail::pair_support(set, k, tol);
    for (int l = k + 1; l < set.num_symbols() && disjoint; ++l) {
      disjoint = !(sk && detail::pair_support(set, l, tol)).any();
    }
  }
  report.is_cod = report.is_clpod && alphabet_ok && disjoint;
  return report;
}

inline PowerDiagonal power_diagonal(const DispersionSet& set) {
  PowerDiagonal d{Eigen::VectorXd(set.num_real_symbols())};
  for (int q = 0; q < set.num_real_symbols(); ++q) {
    d.entries(q) = set.matrix(q).squaredNorm();
  }
  return d;
}

/// Gamma_u = (TM/2Q) D_A^{-1}, the diagonal choice with D_A Gamma_u = (TM/2Q) I,
/// which meets tr(D_A Gamma_u) <= TM with equality.
inline InputCovariance maximizing_input_covariance(const DispersionSet& set,
                                                   CovarianceMode /*mode*/ = CovarianceMode::paper_bound) {
  const PowerDiagonal d = power_diagonal(set);
  if ((d.entries.array() <= 0.0).any()) {
    throw PreconditionError("maximizing_input_covariance: D_A is singular (a dispersion matrix is zero)");
  }
  const double level = static_cast<double>(set.block_length()) * set.num_tx() / set.num_real_symbols();
  return InputCovariance{(level / d.entries.array()).matrix()};
}

/// Largest violations of the two quadratic-form identities that hold for any
/// SSDD and real x, y:  x^t Re(A_q^H A_r) x = 0 (q != r) and
/// x^t (Im(A_q^H A_r) - Im(A_q^H A_r)^t) y = 0 (all q, r).
struct LemmaResidual {
  double real_form = 0.0;
  double imag_form = 0.0;
};

inline LemmaResidual lemma_residual(const DispersionSet& set, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != set.num_tx() || y.size() != set.num_tx()) {
    throw DimensionError("lemma_residual: test vectors must have length M");
  }
  LemmaResidual res;
  const int n = set.num_real_symbols();
  for (int q = 0; q < n; ++q) {
    for (int r = 0; r < n; ++r) {
      const Eigen::MatrixXcd p = set.matrix(q).adjoint() * set.matrix(r);
      if (q != r) {
        const double v = x.dot(p.real() * x);
        res.real_form = std::max(res.real_form, std::abs(v));
      }
      const Eigen::MatrixXd im = p.imag();
      const double w = x.dot((im - im.transpose()) * y);
      res.imag_form = std::max(res.imag_form, std::abs(w));
    }
  }
  return res;
}

namespace detail {

/// One cell of a complex orthogonal design layout: sign * c_symbol or
/// sign * conj(c_symbol); symbol 0 marks an empty cell. Symbols are 1-based.
struct DesignCell {
  int symbol;
  int sign;
  bool conjugate;
};

template <std::size_t Rows, std::size_t Cols>
DispersionSet from_design(const std::array<std::array<DesignCell, Cols>, Rows>& layout, int num_symbols,
                          std::string name) {
  const auto t = static_cast<Eigen::Index>(Rows);
  const auto m = static_cast<Eigen::Index>(Cols);
  std::vector<Eigen::MatrixXcd> mats(2 * static_cast<std::size_t>(num_symbols), Eigen::MatrixXcd::Zero(t, m));
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const DesignCell& cell = layout[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (cell.symbol == 0) continue;
      const auto k = static_cast<std::size_t>(cell.symbol - 1);
      const double s = cell.sign;
      mats[2 * k](i, j) = cdouble{s, 0.0};
      mats[2 * k + 1](i, j) = cdouble{0.0, cell.conjugate ? -s : s};
    }
  }
  return DispersionSet(static_cast<int>(m), static_cast<int>(t), num_symbols, std::move(mats), std::move(name));
}

inline constexpr DesignCell kZero{0, 1, false};
inline constexpr DesignCell pos(int k) { return {k, +1, false}; }
inline constexpr DesignCell neg(int k) { return {k, -1, false}; }
inline constexpr DesignCell pos_conj(int k) { return {k, +1, true}; }
inline constexpr DesignCell neg_conj(int k) { return {k, -1, true}; }

// Rate-3/4 design for four antennas, T = 4, Q = 3.
inline constexpr std::array<std::array<DesignCell, 4>, 4> kRate34Layout{{
    {pos(1), pos(2), pos(3), kZero},
    {neg_conj(2), pos_conj(1), kZero, pos(3)},
    {neg_conj(3), kZero, pos_conj(1), neg(2)},
    {kZero, neg_conj(3), pos_conj(2), pos(1)},
}};

}  // namespace detail

/// Alamouti: S = [[c1, c2], [-c2*, c1*]]; M = T = Q = 2.
inline DispersionSet alamouti() {
  using namespace detail;
  const std::array<std::array<DesignCell, 2>, 2> layout{{
      {pos(1), pos(2)},
      {neg_conj(2), pos_conj(1)},
  }};
  return from_design(layout, 2, "alamouti");
}

/// Rate-3/4 COD for three antennas: the first three columns of cod_g4().
inline DispersionSet cod_g3() {
  using namespace detail;
  std::array<std::array<DesignCell, 3>, 4> layout{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) layout[i][j] = kRate34Layout[i][j];
  }
  return from_design(layout, 3, "cod-g3");
}

/// Rate-3/4 COD for four antennas; M = T = 4, Q = 3.
inline DispersionSet cod_g4() { return detail::from_design(detail::kRate34Layout, 3, "cod-g4"); }

inline std::vector<std::string> builtin_code_names() { return {"alamouti", "cod-g3", "cod-g4"}; }

inline DispersionSet builtin_code(std::string_view name) {
  if (name == "alamouti") return alamouti();
  if (name == "cod-g3") return cod_g3();
  if (name == "cod-g4") return cod_g4();
  throw std::invalid_argument("unknown built-in code '" + std::string(name) +
                              "' (expected alamouti, cod-g3 or cod-g4)");
}

inline std::vector<DispersionSet> builtin_codes() { return {alamouti(), cod_g3(), cod_g4()}; }

/// Header "M T Q", then 2Q blocks of T lines with M "re+imj" entries each.
inline void write_dispersion_set(std::ostream& os, const DispersionSet& set) {
  os << set.num_tx() << ' ' << set.block_length() << ' ' << set.num_symbols() << '\n';
  for (const auto& a : set.matrices()) text::write_matrix(os, a);
}

inline std::string to_text(const DispersionSet& set) {
  std::ostringstream os;
  write_dispersion_set(os, set);
  return os.str();
}

inline DispersionSet read_dispersion_set(std::istream& is, std::string name = {}) {
  std::string line;
  if (!text::next_content_line(is, line)) throw ParseError("dispersion set: missing 'M T Q' header");
  std::istringstream hs(line);
  int m = 0, t = 0, q = 0;
  std::string extra;
  if (!(hs >> m >> t >> q) || (hs >> extra)) throw ParseError("dispersion set: bad header '" + line + "'");
  if (m < 1 || t < 1 || q < 1) throw ParseError("dispersion set: M, T, Q must be positive");
  std::vector<Eigen::MatrixXcd> mats;
  mats.reserve(2 * static_cast<std::size_t>(q));
  for (int k = 0; k < 2 * q; ++k) mats.push_back(text::read_matrix(is, t, m));
  if (text::next_content_line(is, line)) throw ParseError("dispersion set: trailing content '" + line + "'");
  return DispersionSet(m, t, q, std::move(mats), std::move(name));
}

inline DispersionSet from_text(std::string_view text, std::string name = {}) {
  std::istringstream is{std::string(text)};
  return read_dispersion_set(is, std::move(name));
}

}  // namespace stbc
