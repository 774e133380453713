#pragma once

// Plain-text complex matrix format shared by dispersion sets and channel dumps.
// A complex entry is written "re+imj" (or "re-imj") with shortest round-trip
// decimals; rows are whitespace separated entries, one row per line.

#include <charconv>
#include <complex>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <Eigen/Dense>

#include "stbc/error.hpp"

namespace stbc::text {

/// Shortest decimal that parses back to exactly `v`.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_complex(std::complex<double> z) {
  std::string out = format_double(z.real());
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  if (im < 0.0) {
    out += '-';
    out += format_double(-im);
  } else {
    out += '+';
    out += format_double(im);
  }
  out += 'j';
  return out;
}

inline double parse_double(std::string_view s, std::string_view context) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("bad number '" + std::string(s) + "' in '" + std::string(context) + "'");
  }
  return v;
}

/// Parses "re+imj" / "re-imj". A bare real "re" is also accepted.
inline std::complex<double> parse_complex(std::string_view token) {
  if (token.empty()) throw ParseError("empty complex entry");
  if (token.back() != 'j' && token.back() != 'i') {
    return {parse_double(token, token), 0.0};
  }
  const std::string_view body = token.substr(0, token.size() - 1);
  // The split sign is the last '+'/'-' that is not leading and not an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    const char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) {
    // pure imaginary "imj"
    return {0.0, parse_double(body, token)};
  }
  const double re = parse_double(body.substr(0, split), token);
  std::string_view im_text = body.substr(split);
  const bool negative = im_text.front() == '-';
  im_text.remove_prefix(1);
  const double im = parse_double(im_text, token);
  return {re, negative ? -im : im};
}

inline void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << format_complex(m(r, c));
    }
    os << '\n';
  }
}

/// Next line that is not blank. Returns false at end of stream.
inline bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

inline Eigen::MatrixXcd read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXcd m(rows, cols);
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!next_content_line(is, line)) throw ParseError("unexpected end of input while reading matrix row");
    std::istringstream ls(line);
    std::string token;
    Eigen::Index c = 0;
    while (ls >> token) {
      if (c >= cols) throw ParseError("too many entries in row: '" + line + "'");
      m(r, c++) = parse_complex(token);
    }
    if (c != cols) throw ParseError("too few entries in row: '" + line + "'");
  }
  return m;
}

}  // namespace stbc::text
