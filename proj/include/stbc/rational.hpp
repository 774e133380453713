#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "stbc/error.hpp"

namespace stbc {

/// Reduced fraction with positive denominator. Used for symbol rates Q/T.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  constexpr double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr bool operator==(const Rational&, const Rational&) = default;

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "p/q" or an integer "p".
  static Rational parse(std::string_view text) {
    auto to_int = [&](std::string_view s) -> std::int64_t {
      if (s.empty()) throw ParseError("empty rational component in '" + std::string(text) + "'");
      std::size_t pos = 0;
      std::int64_t v = 0;
      try {
        v = std::stoll(std::string(s), &pos);
      } catch (const std::exception&) {
        throw ParseError("not a rational number: '" + std::string(text) + "'");
      }
      if (pos != s.size()) throw ParseError("not a rational number: '" + std::string(text) + "'");
      return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(to_int(text), 1);
    const std::int64_t d = to_int(text.substr(slash + 1));
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(to_int(text.substr(0, slash)), d);
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace stbc
