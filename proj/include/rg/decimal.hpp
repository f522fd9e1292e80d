#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rg {

__extension__ typedef __int128 int128_t;

/// Signed decimal fixed-point number with 12 fractional digits.
///
/// Prices and funding rates are stored in this form so that sums of many
/// small rates (1e-6 granularity) are exact and so that uniform price
/// scaling by an integer factor never perturbs comparisons. Analytics
/// convert to double at the point of use.
class Decimal {
 public:
  static constexpr int kFractionDigits = 12;
  static constexpr std::int64_t kScale = 1'000'000'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_raw(int128_t raw) {
    Decimal d;
    d.raw_ = raw;
    return d;
  }
  static constexpr Decimal from_int(std::int64_t v) { return from_raw(static_cast<int128_t>(v) * kScale); }

  /// Rounds to the nearest representable value (ties away from zero).
  static Decimal from_double(double v);

  /// Parses plain decimal notation ("-12.5", "0.0005", "3e-4" is rejected).
  /// Digits beyond the 12th fractional place are rounded half away from zero.
  static std::optional<Decimal> try_parse(std::string_view text);
  static Decimal parse(std::string_view text);

  [[nodiscard]] constexpr int128_t raw() const { return raw_; }
  [[nodiscard]] double to_double() const;

  /// Shortest plain representation: no exponent, no trailing zeros.
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] constexpr Decimal abs() const { return raw_ < 0 ? from_raw(-raw_) : *this; }
  [[nodiscard]] constexpr bool is_zero() const { return raw_ == 0; }
  [[nodiscard]] constexpr int sign() const { return raw_ > 0 ? 1 : (raw_ < 0 ? -1 : 0); }

  constexpr Decimal& operator+=(Decimal o) {
    raw_ += o.raw_;
    return *this;
  }
  constexpr Decimal& operator-=(Decimal o) {
    raw_ -= o.raw_;
    return *this;
  }
  friend constexpr Decimal operator+(Decimal a, Decimal b) { return a += b; }
  friend constexpr Decimal operator-(Decimal a, Decimal b) { return a -= b; }
  friend constexpr Decimal operator-(Decimal a) { return from_raw(-a.raw_); }
  friend constexpr Decimal operator*(Decimal a, std::int64_t k) { return from_raw(a.raw_ * k); }
  friend constexpr Decimal operator*(std::int64_t k, Decimal a) { return from_raw(a.raw_ * k); }

  /// Fixed-point product rounded half away from zero. Intended for
  /// price x fraction products; price x price may overflow.
  friend Decimal operator*(Decimal a, Decimal b);

  /// Multiplies by num/den with rounding half away from zero.
  [[nodiscard]] Decimal mul_ratio(std::int64_t num, std::int64_t den) const;

  constexpr auto operator<=>(const Decimal&) const = default;

 private:
  int128_t raw_ = 0;
};

}  // namespace rg
