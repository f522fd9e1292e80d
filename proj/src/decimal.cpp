#include "rg/decimal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rg {

namespace {

int128_t div_round(int128_t num, int128_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  int128_t q = num / den;
  int128_t r = num % den;
  if (r < 0) r = -r;
  if (2 * r >= den) q += (num < 0) ? -1 : 1;
  return q;
}

}  // namespace

Decimal Decimal::from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("Decimal::from_double: non-finite value");
  if (std::fabs(v) > 1e24) throw std::out_of_range("Decimal::from_double: magnitude too large");
  double ip = std::trunc(v);
  double frac = v - ip;
  auto whole = static_cast<int128_t>(static_cast<long double>(ip));
  auto part = static_cast<int128_t>(std::llround(frac * static_cast<double>(kScale)));
  return from_raw(whole * kScale + part);
}

std::optional<Decimal> Decimal::try_parse(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;

  bool neg = false;
  if (s.front() == '-' || s.front() == '+') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;

  int128_t whole = 0;
  int128_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  bool round_up = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    any_digit = true;
    int digit = c - '0';
    if (!seen_dot) {
      whole = whole * 10 + digit;
      if (whole > static_cast<int128_t>(1) << 100) return std::nullopt;
    } else if (frac_digits < kFractionDigits) {
      frac = frac * 10 + digit;
      ++frac_digits;
    } else if (frac_digits == kFractionDigits) {
      round_up = digit >= 5;
      ++frac_digits;
    }
  }
  if (!any_digit) return std::nullopt;
  for (int i = std::min(frac_digits, kFractionDigits); i < kFractionDigits; ++i) frac *= 10;
  int128_t raw = whole * kScale + frac + (round_up ? 1 : 0);
  return from_raw(neg ? -raw : raw);
}

Decimal Decimal::parse(std::string_view text) {
  auto d = try_parse(text);
  if (!d) throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  return *d;
}

double Decimal::to_double() const {
  int128_t whole = raw_ / kScale;
  int128_t frac = raw_ % kScale;
  return static_cast<double>(whole) + static_cast<double>(frac) / static_cast<double>(kScale);
}

std::string Decimal::to_string() const {
  int128_t v = raw_ < 0 ? -raw_ : raw_;
  int128_t whole = v / kScale;
  int128_t frac = v % kScale;

  std::string digits;
  if (whole == 0) digits = "0";
  while (whole > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(whole % 10)));
    whole /= 10;
  }
  std::reverse(digits.begin(), digits.end());

  std::string out = raw_ < 0 ? "-" + digits : digits;
  if (frac != 0) {
    std::string f(kFractionDigits, '0');
    for (int i = kFractionDigits - 1; i >= 0; --i) {
      f[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(frac % 10));
      frac /= 10;
    }
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += "." + f;
  }
  return out;
}

Decimal operator*(Decimal a, Decimal b) { return Decimal::from_raw(div_round(a.raw_ * b.raw_, Decimal::kScale)); }

Decimal Decimal::mul_ratio(std::int64_t num, std::int64_t den) const {
  if (den == 0) throw std::domain_error("Decimal::mul_ratio: zero denominator");
  return from_raw(div_round(raw_ * num, den));
}

}  // namespace rg
