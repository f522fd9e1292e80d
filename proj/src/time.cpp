#include "rg/time.hpp"

#include <chrono>
#include <cstdio>

#include "rg/error.hpp"

namespace rg {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

[[noreturn]] void bad(std::string_view text, const char* why) {
  throw Error(ErrorKind::schema, "invalid UTC timestamp '" + std::string(text) + "': " + why);
}

}  // namespace

Timestamp parse_utc(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (!read_int(s, 0, 4, y) || s.size() < 19 || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
      !read_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') || !read_int(s, 11, 2, h) || s[13] != ':' ||
      !read_int(s, 14, 2, mi) || s[16] != ':' || !read_int(s, 17, 2, se)) {
    bad(text, "expected YYYY-MM-DDTHH:MM:SSZ");
  }
  std::string_view tz = s.substr(19);
  if (tz != "Z" && tz != "+00:00") bad(text, "only UTC ('Z' or '+00:00') is accepted");

  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 59) bad(text, "field out of range");
  auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_utc(Timestamp t) {
  using namespace std::chrono;
  Timestamp day_start = t >= 0 ? t / 86400 : (t - 86399) / 86400;
  Timestamp secs = t - day_start * 86400;
  year_month_day ymd{sys_days{days{day_start}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(secs / 3600),
                static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
  return buf;
}

}  // namespace rg
