#include "rg/config.hpp"

#include <array>

#include "rg/error.hpp"

namespace rg {

namespace {

#define RG_SPEC(member, key, def, desc) ParamSpec{key, def, desc},
constexpr std::array kSpecs{RG_CONFIG_PARAMS(RG_SPEC)};
#undef RG_SPEC

double* slot(Config& c, std::string_view key) {
#define RG_SLOT(member, k, def, desc) \
  if (key == k) return &c.member;
  RG_CONFIG_PARAMS(RG_SLOT)
#undef RG_SLOT
  return nullptr;
}

}  // namespace

std::span<const ParamSpec> Config::params() { return kSpecs; }

bool Config::has(std::string_view key) {
  for (const auto& s : kSpecs)
    if (s.key == key) return true;
  return false;
}

double Config::get(std::string_view key) const {
  double* p = slot(const_cast<Config&>(*this), key);
  if (!p) throw Error(ErrorKind::invalid_input, "unknown config key '" + std::string(key) + "'");
  return *p;
}

void Config::set(std::string_view key, double value) {
  double* p = slot(*this, key);
  if (!p) throw Error(ErrorKind::invalid_input, "unknown config key '" + std::string(key) + "'");
  *p = value;
}

}  // namespace rg
