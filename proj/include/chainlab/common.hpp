#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>

namespace chainlab {

/// Currency in milli-units: 1 unit == 1000, so 0.1 unit == 100.
using Amount = std::int64_t;

inline constexpr Amount kMilliPerUnit = 1000;

constexpr Amount units(std::int64_t whole) { return whole * kMilliPerUnit; }

/// Renders milli-units as a trimmed decimal: 5000 -> "5", 1100 -> "1.1".
inline std::string format_amount(Amount amount) {
  std::string sign = amount < 0 ? "-" : "";
  const auto magnitude = static_cast<std::uint64_t>(std::llabs(amount));
  std::string out = sign + std::to_string(magnitude / kMilliPerUnit);
  auto frac = magnitude % kMilliPerUnit;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 3 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

/// Contract-level account identity (externally owned account or contract).
struct AccountId {
  std::string name;

  AccountId() = default;
  explicit AccountId(std::string n) : name(std::move(n)) {}

  friend bool operator==(const AccountId&, const AccountId&) = default;
  friend auto operator<=>(const AccountId&, const AccountId&) = default;
};

}  // namespace chainlab
