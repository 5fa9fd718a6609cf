#pragma once

#include <chainlab/harness/report.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chainlab::harness {

/// Bad scenario name or parameter set; the CLI maps it to a usage error.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Defaults overlaid with caller overrides. Keys absent from the defaults are
/// rejected rather than ignored.
class ParamSet {
 public:
  ParamSet(const std::string& scenario, Params defaults, const Params& overrides)
      : values_(std::move(defaults)) {
    for (const auto& [key, value] : overrides) {
      auto it = values_.find(key);
      if (it == values_.end()) {
        throw ScenarioError("scenario '" + scenario + "' has no parameter '" + key + "'");
      }
      it->second = value;
    }
  }

  [[nodiscard]] std::int64_t get(const std::string& key) const { return values_.at(key); }

  /// Value checked against [lo, hi].
  [[nodiscard]] std::int64_t get(const std::string& key, std::int64_t lo, std::int64_t hi) const {
    const auto v = get(key);
    if (v < lo || v > hi) {
      throw ScenarioError("parameter '" + key + "' = " + std::to_string(v) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
  }

  [[nodiscard]] std::uint64_t get_u(const std::string& key, std::int64_t lo, std::int64_t hi) const {
    return static_cast<std::uint64_t>(get(key, lo, hi));
  }

  [[nodiscard]] const Params& values() const { return values_; }

 private:
  Params values_;
};

}  // namespace chainlab::harness
