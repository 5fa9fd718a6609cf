#pragma once

// Scenario description, step records and the two report renderings: JSON
// Lines (golden files) and an aligned text table (terminal).

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainlab::harness {

using Json = nlohmann::json;

enum class Verdict { AttackSucceeded, AttackBlocked };

inline std::string to_string(Verdict v) {
  return v == Verdict::AttackSucceeded ? "AttackSucceeded" : "AttackBlocked";
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "AttackSucceeded") return Verdict::AttackSucceeded;
  if (s == "AttackBlocked") return Verdict::AttackBlocked;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

using Params = std::map<std::string, std::int64_t>;

struct Scenario {
  std::string name;
  std::uint64_t seed = 42;
  Params params;
};

/// One step of a trace. Observables hold scenario-specific columns such as
/// balances or block heights.
struct ReportRow {
  std::string step;
  std::string action;
  std::string status;
  Json observables = Json::object();
};

struct ScenarioReport {
  Scenario scenario;
  std::vector<ReportRow> rows;
  Verdict verdict = Verdict::AttackBlocked;
  Json summary = Json::object();

  ReportRow& add(std::string step, std::string action, std::string status,
                 Json observables = Json::object()) {
    rows.push_back({std::move(step), std::move(action), std::move(status), std::move(observables)});
    return rows.back();
  }
};

/// Header record, one record per row, then the verdict record.
inline std::string to_jsonl(const ScenarioReport& report) {
  std::string out;
  Json header = {{"record", "scenario"},
                 {"name", report.scenario.name},
                 {"seed", report.scenario.seed},
                 {"params", report.scenario.params}};
  out += header.dump() + '\n';
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    Json row = {{"record", "row"},
                {"index", i},
                {"step", r.step},
                {"action", r.action},
                {"status", r.status},
                {"observables", r.observables}};
    out += row.dump() + '\n';
  }
  Json tail = {{"record", "verdict"},
               {"verdict", to_string(report.verdict)},
               {"summary", report.summary}};
  out += tail.dump() + '\n';
  return out;
}

namespace detail {

inline std::string cell(const Json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

inline std::string observables_text(const Json& obs) {
  std::string out;
  for (auto it = obs.begin(); it != obs.end(); ++it) {
    if (!out.empty()) out += ", ";
    out += it.key() + "=" + cell(it.value());
  }
  return out;
}

}  // namespace detail

inline std::string render_table(const ScenarioReport& report) {
  std::vector<std::vector<std::string>> lines;
  lines.push_back({"Step", "Action", "Status", "Observables"});
  for (const auto& r : report.rows) {
    lines.push_back({r.step, r.action, r.status, detail::observables_text(r.observables)});
  }
  std::vector<std::size_t> width(4, 0);
  for (const auto& l : lines) {
    for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], l[c].size());
  }

  std::ostringstream os;
  os << "== " << report.scenario.name << " (seed " << report.scenario.seed << ")\n";
  for (const auto& l : lines) {
    for (std::size_t c = 0; c < 3; ++c) {
      os << l[c] << std::string(width[c] - l[c].size() + 2, ' ');
    }
    os << l[3] << '\n';
  }
  os << "verdict: " << to_string(report.verdict);
  if (!report.summary.empty()) os << "  (" << detail::observables_text(report.summary) << ")";
  os << '\n';
  return os.str();
}

}  // namespace chainlab::harness
