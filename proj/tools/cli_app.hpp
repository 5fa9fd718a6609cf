#pragma once

// Command-line front end. Kept in a header so the test suite can drive it
// in-process with captured streams.
//
// Precedence: built-in defaults < --config file < command-line flags.

#include <chainlab/harness.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace chainlab::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kVerdictMismatch = 1,
  kUsage = 2,
  kIo = 3,
  kGoldenMismatch = 4,
  kGoldenMissing = 5,
};

enum class Format { Table, Structured };

struct RunConfig {
  std::string selector;
  std::uint64_t seed = 42;
  harness::Params overrides;
  std::optional<fs::path> out_dir;
  Format format = Format::Table;
  bool parallel = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::int64_t parse_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used, 10);
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + text + "' is not an integer");
  }
  if (used != text.size()) throw UsageError(what + ": '" + text + "' is not an integer");
  return v;
}

inline std::pair<std::string, std::int64_t> parse_param(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
  return {kv.substr(0, eq), parse_int(kv.substr(eq + 1), "parameter " + kv.substr(0, eq))};
}

inline Format parse_format(const std::string& s) {
  if (s == "table") return Format::Table;
  if (s == "structured") return Format::Structured;
  throw UsageError("format must be 'table' or 'structured', got '" + s + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Flat `key = value` file; `#` starts a comment. Recognised keys: seed,
/// format, out, parallel, and `param.<name>` for scenario parameters.
inline void apply_config_file(const fs::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, "seed"));
    } else if (key == "format") {
      cfg.format = parse_format(value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "parallel") {
      cfg.parallel = value == "true" || value == "1";
    } else if (key.rfind("param.", 0) == 0 && key.size() > 6) {
      cfg.overrides[key.substr(6)] = parse_int(value, key);
    } else {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
}

/// Scenario selection plus the overrides that apply to each scenario. With
/// "all", a parameter goes to every scenario that declares it and must be
/// declared by at least one of them.
inline std::vector<harness::Scenario> plan(const RunConfig& cfg) {
  std::vector<const harness::CatalogEntry*> entries;
  if (cfg.selector == "all") {
    for (const auto& e : harness::catalog()) entries.push_back(&e);
  } else {
    try {
      entries.push_back(&harness::find_scenario(cfg.selector));
    } catch (const harness::ScenarioError& e) {
      throw UsageError(e.what());
    }
  }

  std::vector<harness::Scenario> out;
  std::map<std::string, bool> claimed;
  for (const auto& [key, v] : cfg.overrides) claimed[key] = false;
  for (const auto* e : entries) {
    harness::Scenario s{e->name, cfg.seed, {}};
    const auto defaults = e->defaults();
    for (const auto& [key, v] : cfg.overrides) {
      if (cfg.selector == "all" && !defaults.contains(key)) continue;
      s.params[key] = v;
      claimed[key] = true;
    }
    out.push_back(std::move(s));
  }
  for (const auto& [key, used] : claimed) {
    if (!used) throw UsageError("no selected scenario has a parameter named '" + key + "'");
  }
  return out;
}

inline std::vector<harness::ScenarioReport> execute(const std::vector<harness::Scenario>& scenarios,
                                                    bool parallel) {
  std::vector<harness::ScenarioReport> reports;
  try {
    if (!parallel) {
      for (const auto& s : scenarios) reports.push_back(harness::run(s));
      return reports;
    }
    std::vector<std::future<harness::ScenarioReport>> jobs;
    for (const auto& s : scenarios) {
      jobs.push_back(std::async(std::launch::async, [s] { return harness::run(s); }));
    }
    for (auto& j : jobs) reports.push_back(j.get());
  } catch (const harness::ScenarioError& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return reports;
}

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << content) || !f.flush()) throw IoError("cannot write " + path.string());
}

inline int cmd_list(std::ostream& out) {
  for (const auto& e : harness::catalog()) {
    out << e.name << std::string(26 - std::min<std::size_t>(25, e.name.size()), ' ') << "["
        << e.category << "] expect " << to_string(e.expected) << ": " << e.description << '\n';
  }
  return kOk;
}

inline int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto scenarios = plan(cfg);
  const auto reports = execute(scenarios, cfg.parallel);

  if (cfg.out_dir) {
    std::error_code ec;
    fs::create_directories(*cfg.out_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.out_dir->string() + ": " + ec.message());
  }

  int code = kOk;
  for (const auto& r : reports) {
    const auto expected = harness::find_scenario(r.scenario.name).expected;
    const std::string body =
        cfg.format == Format::Structured ? harness::to_jsonl(r) : harness::render_table(r);
    if (cfg.out_dir) {
      const auto ext = cfg.format == Format::Structured ? ".jsonl" : ".txt";
      write_file(*cfg.out_dir / (r.scenario.name + ext), body);
      out << r.scenario.name << ": " << to_string(r.verdict) << '\n';
    } else {
      out << body;
    }
    if (r.verdict != expected) {
      err << r.scenario.name << ": verdict " << to_string(r.verdict) << ", expected "
          << to_string(expected) << '\n';
      code = kVerdictMismatch;
    }
  }
  return code;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

/// Re-runs every catalogued scenario with the seed and parameters recorded in
/// its golden header and byte-compares the structured report.
inline int cmd_verify(const fs::path& golden_dir, std::ostream& out, std::ostream& err) {
  bool missing = false;
  bool mismatch = false;
  for (const auto& e : harness::catalog()) {
    const auto path = golden_dir / (e.name + ".jsonl");
    std::ifstream f(path, std::ios::binary);
    if (!f) {
      err << e.name << ": missing golden file " << path.string() << '\n';
      missing = true;
      continue;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string golden = buf.str();

    harness::Scenario s{e.name, 42, {}};
    try {
      const auto header = harness::Json::parse(golden.substr(0, golden.find('\n')));
      s.seed = header.at("seed").get<std::uint64_t>();
      s.params = header.at("params").get<harness::Params>();
    } catch (const std::exception& ex) {
      err << e.name << ": unreadable golden header: " << ex.what() << '\n';
      mismatch = true;
      continue;
    }

    std::string fresh;
    try {
      fresh = harness::to_jsonl(harness::run(s));
    } catch (const std::invalid_argument& ex) {
      err << e.name << ": golden header does not describe a runnable scenario: " << ex.what() << '\n';
      mismatch = true;
      continue;
    }
    if (fresh == golden) {
      out << e.name << ": match\n";
      continue;
    }
    mismatch = true;
    const auto want = split_lines(golden);
    const auto got = split_lines(fresh);
    for (std::size_t i = 0; i < std::max(want.size(), got.size()); ++i) {
      const std::string w = i < want.size() ? want[i] : "<none>";
      const std::string g = i < got.size() ? got[i] : "<none>";
      if (w == g) continue;
      err << e.name << ": line " << (i + 1) << " differs\n  golden: " << w << "\n  actual: " << g
          << '\n';
    }
  }
  if (missing) return kGoldenMissing;
  return mismatch ? kGoldenMismatch : kOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"chainlab: blockchain attack and defense scenarios"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string seed_text, format_text, out_text, config_path;
  std::vector<std::string> params;
  bool parallel = false;

  auto* list = app.add_subcommand("list", "List the scenario catalog");

  auto* run = app.add_subcommand("run", "Run one scenario or all of them");
  run->add_option("scenario", cfg.selector, "Scenario name or 'all'")->required();
  run->add_option("--seed", seed_text, "Seed for key generation and secrets (default 42)");
  run->add_option("--param", params, "Scenario parameter override key=value (repeatable)");
  run->add_option("--format", format_text, "table or structured (default table)");
  run->add_option("--out", out_text, "Write one report file per scenario into this directory");
  run->add_option("--config", config_path, "Flat key = value file; flags take precedence");
  run->add_flag("--parallel", parallel, "Run scenarios concurrently");

  std::string golden_dir = "golden";
  auto* verify = app.add_subcommand("verify", "Compare fresh reports with golden files");
  verify->add_option("--golden", golden_dir, "Golden directory (default golden)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    if (*list) return cmd_list(out);
    if (*verify) return cmd_verify(golden_dir, out, err);

    if (!config_path.empty()) apply_config_file(config_path, cfg);
    if (!seed_text.empty()) cfg.seed = static_cast<std::uint64_t>(parse_int(seed_text, "--seed"));
    if (!format_text.empty()) cfg.format = parse_format(format_text);
    if (!out_text.empty()) cfg.out_dir = out_text;
    if (parallel) cfg.parallel = true;
    for (const auto& kv : params) {
      auto [k, v] = parse_param(kv);
      cfg.overrides[k] = v;
    }
    (void)run;
    return cmd_run(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace chainlab::cli
