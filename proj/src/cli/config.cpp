#include "cape/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace cape::cli {

namespace {

constexpr std::string_view kKnownKeys[] = {
    "setting", "pi",         "pi0",       "grid_points", "n",    "replicates", "seed",
    "estimators", "intervals", "level",   "alpha",       "beta", "alpha0"};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
    return v.substr(1, v.size() - 2);
  return v;
}

// Strip a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

struct Entry {
  int line;
  std::string value;
};

double to_double(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError(e.line, key, "expected a number, got '" + e.value + "'");
  return v;
}

template <class Int>
Int to_int(const std::string& key, const Entry& e) {
  Int v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError(e.line, key, "expected an integer, got '" + e.value + "'");
  return v;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto end = v.find(',', start);
    if (end == std::string_view::npos) end = v.size();
    const auto item = unquote(trim(v.substr(start, end - start)));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

ScenarioBlock build_block(int header_line, const std::map<std::string, Entry>& kv) {
  ScenarioBlock b;
  b.line = header_line;
  Scenario& s = b.base;

  auto find = [&](const char* k) -> const Entry* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto fail_missing = [&](const char* k) {
    throw ConfigError(header_line, k, "required key missing in this [scenario] block");
  };

  const Entry* setting = find("setting");
  if (!setting) fail_missing("setting");
  try {
    s.setting = parse_setting(setting->value);
  } catch (const DomainError& e) {
    throw ConfigError(setting->line, "setting", e.what());
  }

  const bool custom = s.setting == Setting::Custom;
  if (custom) {
    if (const Entry* e = find("alpha")) s.rates.alpha = to_double("alpha", *e);
    if (const Entry* e = find("beta")) s.rates.beta = to_double("beta", *e);
    if (const Entry* e = find("alpha0")) s.rates.alpha0 = to_double("alpha0", *e);
  } else {
    for (const char* k : {"alpha", "beta", "alpha0"})
      if (const Entry* e = find(k))
        throw ConfigError(e->line, k, "error rates are fixed by setting " +
                                          std::string(setting_name(s.setting)) +
                                          "; use setting = custom");
    s.rates = setting_rates(s.setting);
  }

  const Entry* pi = find("pi");
  if (!pi) fail_missing("pi");
  s.pi = to_double("pi", *pi);

  const Entry* pi0 = find("pi0");
  const Entry* grid = find("grid_points");
  if (pi0 && grid) throw ConfigError(grid->line, "grid_points", "give either pi0 or grid_points, not both");
  if (!pi0 && !grid) throw ConfigError(header_line, "pi0", "one of pi0 or grid_points is required");
  if (pi0) {
    b.pi0 = to_double("pi0", *pi0);
    s.pi0 = *b.pi0;
  } else {
    b.grid_points = to_int<int>("grid_points", *grid);
    if (*b.grid_points < 1) throw ConfigError(grid->line, "grid_points", "must be at least 1");
  }

  if (const Entry* e = find("n")) s.n = to_int<std::int64_t>("n", *e);
  if (const Entry* e = find("seed")) s.seed = to_int<std::uint64_t>("seed", *e);
  if (const Entry* e = find("level")) s.level = to_double("level", *e);

  if (const Entry* e = find("estimators")) {
    s.estimators.clear();
    for (const auto& name : split_list(e->value)) {
      try {
        s.estimators.push_back(parse_estimator(name));
      } catch (const DomainError& err) {
        throw ConfigError(e->line, "estimators", err.what());
      }
    }
    if (s.estimators.empty()) throw ConfigError(e->line, "estimators", "estimator list is empty");
  }
  if (const Entry* e = find("intervals")) {
    for (const auto& name : split_list(e->value)) {
      try {
        s.intervals.push_back(parse_interval(name));
      } catch (const DomainError& err) {
        throw ConfigError(e->line, "intervals", err.what());
      }
    }
  }

  if (const Entry* e = find("replicates")) {
    s.replicates = to_int<std::int64_t>("replicates", *e);
    b.replicates_given = true;
  } else {
    s.replicates = s.intervals.empty() ? kDeskReplicatesRmse : kDeskReplicatesIntervals;
  }

  // Validate every expanded scenario now so errors point at the block.
  try {
    for (const auto& sc : b.expand()) sc.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(header_line, "scenario", e.what());
  }
  return b;
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& key, const std::string& what)
    : DomainError("config line " + std::to_string(line) + ", key '" + key + "': " + what),
      line_(line),
      key_(key) {}

std::vector<Scenario> ScenarioBlock::expand() const {
  if (grid_points) return scenario_grid(base.setting, base.pi, *grid_points, base);
  return {base};
}

SimulationConfig parse_config(std::string_view text) {
  SimulationConfig cfg;
  std::map<std::string, Entry> current;
  int header_line = 0;
  bool in_block = false;

  auto flush = [&] {
    if (in_block) cfg.blocks.push_back(build_block(header_line, current));
    current.clear();
  };

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;

    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line != "[scenario]")
        throw ConfigError(lineno, std::string(line), "unknown section; only [scenario] is allowed");
      flush();
      in_block = true;
      header_line = lineno;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(lineno, std::string(line), "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(unquote(trim(line.substr(eq + 1))));
    if (!in_block) throw ConfigError(lineno, key, "key appears before any [scenario] header");

    bool known = false;
    for (auto k : kKnownKeys) known = known || k == key;
    if (!known) throw ConfigError(lineno, key, "unknown key");
    if (current.count(key)) throw ConfigError(lineno, key, "duplicate key");
    current.emplace(key, Entry{lineno, value});
  }
  flush();

  if (cfg.blocks.empty()) throw ConfigError(lineno, "scenario", "config has no [scenario] block");
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cape::cli
