#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "common.hpp"

namespace cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"general", {"seed", "output", "threads"}},
      {"simulate", {"mode", "preset", "noise"}},
      {"specimen",
       {"name", "width", "height", "thickness", "rows", "cols", "layers", "conductivity", "density",
        "specific_heat", "defect"}},
      {"acquisition", {"flash_energy", "flash_duration", "sampling_rate", "duration"}},
      {"cohort",
       {"subjects", "symptomatic", "duration", "sampling_rate", "lesion_radius_min",
        "lesion_radius_max", "perfusion_multiplier", "metabolic_multiplier", "background_variation",
        "background_length", "noise_percent", "rows", "cols", "width", "height", "perfusion_rate",
        "metabolic_rate", "conductivity"}},
      {"factor",
       {"input", "methods", "rank", "lambda", "lambda_sparse_pct", "lambda_sparse_nmf", "max_iter",
        "rel_tol", "init", "shift_nonnegative", "selection", "component", "roi"}},
      {"evaluate", {"input", "gt", "defects", "step", "invert"}},
      {"robustness", {"input", "gt", "signal_roi", "noise_roi", "levels", "methods", "step", "invert"}},
      {"texture",
       {"cohort", "method", "rank", "component", "levels", "offsets", "symmetric",
        "squared_dissimilarity", "loo"}},
      {"report", {"input"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

bool known_key(const std::string& section, const std::string& key) {
  const auto it = schema().find(section);
  return it != schema().end() && it->second.count(key) > 0;
}

bool repeatable_key(const std::string& section, const std::string& key) {
  return section == "specimen" && key == "defect";
}

Config Config::parse(const std::string& text, const std::filesystem::path& base,
                     const std::string& source_name) {
  Config c;
  c.source_ = source_name;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  auto error = [&](const std::string& msg) {
    throw CliError(kExitUsage, source_name + ":" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') error("unterminated section header");
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (schema().count(section) == 0) error("unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) error("expected 'key = value'");
    if (section.empty()) error("key outside of any [section]");
    const std::string key = lower(trim(s.substr(0, eq)));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) error("empty key");
    if (!known_key(section, key)) error("unknown key '" + key + "' in [" + section + "]");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    auto& slot = c.values_[section][key];
    if (!slot.empty() && !repeatable_key(section, key))
      error("duplicate key '" + key + "' (first set on line " + std::to_string(slot.front().line) + ")");
    slot.push_back({value, line, base});
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliError(kExitData, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.parent_path(), path.filename().string());
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!known_key(section, key)) throw CliError(kExitUsage, "unknown key '" + key + "' in [" + section + "]");
  values_[section][key] = {Entry{value, 0, std::filesystem::current_path()}};
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

const std::vector<Entry>& Config::all(const std::string& section, const std::string& key) const {
  static const std::vector<Entry> none;
  const auto s = values_.find(section);
  if (s == values_.end()) return none;
  const auto k = s->second.find(key);
  return k == s->second.end() ? none : k->second;
}

std::optional<std::string> Config::find(const std::string& section, const std::string& key) const {
  const auto& e = all(section, key);
  if (e.empty()) return std::nullopt;
  return e.back().value;
}

void Config::fail(const std::string& section, const std::string& key, const std::string& message) const {
  const auto& e = all(section, key);
  std::string where = "[" + section + "] " + key;
  if (!e.empty() && e.back().line > 0) where = source_ + ":" + std::to_string(e.back().line) + ": " + where;
  else if (!e.empty()) where = "command line: " + where;
  throw CliError(kExitUsage, where + ": " + message);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return find(section, key).value_or(fallback);
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto v = find(section, key);
  if (!v) return fallback;
  double out = 0;
  const char* b = v->data();
  const char* e = b + v->size();
  const auto r = std::from_chars(b, e, out);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(out))
    fail(section, key, "expected a finite number, got '" + *v + "'");
  return out;
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
  const auto v = find(section, key);
  if (!v) return fallback;
  long long out = 0;
  const char* b = v->data();
  const char* e = b + v->size();
  const auto r = std::from_chars(b, e, out);
  if (r.ec != std::errc() || r.ptr != e) fail(section, key, "expected an integer, got '" + *v + "'");
  return out;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const {
  const auto v = find(section, key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const char* b = v->data();
  const char* e = b + v->size();
  const auto r = std::from_chars(b, e, out);
  if (r.ec != std::errc() || r.ptr != e)
    fail(section, key, "expected a non-negative integer, got '" + *v + "'");
  return out;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const auto v = find(section, key);
  if (!v) return fallback;
  const std::string s = lower(*v);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  fail(section, key, "expected true or false, got '" + *v + "'");
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  const auto v = find(section, key);
  if (!v) return out;
  std::string item;
  std::istringstream in(*v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(section, key, "empty list item");
    out.push_back(item);
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : get_list(section, key)) {
    double d = 0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), d);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size() || !std::isfinite(d))
      fail(section, key, "expected a list of numbers, got '" + item + "'");
    out.push_back(d);
  }
  return out;
}

std::optional<std::filesystem::path> Config::get_path(const std::string& section,
                                                      const std::string& key) const {
  const auto& e = all(section, key);
  if (e.empty()) return std::nullopt;
  std::filesystem::path p(e.back().value);
  if (p.is_relative()) p = e.back().base / p;
  return p.lexically_normal();
}

std::string Config::canonical(const std::vector<std::string>& excluded_keys) const {
  std::string out;
  for (const auto& [section, keys] : values_) {
    for (const auto& [key, entries] : keys) {
      const std::string name = section + "." + key;
      if (std::find(excluded_keys.begin(), excluded_keys.end(), name) != excluded_keys.end()) continue;
      for (const Entry& e : entries) out += name + " = " + e.value + "\n";
    }
  }
  return out;
}

}  // namespace cli
