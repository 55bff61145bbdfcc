#ifndef IRFACT_TOOLS_CONFIG_HPP_
#define IRFACT_TOOLS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cli {

// One `key = value` occurrence. `line` is 0 for values set on the command line.
struct Entry {
  std::string value;
  int line = 0;
  std::filesystem::path base;  // directory that relative paths resolve against
};

// Sectioned key/value configuration:
//
//   # comment            ; comment
//   [section]
//   key = value
//
// Keys are unique per section except those declared repeatable. Unknown
// sections or keys are rejected so typos cannot silently change a run.
class Config {
 public:
  static Config parse(const std::string& text, const std::filesystem::path& base,
                      const std::string& source_name);
  static Config load(const std::filesystem::path& path);

  // Command-line override; replaces any value from the file.
  void set(const std::string& section, const std::string& key, const std::string& value);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::optional<std::string> find(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
  // Resolved against the config file's directory (or the working directory
  // for command-line values).
  std::optional<std::filesystem::path> get_path(const std::string& section,
                                                const std::string& key) const;
  const std::vector<Entry>& all(const std::string& section, const std::string& key) const;

  // Error mentioning the source line of section.key.
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& message) const;

  // Sorted "section.key = value" lines; the basis of the config hash.
  std::string canonical(const std::vector<std::string>& excluded_keys = {}) const;

 private:
  std::string source_ = "<command line>";
  std::map<std::string, std::map<std::string, std::vector<Entry>>> values_;
};

// Known sections and keys.
bool known_key(const std::string& section, const std::string& key);
bool repeatable_key(const std::string& section, const std::string& key);

}  // namespace cli

#endif  // IRFACT_TOOLS_CONFIG_HPP_
