#ifndef IRFACT_TOOLS_COMMANDS_HPP_
#define IRFACT_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace cli {

struct Context {
  Config config;
  std::string command;
  std::filesystem::path output;
  std::uint64_t seed = 0;
  int threads = 1;

  // SHA-256 of the effective configuration, excluding where outputs go and
  // how many threads run (neither changes any result).
  std::string config_hash() const;
  // Fields every report carries.
  nlohmann::json header() const;
};

// Tracks files written by one command so the manifest can hash them.
class Outputs {
 public:
  explicit Outputs(std::filesystem::path root) : root_(std::move(root)) {}
  std::filesystem::path path(const std::string& relative);
  nlohmann::json hashes() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

// Builds a factorization request from [factor] for `method`.
struct FactorSettings {
  std::vector<std::string> methods;
  int rank = 7;
  double lambda = 0.1;
  double lambda_sparse_pct = -1;  // < 0: use lambda
  double lambda_sparse_nmf = -1;
  int max_iter = 500;
  double rel_tol = 1e-6;
  int init = 0;
  bool shift_nonnegative = true;

  double lambda_for(const std::string& method) const;
};
FactorSettings factor_settings(const Config& c);
std::vector<std::string> parse_methods(const Config& c, const std::string& section,
                                       const std::string& key, const std::vector<std::string>& fallback);

void cmd_simulate(const Context& ctx);
void cmd_factorize(const Context& ctx);
void cmd_evaluate(const Context& ctx);
void cmd_robustness(const Context& ctx);
void cmd_texture(const Context& ctx);
void cmd_report(const Context& ctx);

}  // namespace cli

#endif  // IRFACT_TOOLS_COMMANDS_HPP_
