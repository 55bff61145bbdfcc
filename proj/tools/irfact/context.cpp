#include <algorithm>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"

namespace cli {

std::string Context::config_hash() const {
  return sha256_bytes(config.canonical({"general.output", "general.threads"}));
}

nlohmann::json Context::header() const {
  nlohmann::json j;
  j["tool"] = "irfact";
  j["version"] = irf_version();
  j["command"] = command;
  j["config_sha256"] = config_hash();
  j["seed"] = seed;
  return j;
}

std::filesystem::path Outputs::path(const std::string& relative) {
  if (std::find(files_.begin(), files_.end(), relative) == files_.end()) files_.push_back(relative);
  const auto p = root_ / relative;
  std::filesystem::create_directories(p.parent_path());
  return p;
}

nlohmann::json Outputs::hashes() const {
  std::vector<std::string> sorted = files_;
  std::sort(sorted.begin(), sorted.end());
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : sorted) j[f] = sha256_file(root_ / f);
  return j;
}

double FactorSettings::lambda_for(const std::string& method) const {
  if (method == "sparse_pct" && lambda_sparse_pct >= 0) return lambda_sparse_pct;
  if (method == "sparse_nmf" && lambda_sparse_nmf >= 0) return lambda_sparse_nmf;
  return lambda;
}

std::vector<std::string> parse_methods(const Config& c, const std::string& section,
                                       const std::string& key, const std::vector<std::string>& fallback) {
  std::vector<std::string> names = c.get_list(section, key);
  if (names.empty()) names = fallback;
  std::vector<std::string> out;
  for (std::string n : names) {
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) {
      return ch == '-' ? '_' : static_cast<char>(std::tolower(ch));
    });
    if (n == "all") {
      std::istringstream all(irf_method_names());
      std::string m;
      while (std::getline(all, m, ',')) {
        m.erase(0, m.find_first_not_of(' '));
        out.push_back(m);
      }
      continue;
    }
    if (!irf_method_is_valid(n.c_str()))
      c.fail(section, key, "unknown method '" + n + "'; valid methods: " + irf_method_names());
    out.push_back(n);
  }
  std::vector<std::string> unique;
  for (const auto& m : out)
    if (std::find(unique.begin(), unique.end(), m) == unique.end()) unique.push_back(m);
  return unique;
}

FactorSettings factor_settings(const Config& c) {
  FactorSettings s;
  s.methods = parse_methods(c, "factor", "methods", {"pct"});
  s.rank = static_cast<int>(c.get_int("factor", "rank", s.rank));
  s.lambda = c.get_double("factor", "lambda", s.lambda);
  s.lambda_sparse_pct = c.get_double("factor", "lambda_sparse_pct", -1);
  s.lambda_sparse_nmf = c.get_double("factor", "lambda_sparse_nmf", -1);
  s.max_iter = static_cast<int>(c.get_int("factor", "max_iter", s.max_iter));
  s.rel_tol = c.get_double("factor", "rel_tol", s.rel_tol);
  const std::string init = c.get_string("factor", "init", "random");
  if (init == "random" || init == "random_uniform") s.init = IRF_INIT_RANDOM_UNIFORM;
  else if (init == "kmeans" || init == "k_means") s.init = IRF_INIT_KMEANS;
  else c.fail("factor", "init", "expected 'random' or 'kmeans'");
  s.shift_nonnegative = c.get_bool("factor", "shift_nonnegative", true);
  if (s.rank < 1) c.fail("factor", "rank", "rank must be >= 1");
  if (s.lambda < 0) c.fail("factor", "lambda", "lambda must be >= 0");
  if (s.max_iter < 1) c.fail("factor", "max_iter", "max_iter must be >= 1");
  if (!(s.rel_tol > 0)) c.fail("factor", "rel_tol", "rel_tol must be > 0");
  return s;
}

}  // namespace cli
