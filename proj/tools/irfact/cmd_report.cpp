#include <algorithm>
#include <cstdio>

#include "commands.hpp"
#include "common.hpp"

namespace cli {

namespace {

std::string num(const nlohmann::json& v) {
  if (!v.is_number()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v.get<double>());
  return buf;
}

void summarize(const nlohmann::json& j, std::string& md, nlohmann::json& entry) {
  const std::string cmd = j.value("command", "");
  if (cmd == "evaluate" && j.contains("results")) {
    md += "| result | best Jaccard | threshold | polarity |\n|---|---|---|---|\n";
    for (const auto& r : j["results"]) {
      md += "| " + r.value("name", "") + " | " + num(r["best_jaccard"]) + " | " + num(r["best_threshold"]) +
            " | " + r.value("polarity", "") + " |\n";
      entry["best_jaccard"][r.value("name", "")] = r["best_jaccard"];
    }
  } else if (cmd == "robustness" && j.contains("methods")) {
    md += "| method | level | SNR (dB) | best Jaccard |\n|---|---|---|---|\n";
    for (const auto& m : j["methods"])
      for (const auto& p : m["points"])
        md += "| " + m.value("method", "") + " | " + num(p["level"]) + " | " + num(p["snr"]) + " | " +
              num(p["best_jaccard"]) + " |\n";
  } else if (cmd == "texture" && j.contains("features")) {
    md += "| feature | H | p | exact p |\n|---|---|---|---|\n";
    for (const auto& [name, k] : j["features"].items())
      md += "| " + name + " | " + num(k["h"]) + " | " + num(k["p_value"]) + " | " + num(k["p_exact"]) + " |\n";
  } else if (cmd == "texture" && j.contains("training_accuracy")) {
    md += "training accuracy " + num(j["training_accuracy"]) + ", AUC " + num(j["auc"]);
    if (j.contains("loo_accuracy")) md += ", leave-one-out accuracy " + num(j["loo_accuracy"]);
    md += "\n";
    entry["training_accuracy"] = j["training_accuracy"];
    entry["auc"] = j["auc"];
  } else if (cmd == "factorize" && j.contains("methods")) {
    md += "| method | iterations | selected | final objective |\n|---|---|---|---|\n";
    for (const auto& m : j["methods"])
      md += "| " + m.value("method", "") + " | " + std::to_string(m.value("iterations", 0)) + " | " +
            std::to_string(m.value("selected_component", 0)) + " | " + num(m["final_objective"]) + " |\n";
  } else if (cmd == "factorize" && j.contains("iterations")) {
    md += j.value("method", "") + ": " + std::to_string(j.value("iterations", 0)) + " iterations, selected component " +
          std::to_string(j["selection"].value("index", 0)) + "\n";
  } else if (j.contains("outputs")) {
    md += std::to_string(j["outputs"].size()) + " output files\n";
  }
}

}  // namespace

void cmd_report(const Context& ctx) {
  const Config& c = ctx.config;
  const std::filesystem::path input = c.get_path("report", "input").value_or(ctx.output);
  if (!std::filesystem::is_directory(input))
    throw CliError(kExitData, "report: " + input.string() + " is not a directory");
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(input)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    const std::string rel = e.path().lexically_relative(input).generic_string();
    if (rel == "report.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());

  std::string md = "# irfact report\n";
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& rel : files) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(input / rel));
    } catch (const nlohmann::json::exception& e) {
      throw CliError(kExitData, "report: " + rel + ": " + e.what());
    }
    if (!j.is_object() || j.value("tool", "") != "irfact") continue;
    nlohmann::json entry = {{"file", rel},
                            {"command", j.value("command", "")},
                            {"config_sha256", j.value("config_sha256", "")},
                            {"seed", j.value("seed", 0ULL)},
                            {"sha256", sha256_file(input / rel)}};
    md += "\n## " + rel + " (" + j.value("command", "") + ")\n\n";
    summarize(j, md, entry);
    entries.push_back(entry);
  }
  Outputs out(ctx.output);
  write_text_atomic(out.path("report.md"), md);
  nlohmann::json m = ctx.header();
  m["reports"] = entries;
  write_json(ctx.output / "report.json", m);
  std::printf("report over %zu documents -> %s\n", entries.size(), (ctx.output / "report.md").string().c_str());
}

}  // namespace cli
