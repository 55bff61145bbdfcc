#include <algorithm>
#include <cstdio>

#include "commands.hpp"
#include "common.hpp"

namespace cli {

namespace {

struct Target {
  std::string name;
  std::filesystem::path path;
};

// A factorization directory contributes one target per method subdirectory
// holding selected.thrm; anything else is a single image.
std::vector<Target> targets(const std::filesystem::path& input) {
  std::vector<Target> out;
  if (std::filesystem::is_directory(input)) {
    for (const auto& e : std::filesystem::directory_iterator(input))
      if (e.is_directory() && std::filesystem::exists(e.path() / "selected.thrm"))
        out.push_back({e.path().filename().string(), e.path() / "selected.thrm"});
    std::sort(out.begin(), out.end(), [](const Target& a, const Target& b) { return a.name < b.name; });
    if (out.empty())
      throw CliError(kExitData, "evaluate: no */selected.thrm under " + input.string());
  } else {
    out.push_back({input.stem().string(), input});
  }
  return out;
}

double jaccard_at(const ImageBuf& im, double threshold, int polarity, const irf_mask* gt,
                  const irf_mask* domain) {
  std::vector<double> v = im.data;
  if (polarity == 1)
    for (double& x : v) x = -x;
  irf_mask* raw = nullptr;
  check(irf_binarize(v.data(), im.rows, im.cols, threshold, &raw, nullptr), "binarize");
  MaskPtr detected(raw);
  double j = 0;
  check(irf_jaccard(detected.get(), gt, domain, &j), "jaccard");
  return j;
}

}  // namespace

void cmd_evaluate(const Context& ctx) {
  const Config& c = ctx.config;
  const auto input = c.get_path("evaluate", "input");
  if (!input) throw CliError(kExitUsage, "evaluate: [evaluate] input (or --input) is required");
  const auto gt_path = c.get_path("evaluate", "gt");
  if (!gt_path) throw CliError(kExitUsage, "evaluate: [evaluate] gt (or --gt) is required");
  const double step = c.get_double("evaluate", "step", 0.05);
  const bool invert = c.get_bool("evaluate", "invert", true);
  MaskPtr gt = load_mask(*gt_path);

  std::vector<std::string> defect_names;
  std::vector<MaskPtr> defects, windows;
  if (c.has("evaluate", "defects")) {
    const Entry& entry = c.all("evaluate", "defects").back();
    for (const std::string& item : c.get_list("evaluate", "defects")) {
      std::filesystem::path p(item);
      if (p.is_relative()) p = entry.base / p;
      defects.push_back(load_mask(p));
      irf_mask* w = nullptr;
      check(irf_defect_window(defects.back().get(), &w), "defect window " + item);
      windows.emplace_back(w);
      defect_names.push_back(p.filename().string());
    }
  }

  Outputs out(ctx.output);
  nlohmann::json results = nlohmann::json::array();
  for (const Target& t : targets(*input)) {
    const ImageBuf im = load_image(t.path);
    irf_sweep* raw = nullptr;
    check(irf_threshold_sweep(im.data.data(), im.rows, im.cols, gt.get(), step, invert ? 1 : 0, nullptr, &raw),
          "threshold sweep (" + t.name + ")");
    SweepPtr sweep(raw);
    double best_t = 0, best_j = 0;
    int polarity = 0;
    check(irf_sweep_best(sweep.get(), &best_t, &best_j, &polarity), "sweep");

    std::string csv = csv_row({"level_or_threshold", "jaccard", "snr", "polarity"});
    nlohmann::json curve = nlohmann::json::array();
    for (int pol = 0; pol < (invert ? 2 : 1); ++pol) {
      for (std::size_t i = 0; i < irf_sweep_size(sweep.get()); ++i) {
        double thr = 0, jn = 0, ji = 0;
        check(irf_sweep_entry(sweep.get(), i, &thr, &jn, &ji), "sweep");
        const double j = pol == 0 ? jn : ji;
        csv += csv_row({fmt(thr), fmt(j), "", pol == 0 ? "normal" : "inverted"});
      }
    }
    write_text_atomic(out.path("sweep_" + t.name + ".csv"), csv);

    nlohmann::json per_defect = nlohmann::json::array();
    if (!defects.empty()) {
      std::string dcsv = csv_row({"defect", "mask", "jaccard_at_best", "best_jaccard", "best_threshold", "polarity"});
      for (std::size_t d = 0; d < defects.size(); ++d) {
        const double shared = jaccard_at(im, best_t, polarity, defects[d].get(), windows[d].get());
        irf_sweep* own_raw = nullptr;
        check(irf_threshold_sweep(im.data.data(), im.rows, im.cols, defects[d].get(), step, invert ? 1 : 0,
                                  windows[d].get(), &own_raw),
              "per-defect sweep");
        SweepPtr own(own_raw);
        double ot = 0, oj = 0;
        int op = 0;
        check(irf_sweep_best(own.get(), &ot, &oj, &op), "sweep");
        dcsv += csv_row({std::to_string(d + 1), defect_names[d], fmt(shared), fmt(oj), fmt(ot),
                         op == 0 ? "normal" : "inverted"});
        per_defect.push_back({{"defect", d + 1},
                              {"mask", defect_names[d]},
                              {"jaccard_at_best", shared},
                              {"best_jaccard", oj},
                              {"best_threshold", ot},
                              {"polarity", op == 0 ? "normal" : "inverted"}});
      }
      write_text_atomic(out.path("per_defect_" + t.name + ".csv"), dcsv);
    }
    results.push_back({{"name", t.name},
                       {"best_threshold", best_t},
                       {"best_jaccard", best_j},
                       {"polarity", polarity == 0 ? "normal" : "inverted"},
                       {"per_defect", per_defect}});
    std::printf("%-11s best_jaccard=%.4f threshold=%.2f polarity=%s\n", t.name.c_str(), best_j, best_t,
                polarity == 0 ? "normal" : "inverted");
  }

  nlohmann::json m = ctx.header();
  m["ground_truth"] = gt_path->filename().string();
  m["ground_truth_sha256"] = sha256_file(*gt_path);
  m["step"] = step;
  m["invert"] = invert;
  m["results"] = results;
  m["outputs"] = out.hashes();
  write_json(ctx.output / "evaluate.json", m);
}

}  // namespace cli
