#include <cmath>
#include <cstdio>

#include "commands.hpp"
#include "common.hpp"

namespace cli {

void cmd_robustness(const Context& ctx) {
  const Config& c = ctx.config;
  const auto input = c.get_path("robustness", "input");
  if (!input) throw CliError(kExitUsage, "robustness: [robustness] input (or --input) is required");
  const auto gt_path = c.get_path("robustness", "gt");
  if (!gt_path) throw CliError(kExitUsage, "robustness: [robustness] gt (or --gt) is required");
  FactorSettings fs = factor_settings(c);
  fs.methods = parse_methods(c, "robustness", "methods", fs.methods);
  std::vector<double> levels = c.get_double_list("robustness", "levels");
  if (levels.empty()) levels = {0.03, 0.10, 0.20};
  for (double l : levels)
    if (l < 0) c.fail("robustness", "levels", "noise levels must be >= 0");
  const double step = c.get_double("robustness", "step", 0.05);
  const bool invert = c.get_bool("robustness", "invert", true);

  SequencePtr seq = load_sequence(*input);
  MaskPtr gt = load_mask(*gt_path);
  MaskPtr signal = c.has("robustness", "signal_roi") ? load_mask(*c.get_path("robustness", "signal_roi"))
                                                     : copy_mask(gt.get());
  MaskPtr noise;
  if (c.has("robustness", "noise_roi")) {
    noise = load_mask(*c.get_path("robustness", "noise_roi"));
  } else {
    noise = copy_mask(signal.get());
    check(irf_mask_invert(noise.get()), "noise ROI");
  }

  Outputs out(ctx.output);
  std::vector<std::vector<irf_robustness_point>> curves(fs.methods.size());
  parallel_for(fs.methods.size(), ctx.threads, [&](std::size_t mi) {
    const std::string& method = fs.methods[mi];
    irf_factor_request req;
    irf_factor_request_default(&req);
    req.method = method.c_str();
    req.rank = fs.rank;
    req.lambda = fs.lambda_for(method);
    req.max_iter = fs.max_iter;
    req.rel_tol = fs.rel_tol;
    req.init = static_cast<irf_init>(fs.init);
    req.seed = irf_derive_seed(ctx.seed, "factorize");
    req.shift_nonnegative = fs.shift_nonnegative ? 1 : 0;
    curves[mi].resize(levels.size());
    check(irf_robustness_curve(seq.get(), &req, gt.get(), signal.get(), noise.get(), levels.data(),
                               levels.size(), step, invert ? 1 : 0, irf_derive_seed(ctx.seed, "robustness"),
                               curves[mi].data()),
          "robustness (" + method + ")");
  });

  nlohmann::json jm = nlohmann::json::array();
  for (std::size_t mi = 0; mi < fs.methods.size(); ++mi) {
    const std::string& method = fs.methods[mi];
    std::string csv = csv_row({"level_or_threshold", "jaccard", "snr", "polarity"});
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : curves[mi]) {
      csv += csv_row({fmt(p.level), fmt(p.best_jaccard), fmt(p.snr), p.polarity ? "inverted" : "normal"});
      pts.push_back({{"level", p.level},
                     {"snr", std::isfinite(p.snr) ? nlohmann::json(p.snr) : nlohmann::json(nullptr)},
                     {"snr_degenerate", p.snr_degenerate != 0},
                     {"best_jaccard", p.best_jaccard},
                     {"best_threshold", p.best_threshold},
                     {"polarity", p.polarity ? "inverted" : "normal"},
                     {"component", p.component}});
      std::printf("%-11s level=%.3f snr=%.3f best_jaccard=%.4f\n", method.c_str(), p.level, p.snr,
                  p.best_jaccard);
    }
    write_text_atomic(out.path("robustness_" + method + ".csv"), csv);
    jm.push_back({{"method", method}, {"lambda", fs.lambda_for(method)}, {"points", pts}});
  }

  nlohmann::json m = ctx.header();
  m["input_sha256"] = sha256_file(*input);
  m["rank"] = fs.rank;
  m["levels"] = levels;
  m["noise_seed"] = irf_derive_seed(ctx.seed, "robustness");
  m["methods"] = jm;
  m["outputs"] = out.hashes();
  write_json(ctx.output / "robustness.json", m);
}

}  // namespace cli
