#include <cstdio>
#include <optional>

#include "commands.hpp"
#include "common.hpp"

namespace cli {

namespace {

std::string two_digits(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

std::vector<double> factor_values(const irf_model* model, char which, std::size_t& rows, std::size_t& cols) {
  check(irf_model_factor_shape(model, which, &rows, &cols), "factor shape");
  std::vector<double> v(rows * cols);
  check(irf_model_factor(model, which, v.data(), v.size()), "factor values");
  return v;
}

struct MethodResult {
  nlohmann::json summary;
};

}  // namespace

void cmd_factorize(const Context& ctx) {
  const Config& c = ctx.config;
  const auto input = c.get_path("factor", "input");
  if (!input) throw CliError(kExitUsage, "factorize: [factor] input (or --input) is required");
  const FactorSettings fs = factor_settings(c);
  const std::string selection = c.get_string("factor", "selection", c.has("factor", "roi") ? "max_roi_contrast" : "index");
  if (selection != "max_roi_contrast" && selection != "index")
    c.fail("factor", "selection", "expected 'max_roi_contrast' or 'index'");
  const int component = static_cast<int>(c.get_int("factor", "component", 0));
  MaskPtr roi;
  if (const auto p = c.get_path("factor", "roi")) roi = load_mask(*p);
  if (selection == "max_roi_contrast" && !roi)
    c.fail("factor", "selection", "max_roi_contrast needs [factor] roi");

  SequencePtr seq = load_sequence(*input);
  std::size_t rows = 0, cols = 0, frames = 0;
  check(irf_sequence_shape(seq.get(), &rows, &cols, &frames, nullptr), "sequence shape");
  const std::size_t pixels = rows * cols;

  Outputs out(ctx.output);
  // Reserve output slots in method order so parallel workers never race on
  // directory creation of shared parents.
  std::vector<MethodResult> results(fs.methods.size());
  std::vector<std::vector<std::string>> files(fs.methods.size());
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
    irf_model* raw = nullptr;
    check(irf_factorize(seq.get(), &req, &raw), "factorize " + method);
    ModelPtr model(raw);
    irf_model_info info;
    check(irf_model_get_info(model.get(), &info), "model info");

    const std::filesystem::path dir = ctx.output / method;
    std::filesystem::create_directories(dir);
    auto record = [&](const std::string& name) {
      files[mi].push_back(method + "/" + name);
      return (dir / name).string();
    };

    std::size_t r = 0, k = 0;
    std::vector<double> b = factor_values(model.get(), 'B', r, k);
    check(irf_matrix_save(b.data(), r, k, record("B.thrm").c_str()), "writing B");
    std::vector<double> a = factor_values(model.get(), 'A', r, k);
    check(irf_matrix_save(a.data(), r, k, record("A.thrm").c_str()), "writing A");
    std::optional<double> deviation;
    if (info.has_mixing) {
      std::vector<double> w = factor_values(model.get(), 'W', r, k);
      check(irf_matrix_save(w.data(), r, k, record("W.thrm").c_str()), "writing W");
      double d = 0;
      check(irf_model_convex_deviation(model.get(), &d), "convex deviation");
      deviation = d;
    }
    std::vector<double> image(pixels);
    for (int i = 0; i < info.rank; ++i) {
      check(irf_model_component(model.get(), i, image.data(), image.size()), "component");
      check(irf_image_save_pgm16(image.data(), rows, cols, record("component_" + two_digits(i + 1) + ".pgm").c_str()),
            "writing component");
    }
    int selected = 0;
    std::vector<double> scores(static_cast<std::size_t>(info.rank));
    check(irf_model_select(model.get(), roi.get(),
                           selection == "index" ? IRF_SELECT_INDEX : IRF_SELECT_MAX_ROI_CONTRAST, component,
                           &selected, image.data(), image.size(), scores.data(), scores.size()),
          "component selection (" + method + ")");
    check(irf_image_save_pgm16(image.data(), rows, cols, record("selected.pgm").c_str()), "writing selected");
    check(irf_matrix_save(image.data(), rows, cols, record("selected.thrm").c_str()), "writing selected");

    std::vector<double> history(info.history_length);
    check(irf_model_history(model.get(), history.data(), history.size()), "history");
    double centered_error = 0;
    check(irf_model_centered_error(model.get(), &centered_error), "reconstruction error");

    nlohmann::json j = ctx.header();
    j["method"] = method;
    j["rank"] = info.rank;
    j["lambda"] = info.has_lambda ? nlohmann::json(info.lambda) : nlohmann::json(nullptr);
    j["factor_seed"] = info.seed;
    j["iterations"] = info.iterations;
    j["degenerate"] = info.degenerate != 0;
    j["objective_history"] = history;
    j["centered_reconstruction_error"] = centered_error;
    j["shifted_nonnegative"] = fs.shift_nonnegative;
    j["selection"] = {{"criterion", selection}, {"index", selected}, {"scores", scores}};
    if (deviation) j["convex_deviation"] = *deviation;
    j["shapes"] = {{"B", {info.pixels, info.rank}}, {"A", {info.rank, info.frames}}};
    write_json(record("model.json"), j);

    nlohmann::json s = {{"method", method},
                        {"iterations", info.iterations},
                        {"degenerate", info.degenerate != 0},
                        {"selected_component", selected},
                        {"final_objective", history.empty() ? 0.0 : history.back()},
                        {"centered_reconstruction_error", centered_error}};
    if (deviation) s["convex_deviation"] = *deviation;
    results[mi].summary = s;
    std::printf("%-11s k=%d iterations=%d selected=%d\n", method.c_str(), info.rank, info.iterations,
                selected);
  });
  for (const auto& f : files)
    for (const auto& name : f) out.path(name);

  nlohmann::json m = ctx.header();
  m["input"] = display_path(*input, ctx.output);
  m["input_sha256"] = sha256_file(*input);
  m["rank"] = fs.rank;
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& r : results) methods.push_back(r.summary);
  m["methods"] = methods;
  m["outputs"] = out.hashes();
  write_json(ctx.output / "factorize.json", m);
}

}  // namespace cli
