#include <cmath>
#include <cstdio>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"

namespace cli {

namespace {

constexpr const char* kFeatures[5] = {"contrast", "dissimilarity", "homogeneity", "energy", "correlation"};

struct Subject {
  std::string id;
  std::filesystem::path sequence;
  int label = 0;
};

std::vector<Subject> read_cohort(const std::filesystem::path& path) {
  const auto rows = parse_csv(read_text(path));
  if (rows.empty()) throw CliError(kExitData, path.string() + ": empty cohort file");
  const auto& head = rows.front();
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < head.size(); ++i)
      if (head[i] == name) return i;
    throw CliError(kExitData, path.string() + ": missing column '" + name + "'");
  };
  const std::size_t c_id = column("subject_id");
  const std::size_t c_seq = column("sequence");
  const std::size_t c_label = column("label");
  std::vector<Subject> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != head.size())
      throw CliError(kExitData, path.string() + ": row " + std::to_string(r + 1) + " has " +
                                    std::to_string(row.size()) + " fields, expected " +
                                    std::to_string(head.size()));
    Subject s;
    s.id = row[c_id];
    s.sequence = row[c_seq];
    if (s.sequence.is_relative()) s.sequence = path.parent_path() / s.sequence;
    if (row[c_label] == "0") s.label = 0;
    else if (row[c_label] == "1") s.label = 1;
    else throw CliError(kExitData, path.string() + ": row " + std::to_string(r + 1) + ": label must be 0 or 1");
    out.push_back(std::move(s));
  }
  return out;
}

// "d@deg" items, e.g. "1@0, 1@90".
std::vector<irf_offset> parse_offsets(const Config& c) {
  std::vector<irf_offset> out;
  const auto items = c.get_list("texture", "offsets");
  if (items.empty()) return {{1.0, 0.0}, {1.0, M_PI / 2}};
  for (const std::string& item : items) {
    const auto at = item.find('@');
    if (at == std::string::npos) c.fail("texture", "offsets", "expected 'distance@degrees' items");
    try {
      const double d = std::stod(item.substr(0, at));
      const double deg = std::stod(item.substr(at + 1));
      if (d < 0) c.fail("texture", "offsets", "distances must be >= 0");
      out.push_back({d, deg * M_PI / 180.0});
    } catch (const std::invalid_argument&) {
      c.fail("texture", "offsets", "cannot parse offset '" + item + "'");
    }
  }
  return out;
}

nlohmann::json kruskal_json(const irf_kruskal& k) {
  return {{"h", k.h},
          {"p_value", k.p_value},
          {"p_exact", k.has_exact ? nlohmann::json(k.p_exact) : nlohmann::json(nullptr)},
          {"dof", k.dof},
          {"degenerate", k.degenerate != 0}};
}

}  // namespace

void cmd_texture(const Context& ctx) {
  const Config& c = ctx.config;
  const auto cohort_path = c.get_path("texture", "cohort");
  if (!cohort_path) throw CliError(kExitUsage, "texture: [texture] cohort (or --cohort) is required");
  const auto methods = parse_methods(c, "texture", "method", {"pct"});
  if (methods.size() != 1) c.fail("texture", "method", "exactly one method is expected");
  const std::string method = methods.front();
  const int rank = static_cast<int>(c.get_int("texture", "rank", 3));
  const int component = static_cast<int>(c.get_int("texture", "component", 0));
  const int levels = static_cast<int>(c.get_int("texture", "levels", 32));
  const bool symmetric = c.get_bool("texture", "symmetric", true);
  const bool squared = c.get_bool("texture", "squared_dissimilarity", false);
  const bool loo = c.get_bool("texture", "loo", false);
  const std::vector<irf_offset> offsets = parse_offsets(c);
  const FactorSettings fs = factor_settings(c);
  if (levels < 2) c.fail("texture", "levels", "levels must be >= 2");

  const std::vector<Subject> subjects = read_cohort(*cohort_path);
  std::vector<irf_features> feats(subjects.size());
  parallel_for(subjects.size(), ctx.threads, [&](std::size_t i) {
    SequencePtr seq = load_sequence(subjects[i].sequence);
    irf_factor_request req;
    irf_factor_request_default(&req);
    req.method = method.c_str();
    req.rank = rank;
    req.lambda = fs.lambda_for(method);
    req.max_iter = fs.max_iter;
    req.rel_tol = fs.rel_tol;
    req.init = static_cast<irf_init>(fs.init);
    req.seed = irf_derive_seed(ctx.seed, "texture");
    req.shift_nonnegative = fs.shift_nonnegative ? 1 : 0;
    irf_model* raw = nullptr;
    check(irf_factorize(seq.get(), &req, &raw), "factorize subject " + subjects[i].id);
    ModelPtr model(raw);
    std::size_t rows = 0, cols = 0;
    check(irf_sequence_shape(seq.get(), &rows, &cols, nullptr, nullptr), "sequence shape");
    std::vector<double> image(rows * cols);
    check(irf_model_select(model.get(), nullptr, IRF_SELECT_INDEX, component, nullptr, image.data(),
                           image.size(), nullptr, 0),
          "component of subject " + subjects[i].id);
    check(irf_texture_features(image.data(), rows, cols, nullptr, levels, offsets.data(), offsets.size(),
                               symmetric ? 1 : 0, squared ? 1 : 0, &feats[i], nullptr, 0),
          "texture of subject " + subjects[i].id);
  });

  Outputs out(ctx.output);
  const std::size_t n = subjects.size();
  std::vector<double> matrix(n * 5);
  std::vector<int> labels(n);
  std::string csv = csv_row({"subject_id", "contrast", "dissimilarity", "homogeneity", "energy", "correlation", "label"});
  for (std::size_t i = 0; i < n; ++i) {
    const irf_features& f = feats[i];
    const double v[5] = {f.contrast, f.dissimilarity, f.homogeneity, f.energy, f.correlation};
    for (int j = 0; j < 5; ++j) matrix[i * 5 + static_cast<std::size_t>(j)] = v[j];
    labels[i] = subjects[i].label;
    csv += csv_row({subjects[i].id, fmt(v[0]), fmt(v[1]), fmt(v[2]), fmt(v[3]), fmt(v[4]),
                    std::to_string(labels[i])});
  }
  write_text_atomic(out.path("features.csv"), csv);

  nlohmann::json kw = ctx.header();
  kw["groups"] = {{"label_1", "group_a"}, {"label_0", "group_b"}};
  for (int j = 0; j < 5; ++j) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i) (labels[i] ? a : b).push_back(matrix[i * 5 + static_cast<std::size_t>(j)]);
    irf_kruskal k;
    check(irf_kruskal_wallis(a.data(), a.size(), b.data(), b.size(), &k), std::string("Kruskal-Wallis on ") + kFeatures[j]);
    kw["features"][kFeatures[j]] = kruskal_json(k);
  }
  write_json(out.path("kruskal.json"), kw);

  irf_logistic_options lopts;
  irf_logistic_options_default(&lopts);
  irf_logistic* lraw = nullptr;
  check(irf_logistic_fit(matrix.data(), n, 5, labels.data(), &lopts, &lraw), "logistic fit");
  LogisticPtr lm(lraw);
  irf_logistic_info info;
  check(irf_logistic_get_info(lm.get(), &info), "logistic info");
  std::vector<double> coef(6), mean(5), scale(5);
  check(irf_logistic_parameters(lm.get(), coef.data(), mean.data(), scale.data()), "logistic parameters");
  double accuracy = 0, auc = 0;
  std::size_t roc_count = 0;
  std::vector<irf_roc_point> roc(n + 1);
  check(irf_logistic_eval(lm.get(), matrix.data(), n, labels.data(), &accuracy, &auc, roc.data(), roc.size(),
                          &roc_count),
        "logistic evaluation");
  roc.resize(roc_count);
  std::string roc_csv = csv_row({"threshold", "fpr", "tpr"});
  for (const auto& p : roc) roc_csv += csv_row({fmt(p.threshold), fmt(p.fpr), fmt(p.tpr)});
  write_text_atomic(out.path("roc.csv"), roc_csv);

  nlohmann::json lj = ctx.header();
  nlohmann::json jc;
  jc["intercept"] = coef[0];
  for (int j = 0; j < 5; ++j) jc[kFeatures[j]] = coef[static_cast<std::size_t>(j) + 1];
  lj["coefficients"] = jc;
  lj["standardization"] = {{"mean", mean}, {"scale", scale}};
  lj["converged"] = info.converged != 0;
  lj["separated"] = info.separated != 0;
  lj["iterations"] = info.iterations;
  lj["training_accuracy"] = accuracy;
  lj["auc"] = auc;
  if (loo) {
    double loo_acc = 0;
    check(irf_logistic_loo_accuracy(matrix.data(), n, 5, labels.data(), &lopts, &loo_acc), "leave-one-out");
    lj["loo_accuracy"] = loo_acc;
  }
  write_json(out.path("logistic.json"), lj);

  nlohmann::json m = ctx.header();
  m["cohort_sha256"] = sha256_file(*cohort_path);
  m["subjects"] = n;
  m["method"] = method;
  m["rank"] = rank;
  m["component"] = component;
  m["levels"] = levels;
  nlohmann::json jo = nlohmann::json::array();
  for (const auto& o : offsets) jo.push_back({{"distance", o.distance}, {"angle", o.angle}});
  m["offsets"] = jo;
  m["symmetric"] = symmetric;
  m["squared_dissimilarity"] = squared;
  m["outputs"] = out.hashes();
  write_json(ctx.output / "texture.json", m);
  std::printf("texture: %zu subjects, training accuracy %.3f, AUC %.3f, contrast p=%.4g\n", n, accuracy, auc,
              kw["features"]["contrast"]["p_value"].get<double>());
}

}  // namespace cli
