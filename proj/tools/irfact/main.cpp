#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "common.hpp"

namespace {

struct Flag {
  std::string section, key, value;
  bool given = false;
};

// Registers `--name` on `app`; a given value is written to section.key.
Flag& add_flag(CLI::App* app, std::vector<std::unique_ptr<Flag>>& flags, const std::string& name,
               const std::string& section, const std::string& key, const std::string& help) {
  flags.push_back(std::make_unique<Flag>(Flag{section, key, "", false}));
  Flag& f = *flags.back();
  app->add_option_function<std::string>(name, [&f](const std::string& v) {
       f.value = v;
       f.given = true;
     }, help);
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal sequence factorization, defect evaluation and texture classification"};
  app.set_version_flag("--version", std::string(irf_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::optional<int> threads;
  app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed (default: general.seed or 0)");
  app.add_option("--output", output, "Output directory (default: general.output or irfact_out)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::unique_ptr<Flag>> flags;
  CLI::App* sim = app.add_subcommand("simulate", "Simulate an active specimen or a passive cohort");
  add_flag(sim, flags, "--mode", "simulate", "mode", "active or passive");
  add_flag(sim, flags, "--preset", "simulate", "preset", "Specimen preset (AL, CFRP, PLEXI)");
  add_flag(sim, flags, "--noise", "simulate", "noise", "Additive noise as a fraction of the signal range");

  CLI::App* fac = app.add_subcommand("factorize", "Factorize a thermal sequence");
  add_flag(fac, flags, "--input", "factor", "input", "Sequence file (.thrm)");
  add_flag(fac, flags, "--method", "factor", "methods", "Comma-separated methods or 'all'");
  add_flag(fac, flags, "--rank", "factor", "rank", "Number of components");
  add_flag(fac, flags, "--lambda", "factor", "lambda", "Sparsity weight");
  add_flag(fac, flags, "--roi", "factor", "roi", "Mask used for component selection");

  CLI::App* ev = app.add_subcommand("evaluate", "Score images against ground-truth masks");
  add_flag(ev, flags, "--input", "evaluate", "input", "Factorization directory or image");
  add_flag(ev, flags, "--gt", "evaluate", "gt", "Ground-truth mask");
  add_flag(ev, flags, "--defects", "evaluate", "defects", "Comma-separated per-defect masks");

  CLI::App* rob = app.add_subcommand("robustness", "Detection quality under added noise");
  add_flag(rob, flags, "--input", "robustness", "input", "Sequence file (.thrm)");
  add_flag(rob, flags, "--gt", "robustness", "gt", "Ground-truth mask");
  add_flag(rob, flags, "--levels", "robustness", "levels", "Comma-separated noise levels");
  add_flag(rob, flags, "--method", "robustness", "methods", "Comma-separated methods or 'all'");

  CLI::App* tex = app.add_subcommand("texture", "Texture features and classification of a cohort");
  add_flag(tex, flags, "--cohort", "texture", "cohort", "cohort.csv from simulate --mode passive");
  add_flag(tex, flags, "--method", "texture", "method", "Factorization method");

  CLI::App* rep = app.add_subcommand("report", "Summarize the JSON reports in a directory");
  add_flag(rep, flags, "--input", "report", "input", "Directory to scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  try {
    cli::Context ctx;
    if (!config_path.empty()) ctx.config = cli::Config::load(config_path);
    for (const auto& f : flags)
      if (f->given) ctx.config.set(f->section, f->key, f->value);
    if (seed) ctx.config.set("general", "seed", std::to_string(*seed));
    if (!output.empty()) ctx.config.set("general", "output", output);
    if (threads) ctx.config.set("general", "threads", std::to_string(*threads));

    ctx.command = app.get_subcommands().front()->get_name();
    ctx.seed = ctx.config.get_u64("general", "seed", 0);
    ctx.threads = static_cast<int>(ctx.config.get_int("general", "threads", 1));
    if (ctx.threads < 1) ctx.config.fail("general", "threads", "threads must be >= 1");
    ctx.output = ctx.config.get_path("general", "output").value_or("irfact_out");
    std::filesystem::create_directories(ctx.output);

    if (ctx.command == "simulate") cli::cmd_simulate(ctx);
    else if (ctx.command == "factorize") cli::cmd_factorize(ctx);
    else if (ctx.command == "evaluate") cli::cmd_evaluate(ctx);
    else if (ctx.command == "robustness") cli::cmd_robustness(ctx);
    else if (ctx.command == "texture") cli::cmd_texture(ctx);
    else cli::cmd_report(ctx);
  } catch (const cli::CliError& e) {
    std::fprintf(stderr, "irfact: %s\n", e.what());
    return e.code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "irfact: %s\n", e.what());
    return cli::kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "irfact: internal error: %s\n", e.what());
    return cli::kExitData;
  }
  return cli::kExitOk;
}
