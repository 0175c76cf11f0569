// hoikit command-line entry point.
#include "hoikit/cli/commands.h"
#include "hoikit/hoiopt/optimizer.h"
#include "hoikit/refine/tournament.h"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace hoikit;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2 };

struct Flags {
  std::string config;
  std::string out;
  int iters = -1;
  std::string selector;
  long long seed = -1;
  std::string params;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Flags& f, bool with_iters, bool with_selector) {
  cmd->add_option("--config", f.config, "run config JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  if (with_iters) cmd->add_option("--iters", f.iters, "optimization iterations")->check(CLI::NonNegativeNumber);
  if (with_selector) cmd->add_option("--selector", f.selector, "vlm, mock:penetration, mock:closest or mock:first");
  cmd->add_option("--seed", f.seed, "recorded in the outputs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--params", f.params, "result JSON whose params replace the initial ones")
      ->check(CLI::ExistingFile);
}

cli::RunConfig config_from(const Flags& f) {
  cli::Overrides o;
  if (!f.out.empty()) o.out = f.out;
  if (f.iters >= 0) o.iterations = f.iters;
  if (!f.selector.empty()) o.selector = f.selector;
  if (f.seed >= 0) o.seed = static_cast<std::uint64_t>(f.seed);
  if (!f.params.empty()) o.params = f.params;
  return cli::load_config(f.config, o);
}

int fail(const std::string& command, const char* kind, const std::string& message, int code) {
  std::cerr << "hoikit " << command << ": error [" << kind << "]: " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hoikit: hand-object interaction optimization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  std::vector<std::string> results;
  std::string metrics_out;
  app.add_flag("-q,--quiet", f.quiet, "only print warnings and errors");

  auto* prepare = app.add_subcommand("prepare", "build the concise mesh and the object Gaussian binding");
  add_common(prepare, f, false, false);
  auto* optimize = app.add_subcommand("optimize", "run the interaction optimization");
  add_common(optimize, f, true, false);
  auto* refine = app.add_subcommand("refine", "grid search plus tournament over the hand translation");
  add_common(refine, f, false, true);
  auto* render = app.add_subcommand("render", "render the configured state");
  add_common(render, f, false, false);
  auto* metrics = app.add_subcommand("metrics", "tabulate penetration and contact of result files");
  metrics->add_option("results", results, "result JSON files")->required()->check(CLI::ExistingFile);
  metrics->add_option("--out", metrics_out, "also write metrics.tsv into this directory");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(f.quiet ? spdlog::level::warn : spdlog::level::info);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (metrics->parsed()) {
      std::vector<fs::path> paths(results.begin(), results.end());
      const auto table = cli::cmd_metrics(paths);
      cli::write_tsv(table, std::cout);
      if (!metrics_out.empty()) {
        fs::create_directories(metrics_out);
        std::ofstream out(fs::path(metrics_out) / "metrics.tsv");
        cli::write_tsv(table, out);
        if (!out) throw IoError("cannot write metrics.tsv");
      }
      return kOk;
    }
    const cli::RunConfig config = config_from(f);
    if (prepare->parsed()) {
      const auto out = cli::cmd_prepare(config);
      std::cout << out.concise.string() << "\nwatertight " << (out.watertight ? "true" : "false") << " euler "
                << out.euler_characteristic << '\n';
    } else if (optimize->parsed()) {
      const auto out = cli::cmd_optimize(config);
      std::cout << out.result.string() << "\nmax_penetration " << out.run.initial.max_penetration << " -> "
                << out.run.final.max_penetration << " contact " << (out.run.final.contact ? "true" : "false")
                << '\n';
    } else if (refine->parsed()) {
      const auto out = cli::cmd_refine(config);
      const auto& t = out.run.translation;
      std::cout << out.result.string() << "\ntranslation " << t.x() << ' ' << t.y() << ' ' << t.z() << '\n';
    } else if (render->parsed()) {
      const auto out = cli::cmd_render(config);
      std::cout << out.image.string() << "\nsha256 " << out.sha256 << '\n';
    }
    return kOk;
  } catch (const cli::ConfigError& e) {
    return fail(command, "config", e.what(), kConfig);
  } catch (const refine::TournamentError& e) {
    return fail(command, "selector", e.what(), kRuntime);
  } catch (const hoiopt::NonFiniteLossError& e) {
    return fail(command, "optimizer", e.what(), kRuntime);
  } catch (const ParseError& e) {
    return fail(command, "parse", e.what(), kRuntime);
  } catch (const IoError& e) {
    return fail(command, "io", e.what(), kRuntime);
  } catch (const InvalidArgument& e) {
    return fail(command, "argument", e.what(), kRuntime);
  } catch (const std::exception& e) {
    return fail(command, "internal", e.what(), kRuntime);
  }
}
