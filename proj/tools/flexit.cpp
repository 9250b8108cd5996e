#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "flexit/cli/commands.hpp"
#include "flexit/core/errors.hpp"

namespace {

using namespace flexit;

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  int workers = 0;
};

RunConfig resolve_config(const GlobalOptions& g) {
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) path = env;
  }
  RunConfig base = path.empty() ? config_from_json(nlohmann::json::object()) : load_config(path);
  nlohmann::json j = to_json(base);
  for (const auto& o : g.overrides) apply_override(j, o);
  if (g.workers > 0) j["workers"] = g.workers;
  return config_from_json(j);
}

std::filesystem::path output_dir(const RunConfig& config, const std::string& flag, const char* fallback) {
  if (!flag.empty()) return flag;
  if (config.paths.output.empty()) throw ConfigError("no output directory: pass --out or set paths.output");
  return config.paths.output / fallback;
}

std::vector<int> parse_steps(const std::string& text) {
  std::vector<int> steps;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    try {
      steps.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("bad snapshot step '" + item + "'");
    }
  }
  return steps;
}

void report(const Manifest& m, const std::filesystem::path& dir) {
  std::cout << m.command << ": " << m.artifacts.size() << " artifact(s) in " << dir.string()
            << " (content " << m.content_hash() << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FlexIT latent-optimization image translation and its evaluation toolkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, std::string("JSON run config (default: $") + kConfigEnvVar + ")");
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set hyperparams.steps=20");
  app.add_option("-j,--workers", g.workers, "Worker threads");

  std::string out, image, source, target, stem = "edit", snapshots, method, results, sweep_spec;
  FixtureOptions fixture;

  auto* edit = app.add_subcommand("edit", "Transform one image");
  edit->add_option("--image", image, "Input PNG")->required();
  edit->add_option("--source", source, "Source text")->required();
  edit->add_option("--target", target, "Target text")->required();
  edit->add_option("--out", out, "Output directory");
  edit->add_option("--stem", stem, "Output file stem");
  edit->add_option("--snapshots", snapshots, "Comma-separated steps to save, e.g. 0,8,16,32,160");

  auto* build = app.add_subcommand("build-queries", "Build and split the transformation queries");
  build->add_option("--out", out, "Output directory");

  auto* run = app.add_subcommand("run", "Run FlexIT over the query set");
  run->add_option("--out", out, "Output directory");

  auto* baseline = app.add_subcommand("baseline", "Run a baseline over the query set");
  baseline->add_option("--method", method, "copy, encode or retrieve")
      ->required()
      ->check(CLI::IsMember({"copy", "encode", "retrieve"}));
  baseline->add_option("--out", out, "Output directory");

  auto* evaluate = app.add_subcommand("evaluate", "Compute metrics for a results directory");
  evaluate->add_option("--results", results, "Directory produced by run or baseline")->required();
  evaluate->add_option("--method", method, "Row label in the report table");

  auto* sweep = app.add_subcommand("sweep", "Sweep one hyperparameter");
  sweep->add_option("--param", sweep_spec, "name=v1,v2,... (lambda_I, lambda_S, lambda_z, lambda_p, lr, "
                                           "resolution, latent_norm, n_networks, d)")
      ->required();
  sweep->add_option("--out", out, "Output directory");

  auto* fixtures = app.add_subcommand("fixtures", "Generate a synthetic image corpus");
  fixtures->add_option("--out", out, "Output directory");
  fixtures->add_option("--resolution", fixture.resolution, "Image side");
  fixtures->add_option("--val-per-label", fixture.val_per_label, "Validation images per label");
  fixtures->add_option("--train-per-label", fixture.train_per_label, "Training images per label");
  fixtures->add_option("--noise", fixture.noise, "Pixel noise std");
  fixtures->add_option("--seed", fixture.seed, "Corpus seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig config = resolve_config(g);
    if (edit->parsed()) {
      if (!snapshots.empty()) config.snapshot_steps = parse_steps(snapshots);
      config.validate();
      const auto dir = output_dir(config, out, "edit");
      report(cmd_edit(config, image, source, target, dir, stem), dir);
    } else if (build->parsed()) {
      const auto dir = output_dir(config, out, "queries");
      report(cmd_build_queries(config, dir), dir);
    } else if (run->parsed()) {
      const auto dir = output_dir(config, out, "flexit");
      report(cmd_run(config, Method::flexit, dir), dir);
    } else if (baseline->parsed()) {
      const auto dir = output_dir(config, out, method.c_str());
      report(cmd_run(config, parse_method(method), dir), dir);
    } else if (evaluate->parsed()) {
      const auto m = cmd_evaluate(config, results, method);
      report(m, std::filesystem::path(results) / "eval");
      std::ifstream table(std::filesystem::path(results) / "eval" / "report.txt");
      std::cout << table.rdbuf();
    } else if (sweep->parsed()) {
      const auto dir = output_dir(config, out, "sweep");
      report(cmd_sweep(config, parse_sweep_spec(sweep_spec), dir), dir);
    } else if (fixtures->parsed()) {
      const auto dir = output_dir(config, out, "fixtures");
      report(cmd_fixtures(config, fixture, dir), dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}
