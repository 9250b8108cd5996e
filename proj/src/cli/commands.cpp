#include "flexit/cli/commands.hpp"

#include <cctype>
#include <fstream>

#include "flexit/core/errors.hpp"
#include "flexit/core/png_io.hpp"

namespace flexit {

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const NumericalFailure*>(&error)) return kExitNumerical;
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const InvalidArgument*>(&error)) {
    return kExitConfig;
  }
  return kExitData;
}

namespace {

std::string step_name(const std::string& stem, int step) {
  return stem + "_step" + std::to_string(step) + ".png";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingData("cannot write " + path.string());
  out << text;
}

}  // namespace

Manifest cmd_edit(const RunConfig& config, const std::filesystem::path& image_path,
                  const std::string& source_text, const std::string& target_text,
                  const std::filesystem::path& out_dir, const std::string& stem) {
  config.validate();
  const Image input = read_png(image_path);
  const auto backends = create_backends(config, config.hp);
  const auto ob = make_optimizer_backends(backends, config.hp);
  TransformQuery query;
  query.id = stem;
  query.image_id = image_path.filename().string();
  query.source_text = source_text;
  query.target_text = target_text;
  const auto result = optimize(query, input, ob, config.hp, config.snapshot_steps);

  std::vector<std::filesystem::path> files{stem + ".png", stem + ".trajectory.jsonl"};
  write_png(out_dir / files[0], result.output);
  write_trajectory_jsonl(out_dir / files[1], result.trajectory);
  for (const auto& [step, image] : result.trajectory.snapshots) {
    files.emplace_back(step_name(stem, step));
    write_png(out_dir / files.back(), image);
  }
  return write_manifest(out_dir, "edit", config_hash(config), files);
}

Manifest cmd_build_queries(const RunConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  if (config.paths.index.empty()) throw ConfigError("paths.index is required");
  const auto registry = load_clusters(config.paths.registry, config.registry_counts);
  const auto index = load_image_index(config.paths.index);
  const auto all = split_dev_test(build_queries(registry, index, config.query_seed), config.split_seed);
  write_queries_jsonl(out_dir / "queries.jsonl", filter_queries(all, config.filter, registry));
  return write_manifest(out_dir, "build-queries", config_hash(config), {"queries.jsonl"});
}

Manifest cmd_run(const RunConfig& config, Method method, const std::filesystem::path& out_dir) {
  const auto ws = open_workspace(config);
  const auto backends = create_backends(config, config.hp);
  const auto outputs = run_method(ws, method, config.hp, backends);
  std::vector<std::filesystem::path> files{"queries.jsonl"};
  write_queries_jsonl(out_dir / files[0], ws.queries);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& id = ws.queries.queries[i].id;
    files.emplace_back("outputs/" + id + ".png");
    write_png(out_dir / files.back(), outputs[i].image);
    if (!outputs[i].trajectory) continue;
    files.emplace_back("trajectories/" + id + ".jsonl");
    write_trajectory_jsonl(out_dir / files.back(), *outputs[i].trajectory);
    for (const auto& [step, image] : outputs[i].trajectory->snapshots) {
      files.emplace_back("snapshots/" + step_name(id, step));
      write_png(out_dir / files.back(), image);
    }
  }
  const std::string command = method == Method::flexit ? "run" : "baseline-" + to_string(method);
  return write_manifest(out_dir, command, config_hash(config), files);
}

namespace {

// Table label from the producing command, so the report does not depend on
// where the results live.
std::string default_method_name(const std::filesystem::path& results_dir) {
  const auto path = results_dir / "manifest.json";
  if (!std::filesystem::exists(path)) return "results";
  const auto command = read_manifest(path).command;
  if (command == "run") return "FlexIT";
  if (command.starts_with("baseline-")) {
    auto name = command.substr(9);
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    return name;
  }
  return command;
}

}  // namespace

Manifest cmd_evaluate(const RunConfig& config, const std::filesystem::path& results_dir,
                      const std::string& method_name) {
  const auto ws = open_workspace(config);
  std::vector<std::string> missing;
  for (const auto& q : ws.queries.queries) {
    if (!std::filesystem::exists(results_dir / "outputs" / (q.id + ".png"))) missing.push_back(q.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
    throw MissingData(std::to_string(missing.size()) + " output(s) missing in " +
                      (results_dir / "outputs").string() + ": " + list);
  }
  std::vector<Image> outputs;
  for (const auto& q : ws.queries.queries) outputs.push_back(read_png(results_dir / "outputs" / (q.id + ".png")));

  const auto backends = create_backends(config, config.hp);
  const Evaluator evaluator(ws, backends);
  const auto records = evaluator.records(ws, outputs);
  const auto report = evaluator.report(records);

  const auto eval_dir = results_dir / "eval";
  const std::string method = method_name.empty() ? default_method_name(results_dir) : method_name;
  write_text(eval_dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(eval_dir / "report.txt", format_report_table(report, method));
  FeatureSet<float> synth;
  synth.features.resize(static_cast<Eigen::Index>(records.size()), evaluator.extractor().dim());
  for (std::size_t i = 0; i < records.size(); ++i) {
    synth.features.row(static_cast<Eigen::Index>(i)) = records[i].features.cast<float>().transpose();
    synth.labels.push_back(records[i].target_label);
  }
  write_feature_dump(eval_dir / "features_synthetic", synth);
  FeatureSet<float> reference{evaluator.reference().features.cast<float>(), evaluator.reference().labels};
  write_feature_dump(eval_dir / "features_reference", reference);
  nlohmann::ordered_json per_query = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    per_query.push_back({{"id", r.query_id}, {"target_label", r.target_label}, {"correct", r.correct},
                         {"lpips_x100", r.lpips_x100}});
  }
  write_text(eval_dir / "per_query.json", per_query.dump(2) + "\n");
  return write_manifest(eval_dir, "evaluate", config_hash(config),
                        {"report.json", "report.txt", "per_query.json", "features_synthetic.bin",
                         "features_synthetic.json", "features_reference.bin", "features_reference.json"});
}

Manifest cmd_sweep(const RunConfig& config, const SweepSpec& spec, const std::filesystem::path& out_dir) {
  RunConfig c = config;
  if (!c.filter.split) c.filter.split = Split::dev;
  const auto ws = open_workspace(c);
  const auto rows = run_sweep(ws, spec);
  write_text(out_dir / "sweep.csv", sweep_csv(rows));
  return write_manifest(out_dir, "sweep", config_hash(c), {"sweep.csv"});
}

Manifest cmd_fixtures(const RunConfig& config, const FixtureOptions& options,
                      const std::filesystem::path& out_dir) {
  const auto registry = load_clusters(config.paths.registry, config.registry_counts);
  const auto index = generate_fixtures(registry, out_dir, options);
  std::vector<std::filesystem::path> files{"index.json"};
  for (const auto& split : {&index.val, &index.train}) {
    for (const auto& [label, ids] : *split) files.insert(files.end(), ids.begin(), ids.end());
  }
  for (const auto& [label, id] : index.prototypes) files.emplace_back(id);
  return write_manifest(out_dir, "fixtures", config_hash(config), files);
}

}  // namespace flexit
