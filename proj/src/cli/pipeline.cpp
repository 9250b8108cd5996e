#include "flexit/cli/pipeline.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

#include "flexit/cli/worker_pool.hpp"
#include "flexit/core/errors.hpp"
#include "flexit/core/resample.hpp"

namespace flexit {

std::string to_string(Method method) {
  switch (method) {
    case Method::flexit: return "flexit";
    case Method::copy: return "copy";
    case Method::encode: return "encode";
    case Method::retrieve: return "retrieve";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "flexit") return Method::flexit;
  if (text == "copy") return Method::copy;
  if (text == "encode") return Method::encode;
  if (text == "retrieve") return Method::retrieve;
  throw ConfigError("unknown method '" + text + "'");
}

QuerySet load_or_build_queries(const RunConfig& config, const ClusterRegistry& registry,
                               const ImageIndex& index) {
  if (!config.paths.queries.empty()) return read_queries_jsonl(config.paths.queries);
  return split_dev_test(build_queries(registry, index, config.query_seed), config.split_seed);
}

Workspace open_workspace(const RunConfig& config) {
  config.validate();
  if (config.paths.index.empty()) throw ConfigError("paths.index is required");
  Workspace ws{config, load_clusters(config.paths.registry, config.registry_counts),
               load_image_index(config.paths.index), {}};
  const auto all = load_or_build_queries(config, ws.registry, ws.index);
  ws.queries = filter_queries(all, config.filter, ws.registry);
  if (ws.queries.size() == 0) throw MissingData("query filter selects no queries");
  return ws;
}

std::vector<MethodOutput> run_method(const Workspace& ws, Method method, const HyperParams& hp,
                                     const BackendSet& backends) {
  const auto& queries = ws.queries.queries;
  std::vector<MethodOutput> out(queries.size());
  std::optional<OptimizerBackends> ob;
  if (method == Method::flexit) ob = make_optimizer_backends(backends, hp);
  parallel_for(queries.size(), ws.config.workers, [&](std::size_t i) {
    const auto& q = queries[i];
    switch (method) {
      case Method::flexit: {
        auto result = optimize(q, ws.index.load(q.image_id), *ob, hp, ws.config.snapshot_steps);
        out[i] = {std::move(result.output), std::move(result.trajectory)};
        break;
      }
      case Method::copy:
        out[i].image = baseline_copy(q, ws.index.load(q.image_id));
        break;
      case Method::encode:
        out[i].image = baseline_encode(q, ws.index.load(q.image_id), *backends.autoencoder);
        break;
      case Method::retrieve:
        out[i].image = baseline_retrieve(q, ws.index, hp.rng_seed);
        break;
    }
  });
  return out;
}

Evaluator::Evaluator(const Workspace& ws, const BackendSet& backends)
    : distance_(backends.evaluation_distance),
      label_group_(ws.registry.label_group()),
      resolution_(ws.config.evaluation.resolution),
      alpha_(ws.config.evaluation.alpha) {
  const auto& ev = ws.config.evaluation;
  const auto& labels = ws.registry.labels();
  extractor_ = std::make_unique<SurrogateFeatureExtractor>(ev.feature_seed, ev.feature_dim, ev.resolution);
  if (ev.classifier == "oracle") {
    std::vector<Image> prototypes;
    for (const auto& l : labels) {
      const auto it = ws.index.prototypes.find(l);
      if (it == ws.index.prototypes.end()) {
        throw MissingData("oracle classifier: no prototype for label '" + l + "'");
      }
      prototypes.push_back(ws.index.load(it->second));
    }
    classifier_ = std::make_unique<LinearProbeClassifier>(LinearProbeClassifier::from_prototypes(prototypes, labels));
  } else {
    classifier_ = std::make_unique<LinearProbeClassifier>(
        LinearProbeClassifier::random(ev.classifier_seed, 16, labels));
  }
  subset_.resize(labels.size());
  std::iota(subset_.begin(), subset_.end(), 0);

  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& l : labels) {
    const auto it = ws.index.train.find(l);
    if (it == ws.index.train.end()) continue;
    for (const auto& id : it->second) items.emplace_back(l, id);
  }
  if (items.empty()) throw MissingData("image index has no training images for the reference set");
  reference_.features.resize(static_cast<Eigen::Index>(items.size()), extractor_->dim());
  reference_.labels.resize(items.size());
  parallel_for(items.size(), ws.config.workers, [&](std::size_t i) {
    reference_.features.row(static_cast<Eigen::Index>(i)) = extractor_->extract(ws.index.load(items[i].second)).transpose();
    reference_.labels[i] = items[i].first;
  });
}

std::vector<QueryRecord> Evaluator::records(const Workspace& ws, const std::vector<Image>& outputs) const {
  const auto& queries = ws.queries.queries;
  if (outputs.size() != queries.size()) throw InvalidArgument("one output per query expected");
  std::vector<QueryRecord> out(queries.size());
  parallel_for(queries.size(), ws.config.workers, [&](std::size_t i) {
    const auto& q = queries[i];
    const Image input = ws.index.load(q.image_id);
    const auto& image = outputs[i];
    QueryRecord r;
    r.query_id = q.id;
    r.target_label = q.target_label;
    r.features = extractor_->extract(image);
    r.correct = restricted_argmax(classifier_->logits(image), subset_) == ws.registry.label_index(q.target_label);
    r.lpips_x100 = eval_perceptual(image, input, *distance_, resolution_);
    out[i] = std::move(r);
  });
  return out;
}

MetricReport Evaluator::report(const std::vector<QueryRecord>& records) const {
  return build_report(records, reference_, label_group_, alpha_);
}

std::string canonical_sweep_parameter(const std::string& name) {
  static const std::map<std::string, std::string> aliases{
      {"lambda_image", "lambda_image"}, {"lambda_I", "lambda_image"},
      {"lambda_source", "lambda_source"}, {"lambda_S", "lambda_source"},
      {"lambda_latent", "lambda_latent"}, {"lambda_z", "lambda_latent"},
      {"lambda_perceptual", "lambda_perceptual"}, {"lambda_p", "lambda_perceptual"},
      {"lr", "lr"}, {"step_size", "lr"},
      {"resolution", "resolution"}, {"encode_resolution", "resolution"},
      {"latent_norm", "latent_norm"},
      {"n_networks", "n_networks"},
      {"d", "d"}, {"augmentations", "d"}};
  const auto it = aliases.find(name);
  if (it == aliases.end()) throw ConfigError("unknown sweep parameter '" + name + "'");
  return it->second;
}

SweepSpec parse_sweep_spec(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep spec must look like name=v1,v2,...");
  SweepSpec spec{canonical_sweep_parameter(text.substr(0, eq)), {}};
  std::stringstream values(text.substr(eq + 1));
  for (std::string v; std::getline(values, v, ',');) {
    if (!v.empty()) spec.values.push_back(v);
  }
  if (spec.values.empty()) throw ConfigError("sweep grid for '" + spec.parameter + "' is empty");
  return spec;
}

namespace {

double parse_number(const std::string& parameter, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw ConfigError(parameter + ": '" + value + "' is not a number");
  return v;
}

int parse_int(const std::string& parameter, const std::string& value) {
  const double v = parse_number(parameter, value);
  if (v != static_cast<int>(v)) throw ConfigError(parameter + ": '" + value + "' is not an integer");
  return static_cast<int>(v);
}

}  // namespace

SweepPoint make_sweep_point(const RunConfig& config, const std::string& parameter, const std::string& value) {
  const auto name = canonical_sweep_parameter(parameter);
  HyperParams hp = config.hp;
  RunConfig adjusted = config;
  std::optional<int> networks;
  if (name == "lambda_image") hp.lambda_image = parse_number(name, value);
  else if (name == "lambda_source") hp.lambda_source = parse_number(name, value);
  else if (name == "lambda_latent") hp.lambda_latent = parse_number(name, value);
  else if (name == "lambda_perceptual") hp.lambda_perceptual = parse_number(name, value);
  else if (name == "lr") hp.step_size = parse_number(name, value);
  else if (name == "d") hp.augmentations = parse_int(name, value);
  else if (name == "latent_norm") hp.latent_norm = parse_latent_norm(value);
  else if (name == "resolution") {
    hp.encode_resolution = parse_int(name, value);
    adjusted.backend.erase("encode_resolution");
  } else if (name == "n_networks") {
    networks = parse_int(name, value);
  }
  hp.validate();
  SweepPoint point{hp, create_backends(adjusted, hp)};
  if (networks) {
    auto& b = point.backends;
    if (*networks < 1 || static_cast<std::size_t>(*networks) > b.image_embedders.size()) {
      throw ConfigError("n_networks must be in [1, " + std::to_string(b.image_embedders.size()) + "]");
    }
    b.image_embedders.resize(static_cast<std::size_t>(*networks));
    b.text_encoders.resize(static_cast<std::size_t>(*networks));
  }
  return point;
}

std::vector<SweepRow> run_sweep(const Workspace& ws, const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep grid is empty");
  const auto base = create_backends(ws.config, ws.config.hp);
  const Evaluator evaluator(ws, base);
  std::vector<SweepRow> rows;
  for (const auto& value : spec.values) {
    SweepRow row{spec.parameter, value, "ok", std::nullopt};
    try {
      const auto point = make_sweep_point(ws.config, spec.parameter, value);
      const auto outputs = run_method(ws, Method::flexit, point.hp, point.backends);
      std::vector<Image> images;
      for (const auto& o : outputs) images.push_back(o.image);
      row.report = evaluator.report(evaluator.records(ws, images));
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "parameter,value,status,queries,lpips_x100,accuracy_pct,csfid,sfid\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : rows) {
    out += r.parameter + "," + quote(r.value) + "," + quote(r.status) + ",";
    if (r.report) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g", r.report->query_count,
                    r.report->lpips_x100, r.report->accuracy_pct, r.report->csfid, r.report->sfid);
      out += buf;
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace flexit
