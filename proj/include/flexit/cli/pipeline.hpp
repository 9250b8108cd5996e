#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flexit/cli/config.hpp"
#include "flexit/dataset/baselines.hpp"
#include "flexit/metrics/evaluators.hpp"
#include "flexit/metrics/report.hpp"
#include "flexit/optimizer/optimize.hpp"

namespace flexit {

enum class Method { flexit, copy, encode, retrieve };

std::string to_string(Method method);
Method parse_method(const std::string& text);

/// Registry, image index and the filtered query list of one run.
struct Workspace {
  RunConfig config;
  ClusterRegistry registry;
  ImageIndex index;
  QuerySet queries;
};

/// Reads paths.queries when set, otherwise builds and splits queries with
/// the configured seeds.
QuerySet load_or_build_queries(const RunConfig& config, const ClusterRegistry& registry,
                               const ImageIndex& index);
Workspace open_workspace(const RunConfig& config);

struct MethodOutput {
  Image image;
  std::optional<Trajectory> trajectory;  // FlexIT only
};

/// One output per workspace query, in query order.
std::vector<MethodOutput> run_method(const Workspace& ws, Method method, const HyperParams& hp,
                                     const BackendSet& backends);

/// Feature extractor, classifier, evaluation distance and the reference
/// features (training images of every registry label), built once per run.
class Evaluator {
 public:
  Evaluator(const Workspace& ws, const BackendSet& backends);

  const FeatureSet<double>& reference() const { return reference_; }
  const FeatureExtractor& extractor() const { return *extractor_; }
  const Classifier& classifier() const { return *classifier_; }

  std::vector<QueryRecord> records(const Workspace& ws, const std::vector<Image>& outputs) const;
  MetricReport report(const std::vector<QueryRecord>& records) const;

 private:
  std::unique_ptr<FeatureExtractor> extractor_;
  std::unique_ptr<Classifier> classifier_;
  std::shared_ptr<const PerceptualDistance> distance_;
  std::vector<int> subset_;
  std::map<std::string, std::string> label_group_;
  FeatureSet<double> reference_;
  int resolution_;
  double alpha_;
};

/// One axis of a hyperparameter sweep.
struct SweepSpec {
  std::string parameter;  // canonical name, see canonical_sweep_parameter
  std::vector<std::string> values;
};

/// Maps accepted spellings (lambda_I, lambda_image, lr, d, ...) to one of
/// lambda_image, lambda_source, lambda_latent, lambda_perceptual, lr,
/// resolution, latent_norm, n_networks, d.
std::string canonical_sweep_parameter(const std::string& name);
/// "name=v1,v2,..." -> SweepSpec.
SweepSpec parse_sweep_spec(const std::string& text);

/// Hyperparameters and backends for one sweep value.
struct SweepPoint {
  HyperParams hp;
  BackendSet backends;
};
SweepPoint make_sweep_point(const RunConfig& config, const std::string& parameter, const std::string& value);

struct SweepRow {
  std::string parameter;
  std::string value;
  std::string status;  // "ok" or the error message
  std::optional<MetricReport> report;
};

/// Runs FlexIT + evaluation per grid value. Failures are recorded per row.
std::vector<SweepRow> run_sweep(const Workspace& ws, const SweepSpec& spec);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace flexit
