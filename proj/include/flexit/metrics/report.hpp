#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flexit/metrics/features.hpp"

namespace flexit {

/// Per-query evaluation outcome, the input to build_report.
struct QueryRecord {
  std::string query_id;
  std::string target_label;
  Eigen::VectorXd features;  // of the transformed image
  bool correct = false;      // restricted argmax hit the target label
  double lpips_x100 = 0.0;   // evaluation perceptual distance to the input, x100
};

struct GroupMetrics {
  std::string group;
  std::size_t query_count = 0;
  double csfid = 0.0;
  double failure_rate = 0.0;  // 1 - accuracy, in [0, 1]
};

struct MetricReport {
  double lpips_x100 = 0.0;
  double accuracy_pct = 0.0;
  double csfid = 0.0;
  double sfid = 0.0;
  std::size_t query_count = 0;
  std::vector<GroupMetrics> groups;
};

/// Buckets records by the group of their target label; CSFID and failure
/// rate are computed within each bucket. Unknown labels raise SchemaError.
std::vector<GroupMetrics> rollup_by_group(const std::vector<QueryRecord>& records,
                                          const FeatureSet<double>& reference,
                                          const std::map<std::string, std::string>& label_group,
                                          double alpha = 0.0);

/// Aggregates accuracy, SFID / CSFID against `reference` (labeled
/// by class) and mean LPIPS x100, plus the per-group table.
MetricReport build_report(const std::vector<QueryRecord>& records,
                          const FeatureSet<double>& reference,
                          const std::map<std::string, std::string>& label_group,
                          double alpha = 0.0);

nlohmann::ordered_json to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& j);

/// Aligned text table; main columns in the order LPIPS, Acc.%, CSFID, SFID.
std::string format_report_table(const MetricReport& report, const std::string& method);

/// Feature dump: row-major little-endian float32 in `<stem>.bin` plus a JSON
/// sidecar `<stem>.json` holding {"n", "d", "labels"}.
void write_feature_dump(const std::filesystem::path& stem, const FeatureSet<float>& features);
FeatureSet<float> read_feature_dump(const std::filesystem::path& stem);

}  // namespace flexit
