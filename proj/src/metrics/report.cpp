#include "flexit/metrics/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "flexit/core/errors.hpp"

namespace flexit {

namespace {

FeatureSet<double> synth_features(const std::vector<QueryRecord>& records) {
  FeatureSet<double> fs;
  fs.features.resize(static_cast<Eigen::Index>(records.size()), records.front().features.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].features.size() != fs.features.cols()) {
      throw InvalidArgument("query '" + records[i].query_id + "' has a feature size mismatch");
    }
    fs.features.row(static_cast<Eigen::Index>(i)) = records[i].features.transpose();
    fs.labels.push_back(records[i].target_label);
  }
  return fs;
}

double accuracy_pct(const std::vector<QueryRecord>& records) {
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.correct;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace

std::vector<GroupMetrics> rollup_by_group(const std::vector<QueryRecord>& records,
                                          const FeatureSet<double>& reference,
                                          const std::map<std::string, std::string>& label_group,
                                          double alpha) {
  std::map<std::string, std::vector<QueryRecord>> buckets;
  for (const auto& r : records) {
    const auto it = label_group.find(r.target_label);
    if (it == label_group.end()) {
      throw SchemaError("query '" + r.query_id + "': label '" + r.target_label +
                        "' is not in the registry");
    }
    buckets[it->second].push_back(r);
  }
  std::vector<GroupMetrics> out;
  for (const auto& [group, bucket] : buckets) {
    GroupMetrics g;
    g.group = group;
    g.query_count = bucket.size();
    g.csfid = csfid(reference, synth_features(bucket), alpha);
    g.failure_rate = 1.0 - accuracy_pct(bucket) / 100.0;
    out.push_back(std::move(g));
  }
  return out;
}

MetricReport build_report(const std::vector<QueryRecord>& records,
                          const FeatureSet<double>& reference,
                          const std::map<std::string, std::string>& label_group, double alpha) {
  if (records.empty()) throw InvalidArgument("build_report: no query results");
  const auto synth = synth_features(records);
  MetricReport report;
  report.query_count = records.size();
  report.accuracy_pct = accuracy_pct(records);
  report.sfid = sfid(reference, synth, alpha);
  report.csfid = csfid(reference, synth, alpha);
  double lpips = 0.0;
  for (const auto& r : records) lpips += r.lpips_x100;
  report.lpips_x100 = lpips / static_cast<double>(records.size());
  report.groups = rollup_by_group(records, reference, label_group, alpha);
  return report;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["lpips_x100"] = report.lpips_x100;
  j["accuracy_pct"] = report.accuracy_pct;
  j["csfid"] = report.csfid;
  j["sfid"] = report.sfid;
  j["query_count"] = report.query_count;
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : report.groups) {
    nlohmann::ordered_json row;
    row["group"] = g.group;
    row["query_count"] = g.query_count;
    row["csfid"] = g.csfid;
    row["failure_rate"] = g.failure_rate;
    j["groups"].push_back(row);
  }
  return j;
}

MetricReport report_from_json(const nlohmann::json& j) {
  MetricReport r;
  r.lpips_x100 = j.at("lpips_x100").get<double>();
  r.accuracy_pct = j.at("accuracy_pct").get<double>();
  r.csfid = j.at("csfid").get<double>();
  r.sfid = j.at("sfid").get<double>();
  r.query_count = j.at("query_count").get<std::size_t>();
  for (const auto& g : j.at("groups")) {
    r.groups.push_back({g.at("group").get<std::string>(), g.at("query_count").get<std::size_t>(),
                        g.at("csfid").get<double>(), g.at("failure_rate").get<double>()});
  }
  return r;
}

std::string format_report_table(const MetricReport& report, const std::string& method) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << std::left << std::setw(16) << "Method" << std::right << std::setw(9) << "LPIPS"
      << std::setw(9) << "Acc.%" << std::setw(9) << "CSFID" << std::setw(9) << "SFID" << '\n';
  out << std::left << std::setw(16) << method << std::right << std::setw(9) << report.lpips_x100
      << std::setw(9) << report.accuracy_pct << std::setw(9) << report.csfid << std::setw(9)
      << report.sfid << '\n';
  if (!report.groups.empty()) {
    out << '\n'
        << std::left << std::setw(16) << "Group" << std::right << std::setw(9) << "Queries"
        << std::setw(9) << "CSFID" << std::setw(9) << "Fail.%" << '\n';
    for (const auto& g : report.groups) {
      out << std::left << std::setw(16) << g.group << std::right << std::setw(9) << g.query_count
          << std::setw(9) << g.csfid << std::setw(9) << 100.0 * g.failure_rate << '\n';
    }
  }
  return out.str();
}

void write_feature_dump(const std::filesystem::path& stem, const FeatureSet<float>& fs) {
  fs.validate();
  auto bin = stem;
  bin += ".bin";
  auto meta = stem;
  meta += ".json";
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = fs.features;
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw MissingData("cannot write '" + bin.string() + "'");
  out.write(reinterpret_cast<const char*>(rows.data()),
            static_cast<std::streamsize>(rows.size() * sizeof(float)));
  nlohmann::ordered_json j;
  j["n"] = fs.rows();
  j["d"] = fs.dim();
  j["labels"] = fs.labels;
  std::ofstream(meta, std::ios::binary) << j.dump(2) << '\n';
}

FeatureSet<float> read_feature_dump(const std::filesystem::path& stem) {
  auto bin = stem;
  bin += ".bin";
  auto meta = stem;
  meta += ".json";
  std::ifstream meta_in(meta);
  if (!meta_in) throw MissingData("cannot read '" + meta.string() + "'");
  const auto j = nlohmann::json::parse(meta_in);
  const auto n = j.at("n").get<Eigen::Index>();
  const auto d = j.at("d").get<Eigen::Index>();
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(n, d);
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw MissingData("cannot read '" + bin.string() + "'");
  in.read(reinterpret_cast<char*>(rows.data()), static_cast<std::streamsize>(n * d * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(n * d * sizeof(float))) {
    throw SchemaError("feature dump '" + bin.string() + "' is shorter than n * d floats");
  }
  FeatureSet<float> fs;
  fs.features = rows;
  fs.labels = j.value("labels", std::vector<std::string>{});
  fs.validate();
  return fs;
}

}  // namespace flexit
