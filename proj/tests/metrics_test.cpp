#include <gtest/gtest.h>

#include <filesystem>

#include "flexit/backends/surrogates.hpp"
#include "flexit/metrics/evaluators.hpp"
#include "flexit/metrics/features.hpp"
#include "flexit/metrics/report.hpp"
#include "test_util.hpp"

namespace flexit {
namespace {

using testing::random_image;

FeatureSet<double> gaussian_set(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                                double shift = 0.0, double scale = 1.0) {
  Rng rng = make_rng({seed, 0xfeu});
  FeatureSet<double> fs;
  fs.features.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) fs.features(i, j) = shift + scale * standard_normal(rng);
  }
  return fs;
}

// Two-pass mean/std written with plain loops.
std::pair<std::vector<double>, std::vector<double>> two_pass_stats(const Eigen::MatrixXd& x) {
  std::vector<double> mean(x.cols(), 0.0), sd(x.cols(), 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) mean[j] += x(i, j);
    mean[j] /= static_cast<double>(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) sd[j] += (x(i, j) - mean[j]) * (x(i, j) - mean[j]);
    sd[j] = std::sqrt(sd[j] / static_cast<double>(x.rows()));
  }
  return {mean, sd};
}

TEST(FeatureStats, SingleRow) {
  FeatureSet<double> fs;
  fs.features = Eigen::RowVector3d(1, -2, 5);
  const auto s = feature_stats(fs);
  EXPECT_EQ(s.mean, Eigen::Vector3d(1, -2, 5));
  EXPECT_EQ(s.std, Eigen::Vector3d::Zero());
}

TEST(FeatureStats, TwoRowsArithmetic) {
  FeatureSet<double> fs;
  fs.features.resize(2, 2);
  fs.features << 0, 0, 2, 2;
  const auto s = feature_stats(fs);
  EXPECT_EQ(s.mean, Eigen::Vector2d(1, 1));
  EXPECT_EQ(s.std, Eigen::Vector2d(1, 1));
}

TEST(FeatureStats, MatchesTwoPassOracle) {
  const auto fs = gaussian_set(1000, 16, 1, 0.3, 2.0);
  const auto s = feature_stats(fs);
  const auto [mean, sd] = two_pass_stats(fs.features);
  for (int j = 0; j < 16; ++j) {
    EXPECT_NEAR(s.mean[j], mean[j], 1e-10);
    EXPECT_NEAR(s.std[j], sd[j], 1e-10);
  }
  EXPECT_THROW(feature_stats(FeatureSet<double>{}), InvalidArgument);
}

TEST(Sfid, IdenticalSetsGiveZero) {
  const auto fs = gaussian_set(50, 8, 2);
  for (double alpha : {0.0, 0.5, 1.0, 10.0}) EXPECT_EQ(sfid(fs, fs, alpha), 0.0);
}

TEST(Sfid, MeanDistanceArithmetic) {
  FeatureSet<double> r, s;
  r.features = Eigen::RowVector2d(0, 0);
  s.features = Eigen::RowVector2d(3, 4);
  EXPECT_DOUBLE_EQ(sfid(r, s, 0.0), 25.0);
}

TEST(Sfid, TermByTermOracleAndSymmetry) {
  const auto r = gaussian_set(1000, 16, 3);
  const auto s = gaussian_set(700, 16, 4, 0.2, 1.5);
  const auto [mr, sr] = two_pass_stats(r.features);
  const auto [ms, ss] = two_pass_stats(s.features);
  double mean_term = 0, std_term = 0;
  for (int j = 0; j < 16; ++j) {
    mean_term += (mr[j] - ms[j]) * (mr[j] - ms[j]);
    std_term += (sr[j] - ss[j]) * (sr[j] - ss[j]);
  }
  EXPECT_LE(std::abs(sfid(r, s, 1.0) - (mean_term + std_term)) / (mean_term + std_term), 1e-9);
  EXPECT_LE(std::abs(sfid(r, s, 0.0) - mean_term) / mean_term, 1e-9);
  EXPECT_EQ(sfid(r, s, 1.0), sfid(s, r, 1.0));
  EXPECT_GE(sfid(r, s, 0.0), 0.0);
}

TEST(Sfid, DimensionMismatch) {
  EXPECT_THROW(sfid(gaussian_set(3, 4, 5), gaussian_set(3, 5, 6), 0.0), InvalidArgument);
}

TEST(Sfid, FloatInstantiation) {
  FeatureSet<float> r, s;
  r.features = Eigen::RowVector2f(0, 0);
  s.features = Eigen::RowVector2f(3, 4);
  EXPECT_FLOAT_EQ(sfid(r, s), 25.0f);
}

FeatureSet<double> labeled(std::vector<std::pair<std::string, Eigen::VectorXd>> rows) {
  FeatureSet<double> fs;
  fs.features.resize(static_cast<Eigen::Index>(rows.size()), rows.front().second.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    fs.features.row(static_cast<Eigen::Index>(i)) = rows[i].second.transpose();
    fs.labels.push_back(rows[i].first);
  }
  return fs;
}

TEST(Csfid, SingleLabelEqualsSfid) {
  auto r = gaussian_set(40, 6, 7);
  auto s = gaussian_set(9, 6, 8, 0.5);
  r.labels.assign(40, "tench");
  s.labels.assign(9, "tench");
  EXPECT_EQ(csfid(r, s, 0.0), sfid(r, s, 0.0));
  EXPECT_EQ(csfid(r, s, 1.0), sfid(r, s, 1.0));
}

TEST(Csfid, AveragesPerLabelScores) {
  const auto real = labeled({{"a", Eigen::Vector2d(0, 0)}, {"b", Eigen::Vector2d(0, 0)}});
  const auto synth = labeled({{"a", Eigen::Vector2d(1, 3)}, {"b", Eigen::Vector2d(5, std::sqrt(5.0))}});
  EXPECT_NEAR(csfid(real, synth, 0.0), 20.0, 1e-12);
}

TEST(Csfid, MatchesBruteForceLoop) {
  auto real = gaussian_set(500, 16, 9);
  auto synth = gaussian_set(120, 16, 10, 0.1);
  const std::vector<std::string> names{"ant", "bee", "cat", "dog", "eel"};
  for (Eigen::Index i = 0; i < real.rows(); ++i) real.labels.push_back(names[i % 5]);
  for (Eigen::Index i = 0; i < synth.rows(); ++i) synth.labels.push_back(names[(i * 3) % 5]);
  for (double alpha : {0.0, 1.0}) {
    double brute = 0;
    for (const auto& name : names) {
      std::vector<Eigen::Index> ri, si;
      for (Eigen::Index i = 0; i < real.rows(); ++i) if (real.labels[i] == name) ri.push_back(i);
      for (Eigen::Index i = 0; i < synth.rows(); ++i) if (synth.labels[i] == name) si.push_back(i);
      const Eigen::MatrixXd rm = real.features(ri, Eigen::all);
      const Eigen::MatrixXd sm = synth.features(si, Eigen::all);
      const auto [mr, sr] = two_pass_stats(rm);
      const auto [ms, ss] = two_pass_stats(sm);
      for (int j = 0; j < 16; ++j) {
        brute += (mr[j] - ms[j]) * (mr[j] - ms[j]) + alpha * (sr[j] - ss[j]) * (sr[j] - ss[j]);
      }
    }
    EXPECT_NEAR(csfid(real, synth, alpha), brute / 5.0, 1e-10);
  }
}

TEST(Csfid, MissingReferenceNamesTheLabel) {
  const auto real = labeled({{"a", Eigen::Vector2d(0, 0)}});
  const auto synth = labeled({{"a", Eigen::Vector2d(1, 3)}, {"zebra", Eigen::Vector2d(0, 1)}});
  try {
    csfid(real, synth, 0.0);
    FAIL();
  } catch (const MissingReference& e) {
    EXPECT_EQ(e.label(), "zebra");
  }
}

class TableClassifier final : public Classifier {
 public:
  TableClassifier(std::vector<std::string> vocab, std::vector<Eigen::VectorXd> rows)
      : vocab_(std::move(vocab)), rows_(std::move(rows)) {}
  std::string name() const override { return "table"; }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  // Image (0,0,0) pixel * 255 selects the row.
  Eigen::VectorXd logits(const Image& image) const override {
    return rows_.at(static_cast<std::size_t>(std::lround(image(0, 0, 0) * 255)));
  }

 private:
  std::vector<std::string> vocab_;
  std::vector<Eigen::VectorXd> rows_;
};

Image tagged_image(int tag) { return Image::filled(8, 8, tag / 255.0); }

TEST(RestrictedAccuracy, ForcedCases) {
  const TableClassifier clf({"a", "b", "c", "d"}, {Eigen::Vector4d(0, 5, 1, 2),   // b maximal
                                                   Eigen::Vector4d(9, 1, 3, 2),   // a masked out
                                                   Eigen::Vector4d(0, 4, 4, 1)}); // tie b/c
  const std::vector<int> subset{1, 2, 3};
  EXPECT_EQ(restricted_accuracy({tagged_image(0)}, {1}, clf, subset), 100.0);
  EXPECT_EQ(restricted_accuracy({tagged_image(1)}, {2}, clf, subset), 100.0);
  EXPECT_EQ(restricted_accuracy({tagged_image(2)}, {1}, clf, subset), 100.0);
  EXPECT_EQ(restricted_accuracy({tagged_image(2)}, {2}, clf, subset), 0.0);
  EXPECT_EQ(restricted_accuracy({tagged_image(0), tagged_image(1)}, {1, 1}, clf, subset), 50.0);
  EXPECT_THROW(restricted_accuracy({tagged_image(0)}, {0}, clf, subset), InvalidArgument);
}

TEST(RestrictedAccuracy, MatchesBruteForceAndIsMonotoneInvariant) {
  std::vector<std::string> vocab;
  for (int i = 0; i < 30; ++i) vocab.push_back("label" + std::to_string(i));
  const auto probe = LinearProbeClassifier::random(3, 8, vocab);
  std::vector<int> subset;
  for (int i = 0; i < 30; i += 2) subset.push_back(i);
  std::vector<Image> images;
  std::vector<int> targets;
  Rng rng = make_rng({4});
  for (int k = 0; k < 200; ++k) {
    images.push_back(random_image(16, 16, 1000 + k));
    targets.push_back(subset[uniform_index(rng, subset.size())]);
  }
  int hits = 0;
  for (int k = 0; k < 200; ++k) {
    const auto l = probe.logits(images[k]);
    int best = subset[0];
    for (int idx : subset) if (l[idx] > l[best]) best = idx;
    hits += best == targets[k];
  }
  const double acc = restricted_accuracy(images, targets, probe, subset);
  EXPECT_DOUBLE_EQ(acc, hits / 2.0);
  for (int k = 0; k < 200; ++k) {
    const auto l = probe.logits(images[k]);
    const Eigen::VectorXd t = (3.0 * l.array() + 1.0).exp().matrix();
    EXPECT_EQ(restricted_argmax(l, subset), restricted_argmax(t, subset));
  }
}

TEST(RestrictedAccuracy, PrototypeProbeFindsNearestPrototype) {
  std::vector<Image> protos{Image::filled(8, 8, 0.1), Image::filled(8, 8, 0.5),
                            Image::filled(8, 8, 0.9)};
  const auto probe = LinearProbeClassifier::from_prototypes(protos, {"x", "y", "z"});
  EXPECT_EQ(restricted_argmax(probe.logits(Image::filled(8, 8, 0.6)), {0, 1, 2}), 1);
  EXPECT_EQ(restricted_argmax(probe.logits(Image::filled(8, 8, 0.6)), {0, 2}), 2);
}

TEST(EvalPerceptual, IdentitySymmetryAndScaling) {
  PyramidPerceptualDistance pd(91);
  const auto a = random_image(20, 20, 1);
  EXPECT_EQ(eval_perceptual(a, a, pd, 32), 0.0);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto x = random_image(24, 24, 10 + k);
    const auto y = random_image(16, 16, 40 + k);
    const double v = eval_perceptual(x, y, pd, 32);
    EXPECT_NEAR(v, eval_perceptual(y, x, pd, 32), 1e-12);
    EXPECT_NEAR(v, 100.0 * pd.distance(resize(x, 32, 32), resize(y, 32, 32)), 1e-12);
  }
}

TEST(SurrogateFeatures, DeterministicAndSized) {
  SurrogateFeatureExtractor fx(5, 12, 64, 8);
  const auto img = random_image(20, 20, 2);
  EXPECT_EQ(fx.extract(img).size(), 12);
  EXPECT_EQ(fx.extract(img), fx.extract(img));
}

std::vector<QueryRecord> toy_records() {
  // Two groups; features are 1-D so hand computation is easy.
  return {{"q0", "a", Eigen::VectorXd::Constant(1, 1.0), true, 2.0},
          {"q1", "a", Eigen::VectorXd::Constant(1, 3.0), false, 4.0},
          {"q2", "b", Eigen::VectorXd::Constant(1, 5.0), true, 6.0},
          {"q3", "c", Eigen::VectorXd::Constant(1, 0.0), true, 0.0}};
}

FeatureSet<double> toy_reference() {
  return labeled({{"a", Eigen::VectorXd::Constant(1, 0.0)},
                  {"b", Eigen::VectorXd::Constant(1, 4.0)},
                  {"c", Eigen::VectorXd::Constant(1, 1.0)},
                  {"c", Eigen::VectorXd::Constant(1, 3.0)}});
}

TEST(Report, TwoGroupHandComputation) {
  const std::map<std::string, std::string> groups{{"a", "g1"}, {"b", "g2"}, {"c", "g2"}};
  const auto report = build_report(toy_records(), toy_reference(), groups);
  EXPECT_EQ(report.query_count, 4u);
  EXPECT_DOUBLE_EQ(report.accuracy_pct, 75.0);
  EXPECT_DOUBLE_EQ(report.lpips_x100, 3.0);
  // reference mean 2, synthetic mean 2.25
  EXPECT_DOUBLE_EQ(report.sfid, 0.0625);
  // per label: a (0 vs 2) -> 4, b (4 vs 5) -> 1, c (2 vs 0) -> 4
  EXPECT_DOUBLE_EQ(report.csfid, 3.0);
  ASSERT_EQ(report.groups.size(), 2u);
  EXPECT_EQ(report.groups[0].group, "g1");
  EXPECT_DOUBLE_EQ(report.groups[0].csfid, 4.0);
  EXPECT_DOUBLE_EQ(report.groups[0].failure_rate, 0.5);
  EXPECT_DOUBLE_EQ(report.groups[1].csfid, 2.5);
  EXPECT_DOUBLE_EQ(report.groups[1].failure_rate, 0.0);
  std::size_t total = 0;
  for (const auto& g : report.groups) total += g.query_count;
  EXPECT_EQ(total, report.query_count);
}

TEST(Report, SingleGroupRollupEqualsGlobal) {
  const std::map<std::string, std::string> groups{{"a", "all"}, {"b", "all"}, {"c", "all"}};
  const auto report = build_report(toy_records(), toy_reference(), groups);
  ASSERT_EQ(report.groups.size(), 1u);
  EXPECT_EQ(report.groups[0].csfid, report.csfid);
  EXPECT_DOUBLE_EQ(1.0 - report.groups[0].failure_rate, report.accuracy_pct / 100.0);
}

TEST(Report, UnknownLabelIsSchemaError) {
  EXPECT_THROW(build_report(toy_records(), toy_reference(), {{"a", "g"}}), SchemaError);
}

TEST(Report, JsonAndTableFormat) {
  const std::map<std::string, std::string> groups{{"a", "g1"}, {"b", "g2"}, {"c", "g2"}};
  const auto report = build_report(toy_records(), toy_reference(), groups);
  const auto j = to_json(report);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys[0], "lpips_x100");
  EXPECT_EQ(keys[1], "accuracy_pct");
  EXPECT_EQ(keys[2], "csfid");
  EXPECT_EQ(keys[3], "sfid");
  const auto back = report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.csfid, report.csfid);
  EXPECT_EQ(back.groups.size(), 2u);
  const auto table = format_report_table(report, "Copy");
  const auto header = table.substr(0, table.find('\n'));
  EXPECT_LT(header.find("LPIPS"), header.find("Acc.%"));
  EXPECT_LT(header.find("Acc.%"), header.find("CSFID"));
  EXPECT_LT(header.find("CSFID"), header.find(" SFID"));
}

TEST(FeatureDump, RoundTrip) {
  FeatureSet<float> fs;
  fs.features = gaussian_set(7, 5, 11).features.cast<float>();
  fs.labels = {"a", "b", "c", "a", "b", "c", "a"};
  const auto stem = std::filesystem::temp_directory_path() / "flexit_features_test";
  write_feature_dump(stem, fs);
  const auto back = read_feature_dump(stem);
  EXPECT_EQ(back.features, fs.features);
  EXPECT_EQ(back.labels, fs.labels);
}

}  // namespace
}  // namespace flexit
