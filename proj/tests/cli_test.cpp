#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "flexit/cli/commands.hpp"
#include "flexit/cli/worker_pool.hpp"
#include "flexit/core/errors.hpp"
#include "flexit/core/png_io.hpp"
#include "test_util.hpp"

namespace flexit {
namespace {

namespace fs = std::filesystem;
using testing::make_corpus;

std::size_t count_lines(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = config_from_json(nlohmann::json::object());
  EXPECT_EQ(c.backend_id(), "surrogate");
  EXPECT_EQ(c.hp.steps, 160);
  EXPECT_EQ(c.hp.latent_norm, LatentNorm::L21);
  EXPECT_EQ(c.workers, 1);
  EXPECT_TRUE(fs::exists(c.paths.registry));
  auto j = nlohmann::json::parse(R"({
    "backend": {"id": "surrogate", "autoencoder": "identity"},
    "hyperparams": {"steps": 12, "latent_norm": "L1", "lambda_perceptual": 0.3},
    "paths": {"index": "corpus/index.json", "output": "runs"},
    "filter": {"split": "dev", "cluster": "equine", "limit": 5},
    "snapshot_steps": [0, 12], "workers": 3,
    "evaluation": {"classifier": "probe", "alpha": 1.0}
  })");
  const auto d = config_from_json(j, "/base");
  EXPECT_EQ(d.hp.steps, 12);
  EXPECT_EQ(d.hp.latent_norm, LatentNorm::L1);
  EXPECT_EQ(d.paths.index, fs::path("/base/corpus/index.json"));
  EXPECT_EQ(d.filter.split, Split::dev);
  EXPECT_EQ(d.filter.limit, 5u);
  EXPECT_EQ(d.backend["autoencoder"], "identity");
  const auto e = config_from_json(nlohmann::json::parse(to_json(d).dump()));
  EXPECT_EQ(to_json(e), to_json(d));
  EXPECT_EQ(config_hash(e), config_hash(d));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"hyperparms": {}})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"hyperparams": {"steps": "many"}})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"hyperparams": {"step_size": 0}})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"hyperparams": {"latent_norm": "L3"}})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"snapshot_steps": [200]})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"workers": 0})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"filter": {"split": "train"}})")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, OverridesAndHash) {
  auto j = to_json(config_from_json(nlohmann::json::object()));
  nlohmann::json doc = nlohmann::json::parse(j.dump());
  apply_override(doc, "hyperparams.steps=7");
  apply_override(doc, "filter.cluster=equine");
  apply_override(doc, "paths.output=/tmp/elsewhere");
  const auto c = config_from_json(doc);
  EXPECT_EQ(c.hp.steps, 7);
  EXPECT_EQ(c.filter.cluster, "equine");
  EXPECT_THROW(apply_override(doc, "novalue"), ConfigError);
  auto a = c;
  a.paths.output = "/somewhere/else";
  EXPECT_EQ(config_hash(a), config_hash(c));
  a.hp.rng_seed = 1;
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(Config, SurrogateBackendFollowsHyperparams) {
  auto c = config_from_json(nlohmann::json::object());
  c.hp.encode_resolution = 24;
  const auto b = create_backends(c, c.hp);
  EXPECT_EQ(b.autoencoder->native_resolution(), 24);
  c.backend = {{"id", "nope"}};
  EXPECT_THROW(create_backends(c, c.hp), ConfigError);
}

TEST(WorkerPool, EveryIndexOnceAndLowestErrorWins) {
  for (int workers : {1, 3, 8}) {
    std::vector<int> hits(100, 0);
    parallel_for(100, workers, [&](std::size_t i) { hits[i] += static_cast<int>(i); });
    for (int i = 0; i < 100; ++i) EXPECT_EQ(hits[i], i);
    try {
      parallel_for(50, workers, [](std::size_t i) {
        if (i == 17 || i == 40) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "17");
    }
  }
}

TEST(Manifest, WriteReadAndHash) {
  const auto dir = fs::temp_directory_path() / "flexit_manifest_test";
  fs::remove_all(dir);
  fs::create_directories(dir / "sub");
  std::ofstream(dir / "b.txt") << "beta";
  std::ofstream(dir / "sub" / "a.txt") << "alpha";
  const auto m = write_manifest(dir, "test", "cafe", {"b.txt", dir / "sub" / "a.txt"});
  ASSERT_EQ(m.artifacts.size(), 2u);
  EXPECT_EQ(m.artifacts[0].path, "b.txt");
  EXPECT_EQ(m.artifacts[1].path, "sub/a.txt");
  EXPECT_EQ(m.artifacts[0].bytes, 4u);
  const auto back = read_manifest(dir / "manifest.json");
  EXPECT_EQ(back.artifacts, m.artifacts);
  EXPECT_EQ(back.content_hash(), m.content_hash());
  std::ofstream(dir / "b.txt") << "!";
  EXPECT_NE(write_manifest(dir, "test", "cafe", {"b.txt", "sub/a.txt"}).content_hash(), m.content_hash());
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), kExitConfig);
  EXPECT_EQ(exit_code_for(InvalidArgument("x")), kExitConfig);
  EXPECT_EQ(exit_code_for(SchemaError("x")), kExitData);
  EXPECT_EQ(exit_code_for(MissingData("x")), kExitData);
  EXPECT_EQ(exit_code_for(MissingReference("x")), kExitData);
  EXPECT_EQ(exit_code_for(NumericalFailure("x", 3)), kExitNumerical);
}

TEST(Sweep, ParameterParsing) {
  EXPECT_EQ(canonical_sweep_parameter("lambda_p"), "lambda_perceptual");
  EXPECT_EQ(canonical_sweep_parameter("lambda_z"), "lambda_latent");
  EXPECT_EQ(canonical_sweep_parameter("lambda_I"), "lambda_image");
  EXPECT_EQ(canonical_sweep_parameter("lambda_S"), "lambda_source");
  EXPECT_EQ(canonical_sweep_parameter("augmentations"), "d");
  EXPECT_THROW(canonical_sweep_parameter("momentum"), ConfigError);
  const auto spec = parse_sweep_spec("lambda_p=0.05,0.1,0.15,0.2");
  EXPECT_EQ(spec.parameter, "lambda_perceptual");
  EXPECT_EQ(spec.values.size(), 4u);
  EXPECT_THROW(parse_sweep_spec("lambda_p="), ConfigError);
  EXPECT_THROW(parse_sweep_spec("lambda_p"), ConfigError);
}

TEST(Sweep, PointsApplyOneParameter) {
  auto c = config_from_json(nlohmann::json::object());
  c.hp.encode_resolution = 16;
  EXPECT_EQ(make_sweep_point(c, "lambda_I", "0.5").hp.lambda_image, 0.5);
  EXPECT_EQ(make_sweep_point(c, "lambda_S", "0.1").hp.lambda_source, 0.1);
  EXPECT_EQ(make_sweep_point(c, "lambda_z", "0").hp.lambda_latent, 0.0);
  EXPECT_EQ(make_sweep_point(c, "lambda_p", "0.2").hp.lambda_perceptual, 0.2);
  EXPECT_EQ(make_sweep_point(c, "lr", "0.1").hp.step_size, 0.1);
  EXPECT_EQ(make_sweep_point(c, "d", "4").hp.augmentations, 4);
  EXPECT_EQ(make_sweep_point(c, "latent_norm", "L2").hp.latent_norm, LatentNorm::L2);
  const auto r = make_sweep_point(c, "resolution", "24");
  EXPECT_EQ(r.hp.encode_resolution, 24);
  EXPECT_EQ(r.backends.autoencoder->native_resolution(), 24);
  const auto n = make_sweep_point(c, "n_networks", "2");
  EXPECT_EQ(n.backends.image_embedders.size(), 2u);
  EXPECT_EQ(n.backends.text_encoders.size(), 2u);
  EXPECT_THROW(make_sweep_point(c, "n_networks", "9"), ConfigError);
  EXPECT_THROW(make_sweep_point(c, "lambda_p", "abc"), ConfigError);
  EXPECT_THROW(make_sweep_point(c, "d", "1.5"), ConfigError);
}

TEST(Commands, EditZeroStepsIsAutoencoderRoundTrip) {
  const auto corpus = make_corpus("edit0");
  auto c = corpus.config;
  c.hp.steps = 0;
  const auto index = load_image_index(c.paths.index);
  const auto image_path = index.resolve(index.val.at("tabby")[0]);
  const auto out = corpus.dir / "edit";
  const auto m = cmd_edit(c, image_path, "tabby", "lynx", out);
  EXPECT_EQ(m.artifacts.size(), 2u);
  const auto backends = create_backends(c, c.hp);
  const auto input = read_png(image_path);
  const auto expected = backends.autoencoder->decode(backends.autoencoder->encode(input));
  const auto got = read_png(out / "edit.png");
  for (Eigen::Index i = 0; i < got.pixels().size(); ++i) {
    EXPECT_NEAR(got.pixels().data()[i], std::round(255 * expected.pixels().data()[i]) / 255, 1e-12);
  }
  EXPECT_EQ(count_lines(out / "edit.trajectory.jsonl"), 1u);
}

TEST(Commands, EditSnapshotsAndDeterminism) {
  const auto corpus = make_corpus("edit_snap");
  auto c = corpus.config;
  c.snapshot_steps = {0, 8, 16, 32, 160};
  const auto index = load_image_index(c.paths.index);
  const auto image_path = index.resolve(index.val.at("sorrel")[1]);
  const auto a = cmd_edit(c, image_path, "sorrel", "zebra", corpus.dir / "a");
  const auto b = cmd_edit(c, image_path, "sorrel", "zebra", corpus.dir / "b");
  int snapshots = 0;
  for (const auto& e : fs::directory_iterator(corpus.dir / "a")) {
    snapshots += e.path().filename().string().find("_step") != std::string::npos;
  }
  EXPECT_EQ(snapshots, 5);
  EXPECT_EQ(count_lines(corpus.dir / "a" / "edit.trajectory.jsonl"), 161u);
  EXPECT_EQ(a.artifacts, b.artifacts);
  EXPECT_EQ(slurp(corpus.dir / "a" / "edit.png"), slurp(corpus.dir / "b" / "edit.png"));
}

TEST(Commands, BuildQueriesOnShippedRegistry) {
  const auto corpus = make_corpus("queries_full", true);
  auto c = corpus.config;
  cmd_build_queries(c, corpus.dir / "all");
  EXPECT_EQ(count_lines(corpus.dir / "all" / "queries.jsonl"), 2184u);
  c.filter.split = Split::dev;
  cmd_build_queries(c, corpus.dir / "dev");
  EXPECT_EQ(count_lines(corpus.dir / "dev" / "queries.jsonl"), 1092u);
  const auto back = read_queries_jsonl(corpus.dir / "all" / "queries.jsonl");
  const auto registry = load_clusters(c.paths.registry);
  const auto index = load_image_index(c.paths.index);
  const auto direct = split_dev_test(build_queries(registry, index, c.query_seed), c.split_seed);
  EXPECT_EQ(back.queries, direct.queries);
  EXPECT_EQ(back.splits, direct.splits);
}

class ToyRuns : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = make_corpus("toy_runs");
    config_ = corpus_.config;
    config_.hp.steps = 10;
    config_.workers = 2;
  }
  testing::Corpus corpus_;
  RunConfig config_;
};

TEST_F(ToyRuns, BaselinesProduceOneImagePerQuery) {
  const auto ws = open_workspace(config_);
  ASSERT_EQ(ws.queries.size(), 64u);
  for (const auto* name : {"copy", "encode", "retrieve"}) {
    const auto m = cmd_run(config_, parse_method(name), corpus_.dir / name);
    EXPECT_EQ(m.artifacts.size(), 65u) << name;
    for (const auto& q : ws.queries.queries) {
      EXPECT_TRUE(fs::exists(corpus_.dir / name / "outputs" / (q.id + ".png")));
    }
  }
  // retrieve: every output is a validation image of the target label
  for (const auto& q : ws.queries.queries) {
    const auto out = slurp(corpus_.dir / "retrieve" / "outputs" / (q.id + ".png"));
    bool found = false;
    for (const auto& id : ws.index.val.at(q.target_label)) {
      found |= read_png(ws.index.resolve(id)) == read_png(corpus_.dir / "retrieve" / "outputs" / (q.id + ".png"));
    }
    EXPECT_TRUE(found) << q.id;
  }
}

TEST_F(ToyRuns, EncodeEqualsCopyUnderIdentityAutoencoder) {
  config_.backend["autoencoder"] = "identity";
  cmd_run(config_, Method::copy, corpus_.dir / "copy");
  cmd_run(config_, Method::encode, corpus_.dir / "encode");
  const auto ws = open_workspace(config_);
  for (const auto& q : ws.queries.queries) {
    EXPECT_EQ(slurp(corpus_.dir / "copy" / "outputs" / (q.id + ".png")),
              slurp(corpus_.dir / "encode" / "outputs" / (q.id + ".png")));
  }
}

TEST_F(ToyRuns, EvaluateCopyAndRecomputation) {
  cmd_run(config_, Method::copy, corpus_.dir / "copy");
  const auto m = cmd_evaluate(config_, corpus_.dir / "copy");
  EXPECT_EQ(m.artifacts.size(), 7u);
  const auto report = report_from_json(nlohmann::json::parse(slurp(corpus_.dir / "copy" / "eval" / "report.json")));
  EXPECT_EQ(report.lpips_x100, 0.0);
  EXPECT_EQ(report.query_count, 64u);
  // independent recomputation from the dumped features
  const auto synth = read_feature_dump(corpus_.dir / "copy" / "eval" / "features_synthetic");
  const auto ref = read_feature_dump(corpus_.dir / "copy" / "eval" / "features_reference");
  const auto ws = open_workspace(config_);
  const auto backends = create_backends(config_, config_.hp);
  const Evaluator ev(ws, backends);
  FeatureSet<double> s;
  s.labels = synth.labels;
  s.features.resize(64, ev.extractor().dim());
  for (std::size_t i = 0; i < ws.queries.size(); ++i) {
    s.features.row(static_cast<Eigen::Index>(i)) =
        ev.extractor().extract(read_png(corpus_.dir / "copy" / "outputs" / (ws.queries.queries[i].id + ".png"))).transpose();
  }
  EXPECT_NEAR(report.sfid, sfid(ev.reference(), s, 0.0), 1e-9);
  EXPECT_NEAR(report.csfid, csfid(ev.reference(), s, 0.0), 1e-9);
  EXPECT_LE((synth.features.cast<double>() - s.features).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(ref.features.rows(), 8 * 4);
  const std::string table = slurp(corpus_.dir / "copy" / "eval" / "report.txt");
  const auto header = table.substr(0, table.find('\n'));
  EXPECT_LT(header.find("LPIPS"), header.find("Acc.%"));
  EXPECT_LT(header.find("Acc.%"), header.find("CSFID"));
  EXPECT_EQ(table.substr(header.size() + 1, 4), "Copy");
}

TEST_F(ToyRuns, EvaluateEnumeratesMissingOutputs) {
  cmd_run(config_, Method::copy, corpus_.dir / "copy");
  fs::remove(corpus_.dir / "copy" / "outputs" / "q0003.png");
  fs::remove(corpus_.dir / "copy" / "outputs" / "q0042.png");
  try {
    cmd_evaluate(config_, corpus_.dir / "copy");
    FAIL();
  } catch (const MissingData& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("q0003"), std::string::npos);
    EXPECT_NE(msg.find("q0042"), std::string::npos);
    EXPECT_EQ(exit_code_for(e), kExitData);
  }
}

TEST_F(ToyRuns, RunWritesTrajectoriesAndSnapshots) {
  config_.filter.limit = 3;
  config_.snapshot_steps = {0, 10};
  const auto m = cmd_run(config_, Method::flexit, corpus_.dir / "flexit");
  EXPECT_EQ(m.artifacts.size(), 1u + 3 * 4);
  EXPECT_EQ(count_lines(corpus_.dir / "flexit" / "trajectories" / "q0000.jsonl"), 11u);
  EXPECT_TRUE(fs::exists(corpus_.dir / "flexit" / "snapshots" / "q0000_step10.png"));
}

TEST_F(ToyRuns, SweepRowsMatchSingleRunsAndRecordFailures) {
  config_.filter.limit = 6;
  config_.filter.split = Split::dev;
  cmd_run(config_, Method::flexit, corpus_.dir / "single");
  cmd_evaluate(config_, corpus_.dir / "single");
  const auto single = report_from_json(nlohmann::json::parse(slurp(corpus_.dir / "single" / "eval" / "report.json")));

  const auto ws = open_workspace(config_);
  const auto one = run_sweep(ws, parse_sweep_spec("lambda_p=0.15"));
  ASSERT_EQ(one.size(), 1u);
  ASSERT_TRUE(one[0].report);
  // the single run goes through 8-bit PNG outputs, the sweep stays in memory
  EXPECT_NEAR(one[0].report->lpips_x100, single.lpips_x100, 0.05);
  EXPECT_EQ(one[0].report->accuracy_pct, single.accuracy_pct);

  const auto grid = run_sweep(ws, parse_sweep_spec("lambda_p=0.05,-1,0.2"));
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[0].status, "ok");
  EXPECT_NE(grid[1].status, "ok");
  EXPECT_FALSE(grid[1].report);
  EXPECT_EQ(grid[2].status, "ok");

  cmd_sweep(config_, parse_sweep_spec("lambda_p=0.05,0.1,0.15,0.2"), corpus_.dir / "s1");
  cmd_sweep(config_, parse_sweep_spec("lambda_p=0.05,0.1,0.15,0.2"), corpus_.dir / "s2");
  EXPECT_EQ(count_lines(corpus_.dir / "s1" / "sweep.csv"), 5u);
  EXPECT_EQ(slurp(corpus_.dir / "s1" / "sweep.csv"), slurp(corpus_.dir / "s2" / "sweep.csv"));
}

TEST_F(ToyRuns, WorkerCountDoesNotChangeResults) {
  config_.filter.limit = 4;
  config_.workers = 1;
  const auto a = cmd_run(config_, Method::flexit, corpus_.dir / "w1");
  config_.workers = 4;
  const auto b = cmd_run(config_, Method::flexit, corpus_.dir / "w4");
  EXPECT_EQ(a.content_hash(), b.content_hash());
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(FLEXIT_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

TEST(Binary, ExitCodes) {
  const auto corpus = make_corpus("binary");
  const auto cfg = corpus.dir / "config.json";
  auto j = to_json(corpus.config);
  j["hyperparams"]["steps"] = 2;
  std::ofstream(cfg) << j.dump(2);
  const std::string c = "-c " + cfg.string();
  EXPECT_EQ(run_cli(c + " baseline --method copy --out " + (corpus.dir / "copy").string()), 0);
  EXPECT_EQ(run_cli(c + " evaluate --results " + (corpus.dir / "copy").string()), 0);
  EXPECT_EQ(run_cli(c + " --set hyperparams.steps=-1 run --out " + (corpus.dir / "x").string()), 2);
  EXPECT_EQ(run_cli(c + " --set paths.index=/nonexistent.json run --out " + (corpus.dir / "x").string()), 3);
  EXPECT_EQ(run_cli(c + " evaluate --results " + (corpus.dir / "empty").string()), 3);
  EXPECT_EQ(run_cli(c + " frobnicate"), 2);
  const std::string env = "FLEXIT_CONFIG=" + cfg.string() + " ";
  EXPECT_EQ(std::system((env + FLEXIT_CLI + " build-queries --out " + (corpus.dir / "q").string() + " >/dev/null").c_str()), 0);
  EXPECT_EQ(count_lines(corpus.dir / "q" / "queries.jsonl"), 64u);
}

}  // namespace
}  // namespace flexit
