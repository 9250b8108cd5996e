#include "flexit/dataset/queries.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"

namespace flexit {

std::string to_string(Split split) {
  switch (split) {
    case Split::dev: return "dev";
    case Split::test: return "test";
    case Split::unassigned: break;
  }
  return "none";
}

Split parse_split(const std::string& text) {
  if (text == "dev") return Split::dev;
  if (text == "test") return Split::test;
  if (text == "none" || text.empty()) return Split::unassigned;
  throw InvalidArgument("unknown split '" + text + "'");
}

std::size_t QuerySet::count(Split split) const {
  return static_cast<std::size_t>(std::count(splits.begin(), splits.end(), split));
}

namespace {

std::string query_id(std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "q%04zu", n);
  return buf;
}

}  // namespace

QuerySet build_queries(const ClusterRegistry& registry, const ImageIndex& index, std::uint64_t seed) {
  index.require_validation_images(registry);
  QuerySet set;
  set.seed = seed;
  for (const auto& entry : registry.entries()) {
    for (const auto& target : entry.labels) {
      Rng rng = make_rng({seed, fnv1a64(target)});
      std::vector<std::string> others;
      for (const auto& l : entry.labels) {
        if (l != target) others.push_back(l);
      }
      std::vector<std::string> sources;
      if (others.size() >= static_cast<std::size_t>(kSourcesPerTarget)) {
        shuffle(others, rng);
        sources.assign(others.begin(), others.begin() + kSourcesPerTarget);
      } else {
        for (int k = 0; k < kSourcesPerTarget; ++k) sources.push_back(others[uniform_index(rng, others.size())]);
      }
      std::map<std::string, std::vector<std::string>> remaining;
      for (const auto& source : sources) {
        auto& pool = remaining[source];
        if (pool.empty()) pool = index.val_images(source);
        const auto pick = uniform_index(rng, pool.size());
        const std::string image = pool[pick];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        TransformQuery q;
        q.id = query_id(set.queries.size());
        q.image_id = image;
        q.source_text = source;
        q.target_text = target;
        q.cluster_id = entry.cluster;
        q.source_label = source;
        q.target_label = target;
        set.queries.push_back(std::move(q));
        set.splits.push_back(Split::unassigned);
      }
    }
  }
  return set;
}

QuerySet split_dev_test(const QuerySet& set, std::uint64_t seed) {
  if (set.size() % 2 != 0) {
    throw InvalidArgument("cannot split an odd number of queries (" + std::to_string(set.size()) + ")");
  }
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng({seed, 0x5717u});
  shuffle(order, rng);
  QuerySet out = set;
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.splits[order[k]] = k < order.size() / 2 ? Split::dev : Split::test;
  }
  return out;
}

QuerySet filter_queries(const QuerySet& set, const QueryFilter& filter, const ClusterRegistry& registry) {
  QuerySet out;
  out.seed = set.seed;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (filter.limit && out.size() >= *filter.limit) break;
    const auto& q = set.queries[i];
    if (filter.split && set.splits[i] != *filter.split) continue;
    if (filter.cluster && q.cluster_id != *filter.cluster) continue;
    if (filter.group && registry.group_of(q.target_label) != *filter.group) continue;
    out.queries.push_back(q);
    out.splits.push_back(set.splits[i]);
  }
  return out;
}

void write_queries_jsonl(std::ostream& out, const QuerySet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& q = set.queries[i];
    nlohmann::ordered_json j{{"id", q.id},
                             {"image_id", q.image_id},
                             {"source_text", q.source_text},
                             {"target_text", q.target_text},
                             {"cluster", q.cluster_id},
                             {"source_label", q.source_label},
                             {"target_label", q.target_label},
                             {"split", to_string(set.splits[i])}};
    out << j.dump() << '\n';
  }
}

void write_queries_jsonl(const std::filesystem::path& path, const QuerySet& set) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw MissingData("cannot write " + path.string());
  write_queries_jsonl(out, set);
}

QuerySet read_queries_jsonl(std::istream& in) {
  QuerySet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TransformQuery q;
      q.id = j.at("id").get<std::string>();
      q.image_id = j.at("image_id").get<std::string>();
      q.source_text = j.at("source_text").get<std::string>();
      q.target_text = j.at("target_text").get<std::string>();
      q.cluster_id = j.at("cluster").get<std::string>();
      q.source_label = j.at("source_label").get<std::string>();
      q.target_label = j.at("target_label").get<std::string>();
      set.queries.push_back(std::move(q));
      set.splits.push_back(parse_split(j.value("split", "none")));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("query line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return set;
}

QuerySet read_queries_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingData("cannot open query file " + path.string());
  return read_queries_jsonl(in);
}

}  // namespace flexit
