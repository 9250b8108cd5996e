#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "flexit/core/query.hpp"
#include "flexit/optimizer/losses.hpp"

namespace flexit {

/// z' = z - step_size * grad / |grad|_2 (global norm over the flattened
/// latent). A zero gradient leaves z unchanged. Non-finite gradients raise
/// NumericalFailure tagged with `step`.
LatentCode fgm_step(const LatentCode& z, const Tensor& grad, double step_size, int step = 0);

struct Trajectory {
  std::vector<LossBreakdown> losses;  // N + 1 entries: initial state, then after each step
  std::map<int, Image> snapshots;     // decoded image at requested steps
  LatentCode final_latent;
};

struct OptimizeResult {
  Image output;
  Trajectory trajectory;
};

/// Runs N normalized-gradient steps on z starting from z0 = E(resize(I0)).
/// Only z changes; backends are read-only.
OptimizeResult optimize(const TransformQuery& query, const Image& input,
                        const OptimizerBackends& backends, const HyperParams& hp,
                        const std::vector<int>& snapshot_steps = {});

/// One JSON object per line: {"step", "emb", "perc", "latent", "total"}.
void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_jsonl(const std::filesystem::path& path, const Trajectory& trajectory);
std::vector<LossBreakdown> read_trajectory_jsonl(std::istream& in);

}  // namespace flexit
