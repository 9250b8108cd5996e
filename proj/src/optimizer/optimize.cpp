#include "flexit/optimizer/optimize.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "flexit/core/errors.hpp"

namespace flexit {

LatentCode fgm_step(const LatentCode& z, const Tensor& grad, double step_size, int step) {
  if (!(step_size > 0)) throw InvalidArgument("fgm_step: step size must be positive");
  if (!grad.same_shape(z.values())) throw InvalidArgument("fgm_step: gradient shape mismatch");
  if (!grad.all_finite()) throw NumericalFailure("non-finite gradient", step);
  const double norm = grad.data().norm();
  if (!std::isfinite(norm)) throw NumericalFailure("gradient norm overflow", step);
  if (norm == 0.0) return z;
  Tensor next = z.values();
  next.data() -= (step_size / norm) * grad.data();
  if (!next.all_finite()) throw NumericalFailure("non-finite latent after update", step);
  return LatentCode(std::move(next));
}

OptimizeResult optimize(const TransformQuery& query, const Image& input,
                        const OptimizerBackends& backends, const HyperParams& hp,
                        const std::vector<int>& snapshot_steps) {
  if (backends.ensemble && backends.ensemble->augmentations() != hp.augmentations) {
    throw InvalidArgument("ensemble augmentation count does not match hp.augmentations");
  }
  const auto ctx =
      make_loss_context(input, query.source_text, query.target_text, backends, hp);
  const auto& ae = *backends.autoencoder;
  const std::set<int> wanted(snapshot_steps.begin(), snapshot_steps.end());

  OptimizeResult result;
  auto& traj = result.trajectory;
  traj.losses.reserve(static_cast<std::size_t>(hp.steps) + 1);
  LatentCode z = ctx.initial;

  auto record = [&](const LossBreakdown& loss, int step) {
    if (!std::isfinite(loss.total)) throw NumericalFailure("non-finite loss", step);
    traj.losses.push_back(loss);
    if (wanted.count(step)) traj.snapshots.emplace(step, ae.decode(z));
  };

  for (int step = 0; step < hp.steps; ++step) {
    auto [loss, grad] = total_loss_with_gradient(z, ctx, step);
    record(loss, step);
    z = fgm_step(z, grad, hp.step_size, step);
  }
  record(total_loss(z, ctx, hp.steps), hp.steps);

  result.output = ae.decode(z);
  traj.final_latent = std::move(z);
  return result;
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory) {
  for (const auto& l : trajectory.losses) {
    const nlohmann::json row = {{"step", l.step},
                                {"emb", l.emb},
                                {"perc", l.perc},
                                {"latent", l.latent},
                                {"total", l.total}};
    out << row.dump() << '\n';
  }
}

void write_trajectory_jsonl(const std::filesystem::path& path, const Trajectory& trajectory) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingData("cannot write '" + path.string() + "'");
  write_trajectory_jsonl(out, trajectory);
}

std::vector<LossBreakdown> read_trajectory_jsonl(std::istream& in) {
  std::vector<LossBreakdown> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    rows.push_back({j.at("step").get<int>(), j.at("emb").get<double>(),
                    j.at("perc").get<double>(), j.at("latent").get<double>(),
                    j.at("total").get<double>()});
  }
  return rows;
}

}  // namespace flexit
