#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vdslab/ddpg.hpp"
#include "vdslab/maze.hpp"
#include "vdslab/mlp.hpp"
#include "vdslab/replay.hpp"
#include "vdslab/rng.hpp"

namespace vdslab {

enum class SamplerMode { kUniform, kVds, kUcb };
enum class FKind { kIdentity, kExp, kTanh, kSquare };

// K goal-conditioned Q approximators with independent initialization,
// independent optimizer state and independent mini-batches; their spread
// estimates the epistemic uncertainty at a goal.
struct QEnsemble {
  struct Member {
    MlpParams online;
    MlpParams target;
    OptState opt;
  };
  std::vector<Member> members;
  ObsScaler scaler;

  int size() const { return static_cast<int>(members.size()); }
};

// Finite candidate goal set with normalized sampling weights.
struct GoalDistribution {
  std::vector<Goal> goals;
  std::vector<double> weights;
  SamplerMode mode = SamplerMode::kVds;
  FKind f_kind = FKind::kIdentity;
  double lambda = 0.0;
  double temperature = 1.0;
};

QEnsemble ensemble_init(int k, const std::vector<int>& hidden_sizes, double learning_rate,
                        std::uint64_t seed, const ObsScaler& scaler = {});

// Bootstrap action for a member's regression target, given that member's
// target network and the successor (state, goal).
using BootstrapAction =
    std::function<Action(const QEnsemble::Member& member, const Vec2& s_next, const Vec2& g)>;

// One Bellman regression step per member on its own pre-drawn batch, then a
// polyak target sync. Returns per-member pre-step losses.
std::vector<double> ensemble_update_batches(QEnsemble& ensemble,
                                            const std::vector<std::vector<Transition>>& batches,
                                            const BootstrapAction& bootstrap, double gamma,
                                            double tau, int max_threads = 1);

// Spec-shaped entry point: each member draws its own relabeled batch from the
// shared buffer and bootstraps with the online policy action.
std::vector<double> ensemble_update(QEnsemble& ensemble, const ReplayBuffer& buffer,
                                    const Policy& policy, std::size_t batch_size,
                                    double relabel_ratio, double gamma, double tau,
                                    std::span<Rng> member_rngs, int max_threads = 1);

// Population standard deviation of the member values at
// (s0, pi(s0, g), g) for each candidate goal.
std::vector<double> disagreement(const QEnsemble& ensemble, const Policy& policy,
                                 const Vec2& s0, std::span<const Goal> goals);

// Negative mean member value per goal (the goal proposer's expected reward).
std::vector<double> negative_mean_value(const QEnsemble& ensemble, const Policy& policy,
                                        const Vec2& s0, std::span<const Goal> goals);

double apply_f(FKind f, double delta);

// weights proportional to f(delta); all-zero mass falls back to uniform.
GoalDistribution goal_distribution(std::span<const Goal> goals, std::span<const double> deltas,
                                   FKind f_kind);

GoalDistribution uniform_distribution(std::span<const Goal> goals);

// softmax of (mu + lambda * delta) / temperature over the candidate set
GoalDistribution ucb_distribution(const QEnsemble& ensemble, const Policy& policy,
                                  const Vec2& s0, std::span<const Goal> goals, double lambda,
                                  double temperature);

Goal sample_goal(const GoalDistribution& dist, Rng& rng);
std::size_t sample_goal_index(const GoalDistribution& dist, Rng& rng);

// Diagnostics dump: goal_x, goal_y, delta, weight.
void write_distribution_csv(const GoalDistribution& dist, std::span<const double> deltas,
                            const std::string& path);

}  // namespace vdslab
