#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vdslab/maze.hpp"
#include "vdslab/mlp.hpp"
#include "vdslab/replay.hpp"
#include "vdslab/rng.hpp"

namespace vdslab {

struct ExploreConfig {
  double epsilon_random = 0.3;     // probability of a uniform random action
  double action_noise_scale = 0.2; // Gaussian std as a fraction of max action
};

// Affine map applied to positions before they enter a network, so maze
// coordinates land in [-1, 1] regardless of grid size.
struct ObsScaler {
  Vec2 scale{1.0, 1.0};
  Vec2 offset{0.0, 0.0};

  Vec2 apply(const Vec2& p) const {
    return {p.x * scale.x + offset.x, p.y * scale.y + offset.y};
  }
  static ObsScaler for_maze(const Maze& maze) {
    return {{2.0 / maze.width, 2.0 / maze.height}, {-1.0, -1.0}};
  }
};

// Networks operate on a symmetric normalized action space y in [-1,1]^2;
// y0 maps to speed = (y0+1)/2, y1 is the heading directly.
inline Action decode_action(double y0, double y1) {
  return Action{0.5 * (y0 + 1.0), y1};
}
inline void encode_action(const Action& a, double* y) {
  y[0] = 2.0 * a.speed - 1.0;
  y[1] = a.heading;
}

struct Policy {
  MlpParams actor, actor_target;
  MlpParams critic, critic_target;
  OptState actor_opt, critic_opt;
  ObsScaler scaler;
};

Policy policy_init(const std::vector<int>& hidden_sizes, double actor_lr, double critic_lr,
                   std::uint64_t seed, const ObsScaler& scaler = {});

Action act(const Policy& policy, const Vec2& s, const Vec2& g, bool explore,
           const ExploreConfig& cfg, Rng& rng);

// One regression step toward clip(r + gamma * Q_target(s', pi_target(s',g), g),
// -1/(1-gamma), 0); returns the pre-step mean squared error.
double critic_update(Policy& policy, std::span<const Transition> batch, double gamma);

// One deterministic-policy-gradient step on -mean Q(s, pi(s,g), g); returns
// the pre-step loss.
double actor_update(Policy& policy, std::span<const Transition> batch);

void sync_targets(Policy& policy, double tau);

// Critic evaluation helpers shared with the value ensemble.
void fill_critic_input(const ObsScaler& scaler, const Vec2& s, const Vec2& g,
                       const Action& a, std::span<double> out6);
double critic_value(const MlpParams& critic, const ObsScaler& scaler, const Vec2& s,
                    const Vec2& g, const Action& a);

}  // namespace vdslab
