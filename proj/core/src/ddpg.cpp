#include "vdslab/ddpg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vdslab/errors.hpp"

namespace vdslab {

namespace {

constexpr std::uint64_t kActorSeedTag = 0x41;
constexpr std::uint64_t kCriticSeedTag = 0x43;

void fill_actor_input(const ObsScaler& scaler, const Vec2& s, const Vec2& g,
                      std::span<double> out4) {
  const Vec2 ss = scaler.apply(s);
  const Vec2 gs = scaler.apply(g);
  out4[0] = ss.x;
  out4[1] = ss.y;
  out4[2] = gs.x;
  out4[3] = gs.y;
}

}  // namespace

void fill_critic_input(const ObsScaler& scaler, const Vec2& s, const Vec2& g,
                       const Action& a, std::span<double> out6) {
  fill_actor_input(scaler, s, g, out6.subspan(0, 4));
  encode_action(a, out6.data() + 4);
}

double critic_value(const MlpParams& critic, const ObsScaler& scaler, const Vec2& s,
                    const Vec2& g, const Action& a) {
  std::array<double, 6> in;
  fill_critic_input(scaler, s, g, a, in);
  return mlp_forward(critic, in)[0];
}

Policy policy_init(const std::vector<int>& hidden_sizes, double actor_lr, double critic_lr,
                   std::uint64_t seed, const ObsScaler& scaler) {
  std::vector<int> actor_sizes{4};
  actor_sizes.insert(actor_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  actor_sizes.push_back(2);
  std::vector<int> critic_sizes{6};
  critic_sizes.insert(critic_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  critic_sizes.push_back(1);

  Policy p;
  p.actor = mlp_init(actor_sizes, Activation::kRelu, Activation::kTanh,
                     derive_seed(seed, kActorSeedTag));
  p.critic = mlp_init(critic_sizes, Activation::kRelu, Activation::kLinear,
                      derive_seed(seed, kCriticSeedTag));
  p.actor_target = p.actor;
  p.critic_target = p.critic;
  p.actor_opt = opt_init(p.actor, actor_lr);
  p.critic_opt = opt_init(p.critic, critic_lr);
  p.scaler = scaler;
  return p;
}

Action act(const Policy& policy, const Vec2& s, const Vec2& g, bool explore,
           const ExploreConfig& cfg, Rng& rng) {
  std::array<double, 4> in;
  fill_actor_input(policy.scaler, s, g, in);
  const std::vector<double> y = mlp_forward(policy.actor, in);
  double y0 = y[0];
  double y1 = y[1];
  if (explore) {
    if (rng.uniform(0.0, 1.0) < cfg.epsilon_random) {
      y0 = rng.uniform(-1.0, 1.0);
      y1 = rng.uniform(-1.0, 1.0);
    } else {
      y0 = std::clamp(y0 + rng.normal(0.0, cfg.action_noise_scale), -1.0, 1.0);
      y1 = std::clamp(y1 + rng.normal(0.0, cfg.action_noise_scale), -1.0, 1.0);
    }
  }
  return decode_action(y0, y1);
}

double critic_update(Policy& policy, std::span<const Transition> batch, double gamma) {
  if (batch.empty()) throw UnavailableError("critic_update: empty batch");
  const double q_floor = -1.0 / (1.0 - gamma);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  thread_local MlpWorkspace ws_actor_t, ws_critic_t, ws_critic;
  thread_local ParamGrads grads;
  reset_grads(grads, policy.critic);

  std::array<double, 4> ain;
  std::array<double, 6> qin;
  double loss = 0.0;
  std::vector<double> targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    fill_actor_input(policy.scaler, tr.s_next, tr.g, ain);
    mlp_forward_ws(policy.actor_target, ain, ws_actor_t);
    const auto& y = ws_actor_t.act.back();
    fill_critic_input(policy.scaler, tr.s_next, tr.g, decode_action(y[0], y[1]), qin);
    mlp_forward_ws(policy.critic_target, qin, ws_critic_t);
    targets[i] = std::clamp(tr.r + gamma * ws_critic_t.act.back()[0], q_floor, 0.0);
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    fill_critic_input(policy.scaler, tr.s, tr.g, tr.a, qin);
    mlp_forward_ws(policy.critic, qin, ws_critic);
    const double diff = ws_critic.act.back()[0] - targets[i];
    loss += diff * diff;
    const std::array<double, 1> ograd{2.0 * diff * inv_b};
    mlp_backward_ws(policy.critic, ws_critic, ograd, grads, nullptr);
  }
  loss *= inv_b;
  if (!std::isfinite(loss)) {
    throw NumericError("critic_update: non-finite loss, step rejected");
  }
  adam_step(policy.critic, grads, policy.critic_opt);
  return loss;
}

double actor_update(Policy& policy, std::span<const Transition> batch) {
  if (batch.empty()) throw UnavailableError("actor_update: empty batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  thread_local MlpWorkspace ws_actor, ws_critic;
  thread_local ParamGrads grads;
  reset_grads(grads, policy.actor);

  std::array<double, 4> ain;
  std::array<double, 6> qin;
  std::vector<double> critic_in_grad;
  double loss = 0.0;
  for (const Transition& tr : batch) {
    fill_actor_input(policy.scaler, tr.s, tr.g, ain);
    mlp_forward_ws(policy.actor, ain, ws_actor);
    const auto& y = ws_actor.act.back();
    std::copy(ain.begin(), ain.end(), qin.begin());
    qin[4] = y[0];
    qin[5] = y[1];
    mlp_forward_ws(policy.critic, qin, ws_critic);
    loss -= ws_critic.act.back()[0] * inv_b;
    // d(-Q)/dy flows through the critic's action inputs only
    const std::array<double, 1> ograd{-inv_b};
    mlp_input_grad_ws(policy.critic, ws_critic, ograd, critic_in_grad);
    const std::array<double, 2> actor_ograd{critic_in_grad[4], critic_in_grad[5]};
    mlp_backward_ws(policy.actor, ws_actor, actor_ograd, grads, nullptr);
  }
  if (!std::isfinite(loss)) {
    throw NumericError("actor_update: non-finite loss, step rejected");
  }
  adam_step(policy.actor, grads, policy.actor_opt);
  return loss;
}

void sync_targets(Policy& policy, double tau) {
  polyak_mix(policy.actor_target, policy.actor, tau);
  polyak_mix(policy.critic_target, policy.critic, tau);
}

}  // namespace vdslab
