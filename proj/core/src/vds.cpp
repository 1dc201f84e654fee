#include "vdslab/vds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <thread>

#include "vdslab/errors.hpp"

namespace vdslab {

namespace {

constexpr std::uint64_t kMemberSeedTag = 0x516b;

void run_per_member(std::size_t n, int max_threads, const std::function<void(std::size_t)>& fn) {
  if (max_threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t n_workers = std::min<std::size_t>(n, static_cast<std::size_t>(max_threads));
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += n_workers) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace

QEnsemble ensemble_init(int k, const std::vector<int>& hidden_sizes, double learning_rate,
                        std::uint64_t seed, const ObsScaler& scaler) {
  if (k < 1) throw ConfigError("ensemble_init: K must be >= 1, got " + std::to_string(k));
  std::vector<int> sizes{6};
  sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(1);
  QEnsemble e;
  e.scaler = scaler;
  e.members.resize(k);
  for (int i = 0; i < k; ++i) {
    e.members[i].online = mlp_init(sizes, Activation::kRelu, Activation::kLinear,
                                   derive_seed(seed, kMemberSeedTag, static_cast<std::uint64_t>(i)));
    e.members[i].target = e.members[i].online;
    e.members[i].opt = opt_init(e.members[i].online, learning_rate);
  }
  return e;
}

std::vector<double> ensemble_update_batches(QEnsemble& ensemble,
                                            const std::vector<std::vector<Transition>>& batches,
                                            const BootstrapAction& bootstrap, double gamma,
                                            double tau, int max_threads) {
  if (batches.size() != ensemble.members.size()) {
    throw ShapeError("ensemble_update: need one batch per member");
  }
  std::vector<double> losses(ensemble.members.size(), 0.0);
  run_per_member(ensemble.members.size(), max_threads, [&](std::size_t k) {
    QEnsemble::Member& m = ensemble.members[k];
    const std::vector<Transition>& batch = batches[k];
    if (batch.empty()) throw UnavailableError("ensemble_update: empty batch");
    const double q_floor = -1.0 / (1.0 - gamma);
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    thread_local MlpWorkspace ws_target, ws_online;
    thread_local ParamGrads grads;
    reset_grads(grads, m.online);

    std::array<double, 6> qin;
    std::vector<double> targets(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Transition& tr = batch[i];
      const Action a_next = bootstrap(m, tr.s_next, tr.g);
      fill_critic_input(ensemble.scaler, tr.s_next, tr.g, a_next, qin);
      mlp_forward_ws(m.target, qin, ws_target);
      targets[i] = std::clamp(tr.r + gamma * ws_target.act.back()[0], q_floor, 0.0);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Transition& tr = batch[i];
      fill_critic_input(ensemble.scaler, tr.s, tr.g, tr.a, qin);
      mlp_forward_ws(m.online, qin, ws_online);
      const double diff = ws_online.act.back()[0] - targets[i];
      loss += diff * diff;
      const std::array<double, 1> ograd{2.0 * diff * inv_b};
      mlp_backward_ws(m.online, ws_online, ograd, grads, nullptr);
    }
    loss *= inv_b;
    if (!std::isfinite(loss)) {
      throw NumericError("ensemble_update: non-finite loss, step rejected");
    }
    adam_step(m.online, grads, m.opt);
    polyak_mix(m.target, m.online, tau);
    losses[k] = loss;
  });
  return losses;
}

std::vector<double> ensemble_update(QEnsemble& ensemble, const ReplayBuffer& buffer,
                                    const Policy& policy, std::size_t batch_size,
                                    double relabel_ratio, double gamma, double tau,
                                    std::span<Rng> member_rngs, int max_threads) {
  if (buffer.empty()) throw UnavailableError("ensemble_update: replay buffer is empty");
  if (member_rngs.size() != ensemble.members.size()) {
    throw ShapeError("ensemble_update: need one rng stream per member");
  }
  // batches are drawn serially so each member consumes its own stream in a
  // fixed order regardless of the worker count
  std::vector<std::vector<Transition>> batches(ensemble.members.size());
  for (std::size_t k = 0; k < batches.size(); ++k) {
    batches[k] = buffer.sample_batch(batch_size, relabel_ratio, member_rngs[k]);
  }
  const ExploreConfig no_explore{0.0, 0.0};
  BootstrapAction bootstrap = [&policy, &no_explore](const QEnsemble::Member&, const Vec2& s,
                                                     const Vec2& g) {
    thread_local Rng unused(0);
    return act(policy, s, g, false, no_explore, unused);
  };
  return ensemble_update_batches(ensemble, batches, bootstrap, gamma, tau, max_threads);
}

namespace {

// per-goal member values at (s0, pi(s0, g), g)
std::vector<std::vector<double>> member_values(const QEnsemble& ensemble, const Policy& policy,
                                               const Vec2& s0, std::span<const Goal> goals) {
  const ExploreConfig no_explore{0.0, 0.0};
  Rng unused(0);
  std::vector<std::vector<double>> values(goals.size());
  std::array<double, 6> qin;
  MlpWorkspace ws;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    const Action a = act(policy, s0, goals[i].position, false, no_explore, unused);
    values[i].resize(ensemble.members.size());
    fill_critic_input(ensemble.scaler, s0, goals[i].position, a, qin);
    for (std::size_t k = 0; k < ensemble.members.size(); ++k) {
      mlp_forward_ws(ensemble.members[k].online, qin, ws);
      values[i][k] = ws.act.back()[0];
    }
  }
  return values;
}

double population_std(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / n);
}

}  // namespace

std::vector<double> disagreement(const QEnsemble& ensemble, const Policy& policy,
                                 const Vec2& s0, std::span<const Goal> goals) {
  if (goals.empty()) throw ConfigError("disagreement: goal set is empty");
  const auto values = member_values(ensemble, policy, s0, goals);
  std::vector<double> deltas(goals.size());
  for (std::size_t i = 0; i < goals.size(); ++i) {
    deltas[i] = population_std(values[i]);
  }
  return deltas;
}

std::vector<double> negative_mean_value(const QEnsemble& ensemble, const Policy& policy,
                                        const Vec2& s0, std::span<const Goal> goals) {
  const auto values = member_values(ensemble, policy, s0, goals);
  std::vector<double> mu(goals.size());
  for (std::size_t i = 0; i < goals.size(); ++i) {
    double mean = 0.0;
    for (double x : values[i]) mean += x;
    mu[i] = -mean / static_cast<double>(values[i].size());
  }
  return mu;
}

double apply_f(FKind f, double delta) {
  switch (f) {
    case FKind::kIdentity:
      return delta;
    case FKind::kExp:
      return std::exp(delta);
    case FKind::kTanh:
      return std::tanh(delta);
    case FKind::kSquare:
      return delta * delta;
  }
  return delta;
}

GoalDistribution uniform_distribution(std::span<const Goal> goals) {
  GoalDistribution dist;
  dist.mode = SamplerMode::kUniform;
  dist.goals.assign(goals.begin(), goals.end());
  dist.weights.assign(goals.size(), 1.0 / static_cast<double>(goals.size()));
  return dist;
}

GoalDistribution goal_distribution(std::span<const Goal> goals, std::span<const double> deltas,
                                   FKind f_kind) {
  if (goals.size() != deltas.size()) {
    throw ShapeError("goal_distribution: goals and deltas differ in length");
  }
  if (goals.empty()) throw ConfigError("goal_distribution: empty candidate set");
  GoalDistribution dist;
  dist.mode = SamplerMode::kVds;
  dist.f_kind = f_kind;
  dist.goals.assign(goals.begin(), goals.end());
  dist.weights.resize(goals.size());

  double shift = 0.0;
  if (f_kind == FKind::kExp) {
    // exp(delta - max) keeps the normalization stable; the distribution is
    // unchanged
    shift = *std::max_element(deltas.begin(), deltas.end());
  }
  double z = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] < 0.0) {
      throw ProtocolError("goal_distribution: negative disagreement value");
    }
    const double w = (f_kind == FKind::kExp) ? std::exp(deltas[i] - shift)
                                             : apply_f(f_kind, deltas[i]);
    dist.weights[i] = w;
    z += w;
  }
  if (z <= 0.0) {
    dist.weights.assign(goals.size(), 1.0 / static_cast<double>(goals.size()));
    return dist;
  }
  for (double& w : dist.weights) w /= z;
  return dist;
}

GoalDistribution ucb_distribution(const QEnsemble& ensemble, const Policy& policy,
                                  const Vec2& s0, std::span<const Goal> goals, double lambda,
                                  double temperature) {
  if (temperature <= 0.0) {
    throw ConfigError("ucb_distribution: temperature must be positive");
  }
  if (goals.empty()) throw ConfigError("ucb_distribution: empty candidate set");
  const auto values = member_values(ensemble, policy, s0, goals);
  GoalDistribution dist;
  dist.mode = SamplerMode::kUcb;
  dist.lambda = lambda;
  dist.temperature = temperature;
  dist.goals.assign(goals.begin(), goals.end());
  dist.weights.resize(goals.size());

  std::vector<double> scores(goals.size());
  for (std::size_t i = 0; i < goals.size(); ++i) {
    double mean = 0.0;
    for (double x : values[i]) mean += x;
    mean /= static_cast<double>(values[i].size());
    const double delta = population_std(values[i]);
    scores[i] = (-mean + lambda * delta) / temperature;
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    dist.weights[i] = std::exp(scores[i] - top);
    z += dist.weights[i];
  }
  for (double& w : dist.weights) w /= z;
  return dist;
}

std::size_t sample_goal_index(const GoalDistribution& dist, Rng& rng) {
  if (dist.goals.empty() || dist.goals.size() != dist.weights.size()) {
    throw ShapeError("sample_goal: malformed distribution");
  }
  const double u = rng.uniform(0.0, 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.weights.size(); ++i) {
    acc += dist.weights[i];
    if (u < acc) return i;
  }
  return dist.weights.size() - 1;
}

Goal sample_goal(const GoalDistribution& dist, Rng& rng) {
  return dist.goals[sample_goal_index(dist, rng)];
}

void write_distribution_csv(const GoalDistribution& dist, std::span<const double> deltas,
                            const std::string& path) {
  std::ofstream os(path);
  if (!os) throw UnavailableError("write_distribution_csv: cannot open " + path);
  os << "goal_x,goal_y,delta,weight\n";
  os.precision(17);
  for (std::size_t i = 0; i < dist.goals.size(); ++i) {
    const double d = i < deltas.size() ? deltas[i] : 0.0;
    os << dist.goals[i].position.x << "," << dist.goals[i].position.y << "," << d << ","
       << dist.weights[i] << "\n";
  }
}

}  // namespace vdslab
