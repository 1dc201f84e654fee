#include "vdslab/mlp.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "vdslab/errors.hpp"
#include "vdslab/rng.hpp"

namespace vdslab {

namespace {

void check_layout(const MlpParams& a, const MlpParams& b) {
  if (a.layer_sizes != b.layer_sizes) {
    throw ShapeError("mlp layer layouts differ");
  }
}

double apply_act(Activation act, double z) {
  switch (act) {
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
    case Activation::kLinear:
      return z;
  }
  return z;
}

// derivative as a function of the pre-activation z and activated value a
double act_grad(Activation act, double z, double a) {
  switch (act) {
    case Activation::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh:
      return 1.0 - a * a;
    case Activation::kLinear:
      return 1.0;
  }
  return 1.0;
}

}  // namespace

std::size_t MlpParams::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

MlpParams mlp_init(const std::vector<int>& layer_sizes, Activation hidden,
                   Activation output, std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw ConfigError("mlp_init: need at least input and output layer sizes");
  }
  for (int s : layer_sizes) {
    if (s < 1) {
      throw ConfigError("mlp_init: layer size " + std::to_string(s) + " is not positive");
    }
  }
  MlpParams p;
  p.layer_sizes = layer_sizes;
  p.hidden_activation = hidden;
  p.output_activation = output;
  Rng rng(seed);
  const std::size_t n_layers = layer_sizes.size() - 1;
  p.weights.resize(n_layers);
  p.biases.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    p.weights[l].resize(static_cast<std::size_t>(fan_in) * fan_out);
    for (double& w : p.weights[l]) {
      w = rng.uniform(-bound, bound);
    }
    p.biases[l].assign(fan_out, 0.0);
  }
  return p;
}

void mlp_forward_ws(const MlpParams& params, std::span<const double> input, MlpWorkspace& ws) {
  const auto& sizes = params.layer_sizes;
  if (static_cast<int>(input.size()) != sizes.front()) {
    throw ShapeError("mlp_forward: input length " + std::to_string(input.size()) +
                     " != declared " + std::to_string(sizes.front()));
  }
  const std::size_t n_layers = params.weights.size();
  ws.pre.resize(n_layers);
  ws.act.resize(n_layers + 1);
  ws.act[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double* w = params.weights[l].data();
    const double* x = ws.act[l].data();
    ws.pre[l].resize(out);
    ws.act[l + 1].resize(out);
    const Activation act =
        (l + 1 == n_layers) ? params.output_activation : params.hidden_activation;
    for (int r = 0; r < out; ++r) {
      const double* row = w + static_cast<std::size_t>(r) * in;
      double z = params.biases[l][r];
      for (int c = 0; c < in; ++c) {
        z += row[c] * x[c];
      }
      ws.pre[l][r] = z;
      ws.act[l + 1][r] = apply_act(act, z);
    }
  }
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input) {
  MlpWorkspace ws;
  mlp_forward_ws(params, input, ws);
  return ws.act.back();
}

void mlp_backward_ws(const MlpParams& params, MlpWorkspace& ws,
                     std::span<const double> output_grad, ParamGrads& grads,
                     std::vector<double>* input_grad) {
  const auto& sizes = params.layer_sizes;
  if (static_cast<int>(output_grad.size()) != sizes.back()) {
    throw ShapeError("mlp_backward: output_grad length " + std::to_string(output_grad.size()) +
                     " != declared " + std::to_string(sizes.back()));
  }
  const std::size_t n_layers = params.weights.size();
  ws.delta.resize(n_layers + 1);
  auto& top = ws.delta[n_layers];
  top.resize(sizes.back());
  for (int r = 0; r < sizes.back(); ++r) {
    top[r] = output_grad[r] *
             act_grad(params.output_activation, ws.pre[n_layers - 1][r], ws.act[n_layers][r]);
  }
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double* d = ws.delta[l + 1].data();
    const double* x = ws.act[l].data();
    double* gw = grads.weights[l].data();
    double* gb = grads.biases[l].data();
    for (int r = 0; r < out; ++r) {
      const double dr = d[r];
      double* grow = gw + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) {
        grow[c] += dr * x[c];
      }
      gb[r] += dr;
    }
    const bool need_prev = l > 0 || input_grad != nullptr;
    if (!need_prev) continue;
    auto& dprev = ws.delta[l];
    dprev.assign(in, 0.0);
    const double* w = params.weights[l].data();
    for (int r = 0; r < out; ++r) {
      const double dr = d[r];
      const double* row = w + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) {
        dprev[c] += dr * row[c];
      }
    }
    if (l > 0) {
      const Activation act = params.hidden_activation;
      for (int c = 0; c < in; ++c) {
        dprev[c] *= act_grad(act, ws.pre[l - 1][c], ws.act[l][c]);
      }
    }
  }
  if (input_grad != nullptr) {
    *input_grad = ws.delta[0];
  }
}

void mlp_input_grad_ws(const MlpParams& params, MlpWorkspace& ws,
                       std::span<const double> output_grad, std::vector<double>& input_grad) {
  const auto& sizes = params.layer_sizes;
  if (static_cast<int>(output_grad.size()) != sizes.back()) {
    throw ShapeError("mlp_input_grad: output_grad length mismatch");
  }
  const std::size_t n_layers = params.weights.size();
  ws.delta.resize(n_layers + 1);
  auto& top = ws.delta[n_layers];
  top.resize(sizes.back());
  for (int r = 0; r < sizes.back(); ++r) {
    top[r] = output_grad[r] *
             act_grad(params.output_activation, ws.pre[n_layers - 1][r], ws.act[n_layers][r]);
  }
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double* d = ws.delta[l + 1].data();
    auto& dprev = ws.delta[l];
    dprev.assign(in, 0.0);
    const double* w = params.weights[l].data();
    for (int r = 0; r < out; ++r) {
      const double dr = d[r];
      const double* row = w + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) {
        dprev[c] += dr * row[c];
      }
    }
    if (l > 0) {
      for (int c = 0; c < in; ++c) {
        dprev[c] *= act_grad(params.hidden_activation, ws.pre[l - 1][c], ws.act[l][c]);
      }
    }
  }
  input_grad = ws.delta[0];
}

ParamGrads mlp_backward(const MlpParams& params, std::span<const double> input,
                        std::span<const double> output_grad) {
  MlpWorkspace ws;
  mlp_forward_ws(params, input, ws);
  ParamGrads grads = zero_grads_like(params);
  mlp_backward_ws(params, ws, output_grad, grads, &grads.input);
  return grads;
}

ParamGrads zero_grads_like(const MlpParams& params) {
  ParamGrads g;
  reset_grads(g, params);
  return g;
}

void reset_grads(ParamGrads& g, const MlpParams& params) {
  g.weights.resize(params.weights.size());
  g.biases.resize(params.biases.size());
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    g.weights[l].assign(params.weights[l].size(), 0.0);
    g.biases[l].assign(params.biases[l].size(), 0.0);
  }
  g.input.assign(params.layer_sizes.front(), 0.0);
}

void scale_grads(ParamGrads& grads, double c) {
  for (auto& layer : grads.weights) {
    for (double& v : layer) v *= c;
  }
  for (auto& layer : grads.biases) {
    for (double& v : layer) v *= c;
  }
  for (double& v : grads.input) v *= c;
}

OptState opt_init(const MlpParams& params, double learning_rate, double beta1,
                  double beta2, double epsilon_stab) {
  if (learning_rate <= 0.0) {
    throw ConfigError("opt_init: learning rate must be positive");
  }
  OptState o;
  o.learning_rate = learning_rate;
  o.beta1 = beta1;
  o.beta2 = beta2;
  o.epsilon_stab = epsilon_stab;
  o.weight_m.resize(params.weights.size());
  o.weight_v.resize(params.weights.size());
  o.bias_m.resize(params.biases.size());
  o.bias_v.resize(params.biases.size());
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    o.weight_m[l].assign(params.weights[l].size(), 0.0);
    o.weight_v[l].assign(params.weights[l].size(), 0.0);
    o.bias_m[l].assign(params.biases[l].size(), 0.0);
    o.bias_v[l].assign(params.biases[l].size(), 0.0);
  }
  return o;
}

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void adam_apply(std::vector<double>& p, const std::vector<double>& g,
                std::vector<double>& m, std::vector<double>& v, double lr_t,
                double beta1, double beta2, double eps) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    p[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps);
  }
}

}  // namespace

void adam_step(MlpParams& params, const ParamGrads& grads, OptState& opt) {
  if (grads.weights.size() != params.weights.size()) {
    throw ShapeError("adam_step: gradient layout mismatch");
  }
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (grads.weights[l].size() != params.weights[l].size() ||
        grads.biases[l].size() != params.biases[l].size()) {
      throw ShapeError("adam_step: gradient layout mismatch at layer " + std::to_string(l));
    }
    if (!all_finite(grads.weights[l]) || !all_finite(grads.biases[l])) {
      throw NumericError("adam_step: non-finite gradient entry, update rejected");
    }
  }
  opt.step_count += 1;
  const double t = static_cast<double>(opt.step_count);
  // fold the bias corrections into one effective step size
  const double lr_t = opt.learning_rate * std::sqrt(1.0 - std::pow(opt.beta2, t)) /
                      (1.0 - std::pow(opt.beta1, t));
  const double eps = opt.epsilon_stab * std::sqrt(1.0 - std::pow(opt.beta2, t));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    adam_apply(params.weights[l], grads.weights[l], opt.weight_m[l], opt.weight_v[l],
               lr_t, opt.beta1, opt.beta2, eps);
    adam_apply(params.biases[l], grads.biases[l], opt.bias_m[l], opt.bias_v[l],
               lr_t, opt.beta1, opt.beta2, eps);
  }
}

void polyak_mix(MlpParams& target, const MlpParams& online, double tau) {
  check_layout(target, online);
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    double* t = target.weights[l].data();
    const double* o = online.weights[l].data();
    const std::size_t n = target.weights[l].size();
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = tau * t[i] + (1.0 - tau) * o[i];
    }
    double* tb = target.biases[l].data();
    const double* ob = online.biases[l].data();
    for (std::size_t i = 0; i < target.biases[l].size(); ++i) {
      tb[i] = tau * tb[i] + (1.0 - tau) * ob[i];
    }
  }
}

MlpParams polyak_update(const MlpParams& target, const MlpParams& online, double tau) {
  MlpParams result = target;
  polyak_mix(result, online, tau);
  return result;
}

}  // namespace vdslab
