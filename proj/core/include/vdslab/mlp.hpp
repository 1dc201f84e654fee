#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vdslab {

enum class Activation { kRelu, kTanh, kLinear };

// Weights and biases of a fixed-topology feed-forward network.
// weights[l] is (layer_sizes[l+1] x layer_sizes[l]) row-major,
// biases[l] has layer_sizes[l+1] entries.
struct MlpParams {
  std::vector<int> layer_sizes;
  Activation hidden_activation = Activation::kRelu;
  Activation output_activation = Activation::kLinear;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t param_count() const;
};

// Gradients of <output, output_grad> w.r.t. every parameter, plus the
// gradient w.r.t. the network input (needed by the policy update).
struct ParamGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input;
};

// Adam accumulators; shapes mirror the owning MlpParams.
struct OptState {
  std::int64_t step_count = 0;
  std::vector<std::vector<double>> weight_m, weight_v;
  std::vector<std::vector<double>> bias_m, bias_v;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_stab = 1e-8;
};

// Scratch buffers reused across forward/backward calls in hot loops.
struct MlpWorkspace {
  std::vector<std::vector<double>> pre;    // pre-activation per layer
  std::vector<std::vector<double>> act;    // post-activation per layer; act[0] = input
  std::vector<std::vector<double>> delta;  // backprop deltas
};

MlpParams mlp_init(const std::vector<int>& layer_sizes, Activation hidden,
                   Activation output, std::uint64_t seed);

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input);

ParamGrads mlp_backward(const MlpParams& params, std::span<const double> input,
                        std::span<const double> output_grad);

// Workspace variants used by the batched update loops. forward_ws leaves the
// output in ws.act.back(). backward_ws accumulates parameter gradients into
// grads (which must be zeroed or pre-accumulated by the caller) and expects
// ws to hold the activations of the matching forward pass.
void mlp_forward_ws(const MlpParams& params, std::span<const double> input, MlpWorkspace& ws);
void mlp_backward_ws(const MlpParams& params, MlpWorkspace& ws,
                     std::span<const double> output_grad, ParamGrads& grads,
                     std::vector<double>* input_grad = nullptr);
// Propagates deltas only; skips the weight outer products.
void mlp_input_grad_ws(const MlpParams& params, MlpWorkspace& ws,
                       std::span<const double> output_grad, std::vector<double>& input_grad);

ParamGrads zero_grads_like(const MlpParams& params);
// Resizes to the layout of params and zeros, reusing existing storage.
void reset_grads(ParamGrads& grads, const MlpParams& params);
void scale_grads(ParamGrads& grads, double c);

OptState opt_init(const MlpParams& params, double learning_rate,
                  double beta1 = 0.9, double beta2 = 0.999, double epsilon_stab = 1e-8);

// One bias-corrected Adam step, in place. Rejects non-finite gradients
// (NumericError) without touching params or opt.
void adam_step(MlpParams& params, const ParamGrads& grads, OptState& opt);

// t' = tau * t + (1 - tau) * o entrywise; tau is the retained target fraction.
MlpParams polyak_update(const MlpParams& target, const MlpParams& online, double tau);
void polyak_mix(MlpParams& target, const MlpParams& online, double tau);

}  // namespace vdslab
