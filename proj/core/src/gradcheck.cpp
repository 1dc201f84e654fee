#include "vdslab/gradcheck.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "vdslab/mlp.hpp"
#include "vdslab/rng.hpp"

namespace vdslab {

namespace {

constexpr double kStep = 1e-5;
constexpr double kRelTol = 1e-4;
constexpr double kAbsFloor = 1e-7;

double objective(const MlpParams& p, const std::vector<double>& input,
                 const std::vector<double>& ograd) {
  const std::vector<double> out = mlp_forward(p, input);
  double j = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) j += out[i] * ograd[i];
  return j;
}

bool close(double a, double b) {
  const double diff = std::abs(a - b);
  return diff <= kAbsFloor + kRelTol * std::max(std::abs(a), std::abs(b));
}

// Central differences straddle relu kinks when a pre-activation sits within
// the probe step of zero; such inputs are resampled.
bool input_is_fd_safe(const MlpParams& p, const std::vector<double>& input) {
  MlpWorkspace ws;
  mlp_forward_ws(p, input, ws);
  const std::size_t n_layers = ws.pre.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Activation act = (l + 1 == n_layers) ? p.output_activation : p.hidden_activation;
    if (act != Activation::kRelu) continue;
    for (double z : ws.pre[l]) {
      if (std::abs(z) < 1e-3) return false;
    }
  }
  return true;
}

struct CaseResult {
  long long gradients = 0;
  long long failures = 0;
  double worst = 0.0;
};

CaseResult check_network(MlpParams p, Rng& rng) {
  std::vector<double> input(p.input_size());
  bool safe = false;
  for (int attempt = 0; attempt < 64 && !safe; ++attempt) {
    for (double& x : input) x = rng.uniform(-1.5, 1.5);
    safe = input_is_fd_safe(p, input);
  }
  std::vector<double> ograd(p.output_size());
  for (double& x : ograd) x = rng.uniform(-1.0, 1.0);

  const ParamGrads grads = mlp_backward(p, input, ograd);

  CaseResult res;
  auto check_one = [&](double* slot, double analytic) {
    const double keep = *slot;
    *slot = keep + kStep;
    const double jp = objective(p, input, ograd);
    *slot = keep - kStep;
    const double jm = objective(p, input, ograd);
    *slot = keep;
    const double fd = (jp - jm) / (2.0 * kStep);
    ++res.gradients;
    const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-12});
    res.worst = std::max(res.worst, std::abs(fd - analytic) / scale);
    if (!close(fd, analytic)) ++res.failures;
  };

  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
      check_one(&p.weights[l][i], grads.weights[l][i]);
    }
    for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
      check_one(&p.biases[l][i], grads.biases[l][i]);
    }
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    check_one(&input[i], grads.input[i]);
  }
  return res;
}

}  // namespace

GradCheckReport run_gradient_suite(int n_networks, std::uint64_t seed) {
  GradCheckReport report;
  for (int n = 0; n < n_networks; ++n) {
    Rng rng = Rng::derive(seed, 0x6763, static_cast<std::uint64_t>(n));
    const int depth = static_cast<int>(rng.uniform_int(1, 3));
    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(rng.uniform_int(1, 6)));
    for (int d = 0; d < depth; ++d) {
      sizes.push_back(static_cast<int>(rng.uniform_int(1, 8)));
    }
    sizes.push_back(static_cast<int>(rng.uniform_int(1, 4)));
    const Activation hidden =
        rng.uniform(0.0, 1.0) < 0.5 ? Activation::kRelu : Activation::kTanh;
    const Activation output =
        rng.uniform(0.0, 1.0) < 0.5 ? Activation::kLinear : Activation::kTanh;
    MlpParams p = mlp_init(sizes, hidden, output, rng.next());
    const CaseResult res = check_network(std::move(p), rng);
    ++report.networks;
    report.gradients += res.gradients;
    report.failures += res.failures;
    report.worst_rel_err = std::max(report.worst_rel_err, res.worst);
  }
  return report;
}

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << "gradcheck: " << gradients << " gradients over " << networks << " networks, "
     << failures << " failures, worst relative error " << worst_rel_err;
  return os.str();
}

}  // namespace vdslab
