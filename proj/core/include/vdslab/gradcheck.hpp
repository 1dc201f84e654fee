#pragma once

#include <cstdint>
#include <string>

namespace vdslab {

struct GradCheckReport {
  int networks = 0;
  long long gradients = 0;
  double worst_rel_err = 0.0;
  long long failures = 0;
  bool pass() const { return networks > 0 && failures == 0; }
  std::string summary() const;
};

// Compares every backpropagated parameter and input gradient of randomly
// drawn small networks against central finite differences (h = 1e-5),
// at relative tolerance 1e-4 with a 1e-7 absolute floor.
GradCheckReport run_gradient_suite(int n_networks, std::uint64_t seed);

}  // namespace vdslab
