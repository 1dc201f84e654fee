#pragma once

#include <map>
#include <string>

#include "vdslab/mlp.hpp"

namespace vdslab {

// Flat binary parameter snapshot: magic "VDSNN1", uint32 layer count,
// layer sizes as int32, then per layer the weight matrix (row-major) and
// bias vector as float64. All integers and floats little-endian.
void save_mlp(const MlpParams& params, const std::string& path);
MlpParams load_mlp(const std::string& path,
                   Activation hidden = Activation::kRelu,
                   Activation output = Activation::kLinear);

// Plain-text key=value manifest, one pair per line.
void save_manifest(const std::map<std::string, std::string>& kv, const std::string& path);
std::map<std::string, std::string> load_manifest(const std::string& path);

}  // namespace vdslab
