#include "vdslab/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vdslab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts need byte swaps");

namespace vdslab {

namespace {

constexpr char kMagic[6] = {'V', 'D', 'S', 'N', 'N', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_i32(std::ostream& os, std::int32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64s(std::ostream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::int32_t read_i32(std::istream& is) {
  std::int32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void read_f64s(std::istream& is, std::vector<double>& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
}

}  // namespace

void save_mlp(const MlpParams& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UnavailableError("save_mlp: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  write_u32(os, static_cast<std::uint32_t>(params.layer_sizes.size()));
  for (int s : params.layer_sizes) write_i32(os, s);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    write_f64s(os, params.weights[l]);
    write_f64s(os, params.biases[l]);
  }
  if (!os) throw UnavailableError("save_mlp: write failed for " + path);
}

MlpParams load_mlp(const std::string& path, Activation hidden, Activation output) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UnavailableError("load_mlp: cannot open " + path);
  char magic[6];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("load_mlp: bad magic in " + path);
  }
  const std::uint32_t n_sizes = read_u32(is);
  if (n_sizes < 2 || n_sizes > 64) throw ParseError("load_mlp: implausible layer count");
  MlpParams p;
  p.hidden_activation = hidden;
  p.output_activation = output;
  p.layer_sizes.resize(n_sizes);
  for (auto& s : p.layer_sizes) {
    s = read_i32(is);
    if (s < 1) throw ParseError("load_mlp: non-positive layer size");
  }
  p.weights.resize(n_sizes - 1);
  p.biases.resize(n_sizes - 1);
  for (std::size_t l = 0; l + 1 < n_sizes; ++l) {
    p.weights[l].resize(static_cast<std::size_t>(p.layer_sizes[l]) * p.layer_sizes[l + 1]);
    p.biases[l].resize(p.layer_sizes[l + 1]);
    read_f64s(is, p.weights[l]);
    read_f64s(is, p.biases[l]);
  }
  if (!is) throw ParseError("load_mlp: truncated file " + path);
  return p;
}

void save_manifest(const std::map<std::string, std::string>& kv, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw UnavailableError("save_manifest: cannot open " + path);
  for (const auto& [k, v] : kv) {
    os << k << "=" << v << "\n";
  }
}

std::map<std::string, std::string> load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UnavailableError("load_manifest: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("load_manifest: missing '=' in " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace vdslab
