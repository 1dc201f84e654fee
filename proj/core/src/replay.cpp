#include "vdslab/replay.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "vdslab/errors.hpp"

namespace vdslab {

ReplayBuffer::ReplayBuffer(std::size_t capacity, double success_radius)
    : capacity_(capacity), success_radius_(success_radius) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
  if (success_radius_ <= 0.0) throw ConfigError("replay success radius must be positive");
}

void ReplayBuffer::push_episode(std::vector<Transition> episode) {
  if (episode.empty()) throw ProtocolError("push_episode: empty episode");
  const std::int64_t id = episode.front().episode_id;
  for (std::size_t i = 0; i < episode.size(); ++i) {
    if (episode[i].episode_id != id) {
      throw ProtocolError("push_episode: mixed episode ids");
    }
    if (episode[i].t != static_cast<int>(i)) {
      throw ProtocolError("push_episode: step indices must be contiguous from 0, got " +
                          std::to_string(episode[i].t) + " at position " + std::to_string(i));
    }
  }
  size_ += episode.size();
  episodes_.push_back(std::move(episode));
  while (size_ > capacity_ && !episodes_.empty()) {
    size_ -= episodes_.front().size();
    episodes_.pop_front();
  }
  rebuild_cumulative();
}

void ReplayBuffer::rebuild_cumulative() {
  cumulative_.clear();
  cumulative_.reserve(episodes_.size());
  std::size_t acc = 0;
  for (const auto& ep : episodes_) {
    acc += ep.size();
    cumulative_.push_back(acc);
  }
}

std::vector<Transition> ReplayBuffer::sample_batch(std::size_t batch_size,
                                                   double relabel_ratio, Rng& rng) const {
  if (batch_size == 0) throw ConfigError("sample_batch: batch_size must be positive");
  if (relabel_ratio < 0.0) throw ConfigError("sample_batch: relabel_ratio must be >= 0");
  if (size_ == 0) throw UnavailableError("sample_batch: buffer is empty");

  const double p_relabel = relabel_ratio / (1.0 + relabel_ratio);
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto flat = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(size_) - 1));
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), flat);
    const std::size_t ep_idx = static_cast<std::size_t>(it - cumulative_.begin());
    const std::vector<Transition>& ep = episodes_[ep_idx];
    const std::size_t offset = flat - (ep_idx == 0 ? 0 : cumulative_[ep_idx - 1]);
    Transition tr = ep[offset];
    if (relabel_ratio > 0.0 && rng.uniform(0.0, 1.0) < p_relabel) {
      // "future" strategy: the achieved position of a step at or after this
      // one, i.e. a state strictly later in the episode
      const std::size_t j = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(offset), static_cast<std::int64_t>(ep.size()) - 1));
      tr.g = ep[j].s_next;
      tr.r = recompute_reward(tr.s_next, tr.g);
    }
    batch.push_back(tr);
  }
  return batch;
}

namespace {

constexpr std::size_t kRecordDoubles = 11;

void encode(const Transition& tr, double* out) {
  out[0] = tr.s.x;
  out[1] = tr.s.y;
  out[2] = tr.a.speed;
  out[3] = tr.a.heading;
  out[4] = tr.r;
  out[5] = tr.s_next.x;
  out[6] = tr.s_next.y;
  out[7] = tr.g.x;
  out[8] = tr.g.y;
  out[9] = static_cast<double>(tr.t);
  out[10] = static_cast<double>(tr.episode_id);
}

Transition decode(const double* in) {
  Transition tr;
  tr.s = {in[0], in[1]};
  tr.a = {in[2], in[3]};
  tr.r = in[4];
  tr.s_next = {in[5], in[6]};
  tr.g = {in[7], in[8]};
  tr.t = static_cast<int>(in[9]);
  tr.episode_id = static_cast<std::int64_t>(in[10]);
  return tr;
}

}  // namespace

void ReplayBuffer::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UnavailableError("replay save: cannot open " + path);
  double rec[kRecordDoubles];
  for (const auto& ep : episodes_) {
    for (const Transition& tr : ep) {
      const std::uint32_t len = kRecordDoubles * sizeof(double);
      os.write(reinterpret_cast<const char*>(&len), sizeof(len));
      encode(tr, rec);
      os.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    }
  }
}

ReplayBuffer ReplayBuffer::load(const std::string& path, std::size_t capacity,
                                double success_radius) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UnavailableError("replay load: cannot open " + path);
  ReplayBuffer buf(capacity, success_radius);
  std::vector<Transition> episode;
  double rec[kRecordDoubles];
  for (;;) {
    std::uint32_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!is) break;
    if (len != kRecordDoubles * sizeof(double)) {
      throw ParseError("replay load: unexpected record length " + std::to_string(len));
    }
    is.read(reinterpret_cast<char*>(rec), sizeof(rec));
    if (!is) throw ParseError("replay load: truncated record");
    Transition tr = decode(rec);
    if (tr.t == 0 && !episode.empty()) {
      buf.push_episode(std::move(episode));
      episode.clear();
    }
    episode.push_back(tr);
  }
  if (!episode.empty()) buf.push_episode(std::move(episode));
  return buf;
}

}  // namespace vdslab
