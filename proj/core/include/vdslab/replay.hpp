#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "vdslab/maze.hpp"
#include "vdslab/rng.hpp"
#include "vdslab/vec2.hpp"

namespace vdslab {

struct Transition {
  Vec2 s;
  Action a;
  double r = -1.0;
  Vec2 s_next;
  Vec2 g;
  int t = 0;
  std::int64_t episode_id = 0;
};

// Whole-episode ring buffer. Episodes are stored intact because hindsight
// relabeling needs the achieved positions of later steps; eviction therefore
// drops oldest episodes whole.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double success_radius);

  void push_episode(std::vector<Transition> episode);

  // Each drawn transition is independently relabeled with probability
  // ratio / (1 + ratio); the replacement goal is the achieved next position
  // of a uniformly chosen step at or after the drawn one, and the reward is
  // recomputed under the environment rule.
  std::vector<Transition> sample_batch(std::size_t batch_size, double relabel_ratio,
                                       Rng& rng) const;

  double recompute_reward(const Vec2& s_next, const Vec2& g) const {
    return sparse_reward(s_next, g, success_radius_);
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t episode_count() const { return episodes_.size(); }
  bool empty() const { return size_ == 0; }
  double success_radius() const { return success_radius_; }

  // warm-start snapshot: length-prefixed binary transition records
  void save(const std::string& path) const;
  static ReplayBuffer load(const std::string& path, std::size_t capacity, double success_radius);

 private:
  std::size_t capacity_;
  double success_radius_;
  std::deque<std::vector<Transition>> episodes_;
  std::size_t size_ = 0;
  std::vector<std::size_t> cumulative_;  // running episode end offsets
  void rebuild_cumulative();
};

}  // namespace vdslab
