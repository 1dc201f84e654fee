#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vdslab/rng.hpp"
#include "vdslab/vec2.hpp"

namespace vdslab {

struct Action {
  double speed = 0.0;    // in [0, 1], fraction of max_speed
  double heading = 0.0;  // in [-1, 1], angle = pi * heading
};

struct Goal {
  Vec2 position;
};

struct EnvState {
  Vec2 position;
  int t = 0;
};

// Static 2-D block world. Cell (cx, cy) spans [cx, cx+1) x [cy, cy+1);
// row 0 of the source text is y in [0, 1).
struct Maze {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> blocks;  // row-major, 1 = block
  Vec2 start;
  int horizon = 50;
  double success_radius = 0.3;
  double max_speed = 1.0;

  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cx < width && cy >= 0 && cy < height;
  }
  bool blocked(int cx, int cy) const {
    return !in_bounds(cx, cy) || blocks[static_cast<std::size_t>(cy) * width + cx] != 0;
  }
  bool free_at(const Vec2& p) const;
  int free_cell_count() const;
};

// Grid text: lines over {'#', '.', 'S'}, exactly one 'S'. Optional header
// lines "@horizon=<int>", "@eps=<float>", "@max_speed=<float>" before the grid.
Maze load_maze(const std::string& text);
Maze load_maze_file(const std::string& path);

EnvState reset(const Maze& maze);

// 0 when strictly inside the success radius, -1 otherwise. Single shared
// reward rule; replay relabeling must recompute with exactly this function.
double sparse_reward(const Vec2& pos, const Vec2& goal, double success_radius);

struct StepResult {
  EnvState state;
  double reward = -1.0;
  bool done = false;
};

// Moves to the proposed endpoint if its cell is free and in bounds, stays
// otherwise. Episodes are fixed length: done only at t == horizon.
StepResult step(const Maze& maze, const EnvState& state, const Action& action, const Goal& goal);

// Uniform over the union of free cells (rejection over the bounding box).
Goal sample_goal_uniform(const Maze& maze, Rng& rng);

// Exact finite-horizon Q values for a cell-snapped micro maze; the reference
// the learned ensemble is checked against.
struct MicroQTable {
  std::vector<Vec2> cells;   // free cell centers
  std::vector<Action> actions;
  std::vector<Vec2> goals;
  std::vector<double> q;     // [cell][action][goal]

  double at(std::size_t c, std::size_t a, std::size_t g) const {
    return q[(c * actions.size() + a) * goals.size() + g];
  }
};

MicroQTable solve_micromaze(const Maze& maze, const std::vector<Action>& action_grid,
                            const std::vector<Vec2>& cell_goals, double gamma);

// The 4 axis-aligned unit moves (E, N, W, S in heading order 0, 0.5, 1, -0.5).
std::vector<Action> unit_moves();

std::vector<Vec2> free_cell_centers(const Maze& maze);

}  // namespace vdslab
