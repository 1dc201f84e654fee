#include "vdslab/maze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vdslab/errors.hpp"

namespace vdslab {

bool Maze::free_at(const Vec2& p) const {
  const int cx = static_cast<int>(std::floor(p.x));
  const int cy = static_cast<int>(std::floor(p.y));
  return !blocked(cx, cy);
}

int Maze::free_cell_count() const {
  int n = 0;
  for (std::uint8_t b : blocks) n += (b == 0);
  return n;
}

namespace {

void parse_header(Maze& maze, const std::string& line, int row) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ParseError("maze header missing '=' at row " + std::to_string(row));
  }
  const std::string key = line.substr(1, eq - 1);
  const std::string val = line.substr(eq + 1);
  try {
    if (key == "horizon") {
      maze.horizon = std::stoi(val);
    } else if (key == "eps") {
      maze.success_radius = std::stod(val);
    } else if (key == "max_speed") {
      maze.max_speed = std::stod(val);
    } else {
      throw ParseError("unknown maze header '" + key + "' at row " + std::to_string(row));
    }
  } catch (const std::invalid_argument&) {
    throw ParseError("bad value for maze header '" + key + "' at row " + std::to_string(row));
  }
  if (maze.horizon < 1) throw ParseError("maze horizon must be >= 1");
  if (maze.success_radius <= 0.0) throw ParseError("maze eps must be positive");
  if (maze.max_speed <= 0.0) throw ParseError("maze max_speed must be positive");
}

}  // namespace

Maze load_maze(const std::string& text) {
  Maze maze;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> rows;
  int source_row = 0;
  bool grid_started = false;
  while (std::getline(in, line)) {
    ++source_row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '@') {
      if (grid_started) {
        throw ParseError("maze header after grid at row " + std::to_string(source_row));
      }
      parse_header(maze, line, source_row);
      continue;
    }
    grid_started = true;
    rows.push_back(line);
  }
  if (rows.empty()) throw ParseError("maze grid is empty");
  maze.height = static_cast<int>(rows.size());
  maze.width = static_cast<int>(rows[0].size());
  maze.blocks.assign(static_cast<std::size_t>(maze.width) * maze.height, 0);
  int starts = 0;
  for (int ry = 0; ry < maze.height; ++ry) {
    const std::string& r = rows[ry];
    if (static_cast<int>(r.size()) != maze.width) {
      throw ParseError("ragged maze row " + std::to_string(ry) + ": length " +
                       std::to_string(r.size()) + " != " + std::to_string(maze.width));
    }
    for (int rx = 0; rx < maze.width; ++rx) {
      const char c = r[rx];
      const std::size_t idx = static_cast<std::size_t>(ry) * maze.width + rx;
      if (c == '#') {
        maze.blocks[idx] = 1;
      } else if (c == '.') {
        maze.blocks[idx] = 0;
      } else if (c == 'S') {
        maze.blocks[idx] = 0;
        maze.start = {rx + 0.5, ry + 0.5};
        ++starts;
      } else {
        throw ParseError(std::string("unknown maze character '") + c + "' at row " +
                         std::to_string(ry) + ", column " + std::to_string(rx));
      }
    }
  }
  if (starts == 0) throw ParseError("maze has no start cell 'S'");
  if (starts > 1) throw ParseError("maze has " + std::to_string(starts) + " start cells");
  return maze;
}

Maze load_maze_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UnavailableError("cannot open maze file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return load_maze(ss.str());
}

EnvState reset(const Maze& maze) { return EnvState{maze.start, 0}; }

double sparse_reward(const Vec2& pos, const Vec2& goal, double success_radius) {
  return dist(pos, goal) < success_radius ? 0.0 : -1.0;
}

StepResult step(const Maze& maze, const EnvState& state, const Action& action,
                const Goal& goal) {
  if (state.t >= maze.horizon) {
    throw ProtocolError("step: episode already finished (t = " + std::to_string(state.t) + ")");
  }
  const double speed = std::clamp(action.speed, 0.0, 1.0);
  const double heading = std::clamp(action.heading, -1.0, 1.0);
  const double angle = std::numbers::pi * heading;
  const Vec2 proposed = {state.position.x + speed * maze.max_speed * std::cos(angle),
                         state.position.y + speed * maze.max_speed * std::sin(angle)};
  StepResult out;
  out.state.position = maze.free_at(proposed) ? proposed : state.position;
  out.state.t = state.t + 1;
  out.reward = sparse_reward(out.state.position, goal.position, maze.success_radius);
  out.done = out.state.t == maze.horizon;
  return out;
}

Goal sample_goal_uniform(const Maze& maze, Rng& rng) {
  for (;;) {
    const Vec2 p = {rng.uniform(0.0, maze.width), rng.uniform(0.0, maze.height)};
    if (maze.free_at(p)) return Goal{p};
  }
}

std::vector<Action> unit_moves() {
  return {Action{1.0, 0.0}, Action{1.0, 0.5}, Action{1.0, 1.0}, Action{1.0, -0.5}};
}

std::vector<Vec2> free_cell_centers(const Maze& maze) {
  std::vector<Vec2> centers;
  for (int cy = 0; cy < maze.height; ++cy) {
    for (int cx = 0; cx < maze.width; ++cx) {
      if (!maze.blocked(cx, cy)) centers.push_back({cx + 0.5, cy + 0.5});
    }
  }
  return centers;
}

MicroQTable solve_micromaze(const Maze& maze, const std::vector<Action>& action_grid,
                            const std::vector<Vec2>& cell_goals, double gamma) {
  if (maze.width * maze.height > 64) {
    throw ConfigError("solve_micromaze: maze has " +
                      std::to_string(maze.width * maze.height) + " cells, limit is 64");
  }
  // integer lattice displacements; anything else is not a unit move
  std::vector<std::pair<int, int>> moves;
  for (const Action& a : action_grid) {
    const double angle = std::numbers::pi * std::clamp(a.heading, -1.0, 1.0);
    const double dx = std::clamp(a.speed, 0.0, 1.0) * maze.max_speed * std::cos(angle);
    const double dy = std::clamp(a.speed, 0.0, 1.0) * maze.max_speed * std::sin(angle);
    const int ix = static_cast<int>(std::lround(dx));
    const int iy = static_cast<int>(std::lround(dy));
    if (std::abs(dx - ix) > 1e-6 || std::abs(dy - iy) > 1e-6 || std::abs(ix) + std::abs(iy) != 1) {
      throw ConfigError("solve_micromaze: actions must be unit lattice moves");
    }
    moves.emplace_back(ix, iy);
  }

  MicroQTable table;
  table.actions = action_grid;
  table.goals = cell_goals;
  table.cells = free_cell_centers(maze);

  const std::size_t nc = table.cells.size();
  const std::size_t na = moves.size();
  const std::size_t ng = cell_goals.size();

  std::vector<int> cell_of_grid(static_cast<std::size_t>(maze.width) * maze.height, -1);
  for (std::size_t c = 0; c < nc; ++c) {
    const int cx = static_cast<int>(table.cells[c].x);
    const int cy = static_cast<int>(table.cells[c].y);
    cell_of_grid[static_cast<std::size_t>(cy) * maze.width + cx] = static_cast<int>(c);
  }

  // successor cell and one-step reward per (cell, action, goal)
  std::vector<std::size_t> succ(nc * na);
  std::vector<double> reward(nc * na * ng);
  for (std::size_t c = 0; c < nc; ++c) {
    const int cx = static_cast<int>(table.cells[c].x);
    const int cy = static_cast<int>(table.cells[c].y);
    for (std::size_t a = 0; a < na; ++a) {
      const int nx = cx + moves[a].first;
      const int ny = cy + moves[a].second;
      std::size_t next = c;
      if (!maze.blocked(nx, ny)) {
        next = static_cast<std::size_t>(cell_of_grid[static_cast<std::size_t>(ny) * maze.width + nx]);
      }
      succ[c * na + a] = next;
      for (std::size_t g = 0; g < ng; ++g) {
        reward[(c * na + a) * ng + g] =
            sparse_reward(table.cells[next], cell_goals[g], maze.success_radius);
      }
    }
  }

  // backward induction: q holds Q with k actions remaining, k = 1..horizon
  std::vector<double> prev_v(nc * ng, 0.0);  // max_a Q^{k-1}
  std::vector<double> q(nc * na * ng, 0.0);
  for (int k = 1; k <= maze.horizon; ++k) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t a = 0; a < na; ++a) {
        const std::size_t next = succ[c * na + a];
        for (std::size_t g = 0; g < ng; ++g) {
          q[(c * na + a) * ng + g] = reward[(c * na + a) * ng + g] + gamma * prev_v[next * ng + g];
        }
      }
    }
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t g = 0; g < ng; ++g) {
        double best = q[(c * na + 0) * ng + g];
        for (std::size_t a = 1; a < na; ++a) {
          best = std::max(best, q[(c * na + a) * ng + g]);
        }
        prev_v[c * ng + g] = best;
      }
    }
  }
  table.q = std::move(q);
  return table;
}

}  // namespace vdslab
