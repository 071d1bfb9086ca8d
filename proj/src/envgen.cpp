// Copyright 2026 The lflh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lflh/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "lflh/common.hpp"
#include "lflh/rng.hpp"

namespace lflh {

OccupancyGrid generate_ca_env(std::uint64_t seed, const CaParams& params) {
  LFLH_REQUIRE(params.width >= 10 && params.height >= 10,
               "generate_ca_env: grid must be at least 10x10");
  LFLH_REQUIRE(params.fill_probability >= 0.0 && params.fill_probability <= 1.0,
               "generate_ca_env: fill probability in [0,1]");
  Rng rng(mix_seed(seed, 0x6361656eULL));
  OccupancyGrid g = make_grid(params.width, params.height, params.resolution);

  const auto border = [&](int cx, int cy) {
    return cx == 0 || cy == 0 || cx == g.width - 1 || cy == g.height - 1;
  };
  for (int cy = 0; cy < g.height; ++cy)
    for (int cx = 0; cx < g.width; ++cx)
      g.set(cx, cy, border(cx, cy) || rng.uniform() < params.fill_probability);

  OccupancyGrid next = g;
  for (int it = 0; it < params.smoothing_iterations; ++it) {
    for (int cy = 0; cy < g.height; ++cy) {
      for (int cx = 0; cx < g.width; ++cx) {
        if (border(cx, cy)) {
          next.set(cx, cy, true);
          continue;
        }
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            if ((dx || dy) && g.occupied(cx + dx, cy + dy)) ++n;
        next.set(cx, cy, n >= 5);
      }
    }
    std::swap(g, next);
  }
  return g;
}

namespace {

struct AStarNode {
  double f;
  int idx;
  bool operator>(const AStarNode& o) const { return f > o.f; }
};

// 8-connected A* over free cells of `grid`; returns cell index path or
// empty when unreachable.
std::vector<int> astar_cells(const OccupancyGrid& grid, int sx, int sy,
                             int gx, int gy) {
  const int w = grid.width, h = grid.height;
  const auto idx = [w](int x, int y) { return y * w + x; };
  if (!grid.in_bounds(sx, sy) || !grid.in_bounds(gx, gy)) return {};
  if (grid.occupied(sx, sy) || grid.occupied(gx, gy)) return {};

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> gcost(static_cast<std::size_t>(w) * h, kInf);
  std::vector<int> parent(static_cast<std::size_t>(w) * h, -1);
  std::priority_queue<AStarNode, std::vector<AStarNode>, std::greater<>> open;

  const auto heuristic = [&](int x, int y) {
    const double dx = std::abs(x - gx), dy = std::abs(y - gy);
    return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
  };
  gcost[idx(sx, sy)] = 0.0;
  open.push({heuristic(sx, sy), idx(sx, sy)});
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    const int cx = cur % w, cy = cur / w;
    if (cx == gx && cy == gy) {
      std::vector<int> path;
      for (int n = cur; n != -1; n = parent[n]) path.push_back(n);
      std::reverse(path.begin(), path.end());
      return path;
    }
    if (f > gcost[cur] + heuristic(cx, cy) + 1e-12) continue;  // stale entry
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy) continue;
        const int nx = cx + dx, ny = cy + dy;
        if (!grid.in_bounds(nx, ny) || grid.occupied(nx, ny)) continue;
        // forbid cutting corners diagonally between two occupied cells
        if (dx && dy &&
            (grid.occupied(cx + dx, cy) || grid.occupied(cx, cy + dy)))
          continue;
        const double step = (dx && dy) ? std::sqrt(2.0) : 1.0;
        const double cand = gcost[cur] + step;
        if (cand < gcost[idx(nx, ny)] - 1e-12) {
          gcost[idx(nx, ny)] = cand;
          parent[idx(nx, ny)] = cur;
          open.push({cand + heuristic(nx, ny), idx(nx, ny)});
        }
      }
    }
  }
  return {};
}

std::vector<Pose2> densify_path(const OccupancyGrid& grid,
                                const std::vector<int>& cells,
                                const Pose2& start, const Pose2& goal) {
  // cell centers, with exact endpoints substituted
  std::vector<Vec2> pts;
  pts.reserve(cells.size());
  for (int c : cells)
    pts.push_back(grid.cell_center(c % grid.width, c / grid.width));
  if (!pts.empty()) {
    pts.front() = {start.x, start.y};
    pts.back() = {goal.x, goal.y};
  }
  std::vector<Pose2> out;
  const double max_step = grid.resolution;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i], b = pts[i + 1];
    const double len = (b - a).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_step)));
    const double heading = std::atan2(b.y - a.y, b.x - a.x);
    for (int k = 0; k < pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), heading});
    }
  }
  if (!pts.empty()) {
    const double heading = out.empty() ? goal.phi : out.back().phi;
    out.push_back({pts.back().x, pts.back().y, heading});
  }
  return out;
}

}  // namespace

std::optional<std::pair<Pose2, Pose2>> place_start_goal(
    const OccupancyGrid& grid, std::uint64_t seed, double min_separation,
    double footprint_radius, int max_tries) {
  const OccupancyGrid inflated = inflate(grid, footprint_radius);
  std::vector<std::pair<int, int>> free_cells;
  for (int cy = 0; cy < grid.height; ++cy)
    for (int cx = 0; cx < grid.width; ++cx)
      if (!inflated.occupied(cx, cy)) free_cells.emplace_back(cx, cy);
  if (free_cells.size() < 2) return std::nullopt;

  Rng rng(mix_seed(seed, 0x706c6163ULL));
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    const auto [sx, sy] = free_cells[rng.uniform_index(free_cells.size())];
    const auto [gx, gy] = free_cells[rng.uniform_index(free_cells.size())];
    const Vec2 sp = grid.cell_center(sx, sy), gp = grid.cell_center(gx, gy);
    if ((gp - sp).norm() < min_separation) continue;
    const auto cells = astar_cells(inflated, sx, sy, gx, gy);
    if (cells.empty()) continue;
    return std::make_pair(Pose2{sp.x, sp.y, 0.0}, Pose2{gp.x, gp.y, 0.0});
  }
  return std::nullopt;
}

std::optional<std::vector<Pose2>> plan_global_path(const OccupancyGrid& grid,
                                                   const Pose2& start,
                                                   const Pose2& goal,
                                                   double footprint_radius) {
  const OccupancyGrid inflated = inflate(grid, footprint_radius);
  const int sx = grid.cell_x(start.x), sy = grid.cell_y(start.y);
  const int gx = grid.cell_x(goal.x), gy = grid.cell_y(goal.y);
  if (sx == gx && sy == gy)
    return std::vector<Pose2>{{start.x, start.y, start.phi}};
  const auto cells = astar_cells(inflated, sx, sy, gx, gy);
  if (cells.empty()) return std::nullopt;
  return densify_path(grid, cells, start, goal);
}

Pose2 local_goal(const std::vector<Pose2>& global_path, const Pose2& robot,
                 double lookahead) {
  LFLH_REQUIRE(!global_path.empty(), "local_goal: empty path");
  const Vec2 rp{robot.x, robot.y};

  // nearest point on the path polyline (projected onto segments)
  std::size_t best_seg = 0;
  double best_t = 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  if (global_path.size() == 1) {
    best_seg = 0;
    best_t = 0.0;
    best_d = 0.0;
  }
  for (std::size_t i = 0; i + 1 < global_path.size(); ++i) {
    const Vec2 a{global_path[i].x, global_path[i].y};
    const Vec2 b{global_path[i + 1].x, global_path[i + 1].y};
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    const double t =
        len2 > 0.0 ? std::clamp((rp - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const double d = (rp - (a + ab * t)).norm();
    if (d < best_d) {
      best_d = d;
      best_seg = i;
      best_t = t;
    }
  }

  // advance `lookahead` of arc length beyond the projection
  Pose2 target = global_path.back();
  double remaining = lookahead;
  Vec2 cur;
  {
    const Vec2 a{global_path[best_seg].x, global_path[best_seg].y};
    const Vec2 b{global_path[best_seg + (global_path.size() > 1 ? 1 : 0)].x,
                 global_path[best_seg + (global_path.size() > 1 ? 1 : 0)].y};
    cur = a + (b - a) * best_t;
  }
  bool found = false;
  for (std::size_t i = best_seg; i + 1 < global_path.size(); ++i) {
    const Vec2 b{global_path[i + 1].x, global_path[i + 1].y};
    const double seg = (b - cur).norm();
    if (seg >= remaining && seg > 0.0) {
      const double t = remaining / seg;
      target = {cur.x + t * (b.x - cur.x), cur.y + t * (b.y - cur.y),
                global_path[i + 1].phi};
      found = true;
      break;
    }
    remaining -= seg;
    cur = b;
  }
  if (!found) target = global_path.back();

  const Vec2 local = world_to_frame(robot, {target.x, target.y});
  return {local.x, local.y, wrap_angle(target.phi - robot.phi)};
}

NavTask generate_task(std::uint64_t seed, const CaParams& params,
                      double min_separation, double footprint_radius,
                      int* attempts_out) {
  constexpr int kMaxEnvAttempts = 500;
  for (int attempt = 0; attempt < kMaxEnvAttempts; ++attempt) {
    const std::uint64_t env_seed = seed + static_cast<std::uint64_t>(attempt);
    OccupancyGrid grid = generate_ca_env(env_seed, params);
    const auto placed = place_start_goal(grid, env_seed, min_separation,
                                         footprint_radius);
    if (!placed) continue;
    auto path = plan_global_path(grid, placed->first, placed->second,
                                 footprint_radius);
    if (!path || path->size() < 2) continue;
    NavTask task;
    task.grid = std::move(grid);
    task.start = placed->first;
    task.goal = placed->second;
    task.global_path = std::move(*path);
    task.seed = env_seed;
    // align the initial heading with the first path segment
    task.start.phi = std::atan2(task.global_path[1].y - task.global_path[0].y,
                                task.global_path[1].x - task.global_path[0].x);
    if (attempts_out) *attempts_out = attempt + 1;
    return task;
  }
  throw std::runtime_error(
      "generate_task: no valid environment within the seed retry budget");
}

void save_task(const std::string& path, const NavTask& task) {
  std::ostringstream meta;
  meta << "seed=" << task.seed;
  save_grid(path, task.grid, meta.str());
  std::ofstream out(path, std::ios::app);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "start %.17g %.17g %.17g\n", task.start.x,
                task.start.y, task.start.phi);
  out << buf;
  std::snprintf(buf, sizeof(buf), "goal %.17g %.17g %.17g\n", task.goal.x,
                task.goal.y, task.goal.phi);
  out << buf;
  out << "path " << task.global_path.size() << "\n";
  for (const auto& p : task.global_path) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.phi);
    out << buf;
  }
  if (!out) throw std::runtime_error("failed writing task: " + path);
}

NavTask load_task(const std::string& path) {
  NavTask task;
  task.grid = load_grid(path);
  std::ifstream in(path);
  std::string line;
  // skip grid section: header lines, metadata, `height` cell rows
  int skip_rows = task.grid.height;
  bool meta_seen = false;
  while (std::getline(in, line)) {
    if (!meta_seen) {
      if (!line.empty() && line[0] != '#') meta_seen = true;
      continue;
    }
    if (skip_rows-- <= 0) break;
  }
  if (std::sscanf(line.c_str(), "start %lg %lg %lg", &task.start.x,
                  &task.start.y, &task.start.phi) != 3)
    throw std::runtime_error("bad task start row: " + path);
  std::getline(in, line);
  if (std::sscanf(line.c_str(), "goal %lg %lg %lg", &task.goal.x, &task.goal.y,
                  &task.goal.phi) != 3)
    throw std::runtime_error("bad task goal row: " + path);
  std::getline(in, line);
  std::size_t n = 0;
  if (std::sscanf(line.c_str(), "path %zu", &n) != 1)
    throw std::runtime_error("bad task path row: " + path);
  task.global_path.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("truncated task file: " + path);
    Pose2 p;
    if (std::sscanf(line.c_str(), "%lg %lg %lg", &p.x, &p.y, &p.phi) != 3)
      throw std::runtime_error("bad task path point: " + path);
    task.global_path.push_back(p);
  }
  return task;
}

}  // namespace lflh
