#include "cagraph/generators.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace cagraph {

namespace {

std::string point_id(int i, int t) {
  return "(" + std::to_string(i) + "," + std::to_string(t) + ")";
}

} // namespace

TaskGraph stencil_1d(int points, int procs, int steps, int radius, Boundary boundary) {
  if (points < 1 || procs < 1 || steps < 1 || radius < 1)
    throw BadShape("stencil_1d wants points, procs, steps, radius all >= 1");
  if (procs > points)
    throw BadShape("cannot spread " + std::to_string(points) + " points over " +
                   std::to_string(procs) + " processors");
  if (boundary == Boundary::periodic && radius >= points)
    throw BadShape("periodic radius " + std::to_string(radius) + " wraps onto itself with " +
                   std::to_string(points) + " points");

  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(points) * (steps + 1));
  std::vector<std::pair<std::string, std::string>> edges;
  for (int t = 0; t <= steps; ++t) {
    for (int i = 0; i < points; ++i) {
      Task task;
      task.id = point_id(i, t);
      task.proc = static_cast<int>(static_cast<long long>(i) * procs / points);
      task.weight = t == 0 ? 0.0 : 1.0; // level 0 is initial data, not work
      tasks.push_back(std::move(task));
      if (t == 0) continue;
      for (int d = -radius; d <= radius; ++d) {
        int j = i + d;
        if (boundary == Boundary::dirichlet) {
          if (j < 0 || j >= points) continue;
        } else {
          j = ((j % points) + points) % points;
        }
        edges.emplace_back(point_id(j, t - 1), point_id(i, t));
      }
    }
  }
  return TaskGraph::build(tasks, edges, procs);
}

LevelCover per_level_cover(const TaskGraph& g) {
  LevelCover c;
  for (TaskIndex t = 0; t < g.size(); ++t)
    c.blocks[{g.level(t), g.task(t).proc}].push_back(t); // index order == sorted
  return c;
}

TaskGraph random_dag(int n, double p_edge, int procs, std::uint64_t seed) {
  if (n < 0) throw BadShape("random_dag wants n >= 0");
  if (procs < 1) throw BadShape("random_dag wants at least one processor");
  if (p_edge < 0.0) p_edge = 0.0;
  if (p_edge > 1.0) p_edge = 1.0;

  std::mt19937_64 rng(seed);
  // Raw engine output only: the distribution classes are not pinned across
  // standard libraries, and these graphs must reproduce from their seed.
  auto unit = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

  const int width = static_cast<int>(std::to_string(n > 0 ? n - 1 : 0).size());
  auto name = [&](int i) {
    std::string digits = std::to_string(i);
    return "t" + std::string(width - static_cast<int>(digits.size()), '0') + digits;
  };

  std::vector<Task> tasks(n);
  for (int i = 0; i < n; ++i) {
    tasks[i].id = name(i);
    tasks[i].proc = static_cast<int>(rng() % static_cast<std::uint64_t>(procs));
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (unit() < p_edge) edges.emplace_back(name(i), name(j));
  return TaskGraph::build(tasks, edges, procs);
}

} // namespace cagraph
