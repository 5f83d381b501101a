#include "cagraph/sweep.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "cagraph/generators.hpp"
#include "cagraph/io.hpp"

namespace cagraph {

TaskGraph build_scenario_graph(const SweepScenario& sc) {
  if (sc.kind == "stencil1d") {
    const Boundary bd = sc.boundary == "periodic" ? Boundary::periodic : Boundary::dirichlet;
    if (sc.boundary != "periodic" && sc.boundary != "dirichlet")
      throw BadShape("unknown boundary '" + sc.boundary + "'");
    return stencil_1d(sc.points, sc.procs, sc.steps, sc.radius, bd);
  }
  if (sc.kind == "random") return random_dag(sc.n, sc.p_edge, sc.procs, sc.seed);
  if (sc.kind == "file") return load_graph(sc.path);
  throw BadShape("unknown graph kind '" + sc.kind + "'");
}

SweepTable strong_scaling_sweep(const SweepScenario& sc) {
  if (sc.alpha.empty() || sc.threads.empty())
    throw BadShape("sweep scenario needs at least one alpha and one thread count");

  SweepTable table;
  table.scenario = sc;
  const TaskGraph g = build_scenario_graph(sc);
  const LevelCover cover = per_level_cover(g);

  std::vector<std::pair<int, MacroStepPlan>> plans;
  for (int b : sc.b) plans.emplace_back(b, blocked_transform(g, cover, b));

  for (double alpha : sc.alpha) {
    for (int w : sc.threads) {
      CostModel m;
      m.alpha = alpha;
      m.beta = sc.beta;
      m.threads = w;
      m.nodes = g.nprocs();
      table.rows.push_back({w, alpha, "naive", 0, simulate_naive(cover, g, m).total});
      for (const auto& [b, plan] : plans)
        table.rows.push_back({w, alpha, "blocked", b, simulate_blocked(plan, g, m).total});
    }
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.alpha, a.variant, a.block, a.threads) <
           std::tie(b.alpha, b.variant, b.block, b.threads);
  });
  return table;
}

std::string gnuplot_columns(const SweepTable& t, double alpha) {
  // Column per variant, row per thread count.
  std::vector<int> blocks;
  std::vector<int> threads;
  for (const SweepRow& r : t.rows) {
    if (r.alpha != alpha) continue;
    if (r.variant == "blocked" &&
        std::find(blocks.begin(), blocks.end(), r.block) == blocks.end())
      blocks.push_back(r.block);
    if (std::find(threads.begin(), threads.end(), r.threads) == threads.end())
      threads.push_back(r.threads);
  }
  std::sort(blocks.begin(), blocks.end());
  std::sort(threads.begin(), threads.end());

  auto total_of = [&](const std::string& variant, int block, int w) -> std::string {
    for (const SweepRow& r : t.rows)
      if (r.alpha == alpha && r.variant == variant && r.block == block && r.threads == w)
        return format_number(r.total);
    return "nan";
  };

  std::ostringstream out;
  out << "# alpha = " << format_number(alpha) << "\n";
  out << "# threads naive";
  for (int b : blocks) out << " blocked_b" << b;
  out << "\n";
  for (int w : threads) {
    out << w << " " << total_of("naive", 0, w);
    for (int b : blocks) out << " " << total_of("blocked", b, w);
    out << "\n";
  }
  return out.str();
}

} // namespace cagraph
