#include "cagraph/simulate.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace cagraph {

namespace {

void check_model(const TaskGraph& g, const CostModel& m) {
  if (m.nodes != g.nprocs())
    throw BadShape("cost model says " + std::to_string(m.nodes) + " nodes, graph has " +
                   std::to_string(g.nprocs()));
  if (m.threads < 1) throw BadShape("threads must be >= 1");
  if (m.alpha < 0 || m.beta < 0) throw BadShape("alpha and beta must be nonnegative");
}

} // namespace

double parallel_time(const TaskGraph& g, const TaskSet& s, int threads) {
  if (threads < 1) throw BadShape("threads must be >= 1");
  if (s.empty()) return 0.0;
  for (TaskIndex t : s) g.task(t); // range check -> UnknownTask

  // Depth within the induced subgraph.  Graph levels give a topological
  // order of the members, so one pass suffices.
  std::vector<TaskIndex> order(s);
  std::sort(order.begin(), order.end(),
            [&](TaskIndex a, TaskIndex b) { return g.level(a) < g.level(b); });
  std::vector<char> in_s(g.size(), 0);
  for (TaskIndex t : s) in_s[t] = 1;
  std::vector<int> depth(g.size(), 0);
  int maxd = 0;
  for (TaskIndex t : order) {
    int d = 0;
    for (TaskIndex pr : g.preds(t))
      if (in_s[pr]) d = std::max(d, depth[pr] + 1);
    depth[t] = d;
    maxd = std::max(maxd, d);
  }
  std::vector<double> level_weight(maxd + 1, 0.0);
  for (TaskIndex t : s) level_weight[depth[t]] += g.task(t).weight;
  double total = 0.0;
  for (double w : level_weight) total += std::ceil(w / threads);
  return total;
}

PhaseTrace simulate_blocked(const MacroStepPlan& plan, const TaskGraph& g, const CostModel& m) {
  check_model(g, m);
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    WellFormedness w = verify_well_formed(g, plan.steps[s]);
    if (!w.ok)
      throw MalformedPlan("macro-step " + std::to_string(s) + ": " + w.violations.front().detail);
  }

  PhaseTrace trace;
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    double step_max = 0.0;
    for (const ProcSplit& ps : plan.steps[s].procs) {
      PhaseRow row;
      row.step = static_cast<int>(s);
      row.proc = ps.proc;
      row.k1_tasks = ps.l1.size();
      row.k1_pt = parallel_time(g, ps.l1, m.threads);
      const TaskSet got = ps.received();
      row.recv_elems = got.size();
      row.recv_time = got.empty() ? 0.0 : m.alpha + m.beta * static_cast<double>(got.size());
      row.k2_tasks = ps.l2.size();
      row.k2_pt = parallel_time(g, ps.l2, m.threads);
      const TaskSet l3c = ps.l3_compute();
      row.k3_tasks = l3c.size();
      row.k3_pt = parallel_time(g, l3c, m.threads);
      row.stall = std::max(0.0, row.recv_time - row.k2_pt);
      row.step_total = row.k1_pt + std::max(row.k2_pt, row.recv_time) + row.k3_pt;
      step_max = std::max(step_max, row.step_total);
      trace.rows.push_back(row);
    }
    trace.step_totals.push_back(step_max);
    trace.total += step_max;
  }
  return trace;
}

PhaseTrace simulate_naive(const LevelCover& c, const TaskGraph& g, const CostModel& m) {
  check_model(g, m);
  CoverReport rep = validate_cover(g, c);
  if (!rep.valid)
    throw InvalidCover("simulate_naive needs a valid cover: " + rep.violations.front().detail);

  PhaseTrace trace;
  const int kmax = c.kmax();
  for (int k = 0; k <= kmax; ++k) {
    bool any_cross = false;
    std::size_t max_recv = 0;
    double max_pt = 0.0;
    for (int p = 0; p < g.nprocs(); ++p) {
      PhaseRow row;
      row.step = k;
      row.proc = p;
      auto it = c.blocks.find({k, p});
      const TaskSet empty;
      const TaskSet& block = it == c.blocks.end() ? empty : it->second;
      TaskSet incoming; // distinct remote inputs of the level's block
      for (TaskIndex t : block)
        for (TaskIndex pr : g.preds(t))
          if (g.task(pr).proc != p) set_insert(incoming, pr);
      row.recv_elems = incoming.size();
      row.recv_time =
          incoming.empty() ? 0.0 : m.alpha + m.beta * static_cast<double>(incoming.size());
      row.k3_tasks = block.size();
      row.k3_pt = parallel_time(g, block, m.threads);
      row.stall = std::max(0.0, row.recv_time - row.k2_pt);
      row.step_total = row.k1_pt + std::max(row.k2_pt, row.recv_time) + row.k3_pt;
      any_cross = any_cross || !incoming.empty();
      max_recv = std::max(max_recv, incoming.size());
      max_pt = std::max(max_pt, row.k3_pt);
      trace.rows.push_back(row);
    }
    // The whole machine waits out one message phase per level: latency once,
    // volume and compute by the slowest processor.
    const double level_total =
        (any_cross ? m.alpha : 0.0) + m.beta * static_cast<double>(max_recv) + max_pt;
    trace.step_totals.push_back(level_total);
    trace.total += level_total;
  }
  return trace;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  if (std::floor(v) == v && std::abs(v) < 9.0e15)
    return std::to_string(static_cast<long long>(v));
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_trace(const PhaseTrace& t) {
  std::ostringstream out;
  int nprocs = 0, nsteps = 0;
  for (const PhaseRow& r : t.rows) {
    nprocs = std::max(nprocs, r.proc + 1);
    nsteps = std::max(nsteps, r.step + 1);
  }
  for (int p = 0; p < nprocs; ++p) {
    std::map<int, const PhaseRow*> by_step;
    for (const PhaseRow& r : t.rows)
      if (r.proc == p) by_step[r.step] = &r;

    out << "Graph on node " << p << ",\n";
    out << "    execution of " << nsteps << " macro steps:\n";
    std::vector<std::array<double, 3>> triples;
    double node_total = 0.0;
    for (int s = 0; s < nsteps; ++s) {
      static const PhaseRow zero;
      const PhaseRow& r = by_step.count(s) ? *by_step[s] : zero;
      out << "k1 local execution: " << r.k1_tasks << "\n";
      out << "  parallel time: " << format_number(r.k1_pt) << "\n";
      out << "k3 receive: " << r.recv_elems << "\n";
      out << "k2 local execution: " << r.k2_tasks << "\n";
      out << "  parallel time: " << format_number(r.k2_pt) << "\n";
      out << "k3 local execution: " << r.k3_tasks << "\n";
      out << "  parallel time: " << format_number(r.k3_pt) << "\n";
      triples.push_back({r.k1_pt, std::max(r.k2_pt, r.recv_time), r.k3_pt});
      node_total += r.k1_pt + std::max(r.k2_pt, r.recv_time) + r.k3_pt;
    }
    const bool uniform =
        !triples.empty() &&
        std::all_of(triples.begin(), triples.end(),
                    [&](const std::array<double, 3>& a) { return a == triples.front(); });
    out << "total parallel time : ";
    if (uniform) {
      out << nsteps << "*(" << format_number(triples[0][0]) << "+" << format_number(triples[0][1])
          << "+" << format_number(triples[0][2]) << ")";
    } else {
      for (std::size_t i = 0; i < triples.size(); ++i) {
        if (i) out << " + ";
        out << "(" << format_number(triples[i][0]) << "+" << format_number(triples[i][1]) << "+"
            << format_number(triples[i][2]) << ")";
      }
      if (triples.empty()) out << "0";
    }
    out << " = " << format_number(node_total) << "\n";
    out << "overlap analysis:\n";
    for (int s = 0; s < nsteps; ++s) {
      static const PhaseRow zero;
      const PhaseRow& r = by_step.count(s) ? *by_step[s] : zero;
      out << "  " << r.recv_elems << " tasks to recv, " << format_number(r.k2_pt)
          << " k2 parallel time\n";
    }
    out << "\n";
  }
  out << "combined total parallel time: " << format_number(t.total) << "\n";
  return out.str();
}

TransferSchedule transfer_schedule(const MacroStepPlan& plan, const TaskGraph& g) {
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    WellFormedness w = verify_well_formed(g, plan.steps[s]);
    if (!w.ok)
      throw MalformedPlan("macro-step " + std::to_string(s) + ": " + w.violations.front().detail);
  }

  TransferSchedule sched;
  const int nsteps = static_cast<int>(plan.steps.size());
  for (int s = 0; s < nsteps; ++s) {
    for (const ProcSplit& ps : plan.steps[s].procs)
      for (const auto& [q, elems] : ps.recv)
        for (TaskIndex e : elems) {
          TransferDescriptor d;
          d.element = e;
          d.from = q;
          d.to = ps.proc;
          // Producer finishes inside the macro-step holding its level;
          // initial data is on hand from the start.
          const int lv = g.level(e);
          d.posted_step = lv == 0 ? 0 : (lv - 1) / plan.block;
          d.consumed_step = s;
          sched.descriptors.push_back(d);
        }
  }
  std::sort(sched.descriptors.begin(), sched.descriptors.end(),
            [](const TransferDescriptor& a, const TransferDescriptor& b) {
              return std::tie(a.posted_step, a.from, a.to, a.element) <
                     std::tie(b.posted_step, b.from, b.to, b.element);
            });

  sched.peak_buffer.assign(g.nprocs(), 0);
  if (nsteps > 0) {
    std::vector<std::vector<std::size_t>> live(g.nprocs(),
                                               std::vector<std::size_t>(nsteps, 0));
    for (const TransferDescriptor& d : sched.descriptors)
      for (int s = d.posted_step; s <= d.consumed_step; ++s) ++live[d.to][s];
    for (int p = 0; p < g.nprocs(); ++p) {
      for (std::size_t v : live[p]) sched.peak_buffer[p] = std::max(sched.peak_buffer[p], v);
      sched.peak = std::max(sched.peak, sched.peak_buffer[p]);
    }
  }
  return sched;
}

} // namespace cagraph
