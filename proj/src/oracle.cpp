#include "cagraph/simulate.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

namespace cagraph {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

void check_oracle_model(const TaskGraph& g, const CostModel& m) {
  if (m.nodes != g.nprocs())
    throw BadShape("cost model says " + std::to_string(m.nodes) + " nodes, graph has " +
                   std::to_string(g.nprocs()));
  if (m.threads < 1) throw BadShape("threads must be >= 1");
  if (m.alpha < 0 || m.beta < 0) throw BadShape("alpha and beta must be nonnegative");
}

void verify_plan(const TaskGraph& g, const MacroStepPlan& plan) {
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    WellFormedness w = verify_well_formed(g, plan.steps[s]);
    if (!w.ok)
      throw MalformedPlan("macro-step " + std::to_string(s) + ": " + w.violations.front().detail);
  }
}

} // namespace

double event_sim_oracle(const TaskGraph& g, const std::vector<std::vector<TaskIndex>>& schedule,
                        const std::vector<OracleMessage>& comm, const CostModel& m) {
  check_oracle_model(g, m);
  const int P = g.nprocs();
  if (static_cast<int>(schedule.size()) != P)
    throw BadShape("schedule wants one task list per processor");

  // avail[p][t]: when t's value exists on p.  Tasks no schedule computes are
  // initial data, on their owner from the start.
  std::vector<std::vector<double>> avail(P, std::vector<double>(g.size(), kNever));
  std::vector<char> computed_somewhere(g.size(), 0);
  for (const auto& list : schedule)
    for (TaskIndex t : list) {
      g.task(t); // UnknownTask on bad index
      computed_somewhere[t] = 1;
    }
  for (TaskIndex t = 0; t < g.size(); ++t)
    if (!computed_somewhere[t]) avail[g.task(t).proc][t] = 0.0;

  // Message bookkeeping: a message leaves once the sender holds every
  // element and earliest_send has passed.
  struct MsgState {
    int missing = 0;
    double hold = 0.0; // max(earliest_send, element availability so far)
  };
  std::vector<MsgState> msg(comm.size());
  std::vector<std::vector<std::size_t>> msgs_waiting_on(
      static_cast<std::size_t>(P) * std::max<std::size_t>(g.size(), 1));
  auto slot = [&](int p, TaskIndex t) {
    return static_cast<std::size_t>(p) * g.size() + static_cast<std::size_t>(t);
  };

  // Event queue: (time, kind 0=arrival/1=finish, proc, seq).  Arrivals first
  // at equal times so freshly landed data is visible to task starts.
  using Event = std::tuple<double, int, int, std::size_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::size_t seq = 0;

  std::vector<std::vector<std::size_t>> arrival_payload; // msg index per arrival event
  std::vector<std::pair<int, TaskIndex>> finish_payload; // (proc, task) per finish event

  auto post_arrival = [&](std::size_t mi, double departure) {
    const double at =
        departure + m.alpha + m.beta * static_cast<double>(comm[mi].elements.size());
    arrival_payload.push_back({mi});
    events.emplace(at, 0, comm[mi].to, arrival_payload.size() - 1);
  };

  for (std::size_t mi = 0; mi < comm.size(); ++mi) {
    const OracleMessage& msg_in = comm[mi];
    if (msg_in.from < 0 || msg_in.from >= P || msg_in.to < 0 || msg_in.to >= P)
      throw BadShape("message between unknown processors");
    msg[mi].hold = msg_in.earliest_send;
    for (TaskIndex e : msg_in.elements) {
      g.task(e);
      const double a = avail[msg_in.from][e];
      if (a == kNever) {
        ++msg[mi].missing;
        msgs_waiting_on[slot(msg_in.from, e)].push_back(mi);
      } else {
        msg[mi].hold = std::max(msg[mi].hold, a);
      }
    }
    if (msg[mi].missing == 0) post_arrival(mi, msg[mi].hold);
  }

  std::vector<std::vector<char>> started(P);
  std::vector<std::size_t> scan_from(P, 0);
  std::vector<int> free_threads(P, m.threads);
  for (int p = 0; p < P; ++p) started[p].assign(schedule[p].size(), 0);

  double makespan = 0.0;

  auto element_landed = [&](int p, TaskIndex t, double at) {
    if (avail[p][t] <= at) return;
    avail[p][t] = at;
    auto& waiters = msgs_waiting_on[slot(p, t)];
    for (std::size_t mi : waiters) {
      msg[mi].hold = std::max(msg[mi].hold, at);
      if (--msg[mi].missing == 0) post_arrival(mi, msg[mi].hold);
    }
    waiters.clear(); // the first landing satisfies every waiter exactly once
  };

  // In-order issue: only the head of the remaining list may launch.  A
  // blocked head stalls the whole processor, which is what makes earlier
  // data arrivals monotone improvements instead of reshuffling hazards.
  auto try_start = [&](int p, double now) {
    while (scan_from[p] < schedule[p].size() && free_threads[p] > 0) {
      const TaskIndex t = schedule[p][scan_from[p]];
      bool ready = true;
      for (TaskIndex pr : g.preds(t))
        if (avail[p][pr] > now) {
          ready = false;
          break;
        }
      if (!ready) break;
      started[p][scan_from[p]] = 1;
      ++scan_from[p];
      --free_threads[p];
      finish_payload.emplace_back(p, t);
      events.emplace(now + g.task(t).weight, 1, p, finish_payload.size() - 1);
    }
  };

  for (int p = 0; p < P; ++p) try_start(p, 0.0);

  while (!events.empty()) {
    auto [time, kind, proc, payload] = events.top();
    events.pop();
    makespan = std::max(makespan, time);
    if (kind == 0) {
      const std::size_t mi = arrival_payload[payload].front();
      for (TaskIndex e : comm[mi].elements) element_landed(comm[mi].to, e, time);
    } else {
      const auto [p, t] = finish_payload[payload];
      ++free_threads[p];
      element_landed(p, t, time);
    }
    try_start(proc, time);
  }

  // Anything never started means its inputs can never materialize.
  std::string stuck;
  for (int p = 0; p < P; ++p)
    for (std::size_t i = 0; i < schedule[p].size(); ++i)
      if (!started[p][i]) {
        const TaskIndex t = schedule[p][i];
        TaskIndex miss = -1;
        for (TaskIndex pr : g.preds(t))
          if (avail[p][pr] == kNever) {
            miss = pr;
            break;
          }
        if (!stuck.empty()) stuck += "; ";
        stuck += "processor " + std::to_string(p) + " stuck on '" + g.task(t).id + "'";
        if (miss >= 0) stuck += " missing '" + g.task(miss).id + "'";
        if (stuck.size() > 300) {
          stuck += "; ...";
          p = P; // enough detail
          break;
        }
      }
  if (!stuck.empty()) throw Deadlock(stuck);
  return makespan;
}

namespace {

// Duration of one dependency wave on `threads` workers: tasks go to the
// least-loaded worker in id order, the wave lasts as long as the fullest
// worker.  Unit weights make this ceil(n / threads).
double wave_time(const TaskGraph& g, const std::vector<TaskIndex>& wave, int threads) {
  std::vector<double> load(threads, 0.0);
  for (TaskIndex t : wave)
    *std::min_element(load.begin(), load.end()) += g.task(t).weight;
  return *std::max_element(load.begin(), load.end());
}

// Dependency waves of a phase set: wave 0 is every task with no predecessor
// inside the set, wave d+1 depends on wave d.  Each wave comes out in id
// order.
std::vector<std::vector<TaskIndex>> waves_of(const TaskGraph& g, const TaskSet& s) {
  std::vector<std::vector<TaskIndex>> waves;
  std::set<TaskIndex> remaining(s.begin(), s.end());
  std::set<TaskIndex> done;
  while (!remaining.empty()) {
    std::vector<TaskIndex> wave;
    for (TaskIndex t : remaining) {
      bool ready = true;
      for (TaskIndex pr : g.preds(t))
        if (remaining.count(pr) && !done.count(pr)) {
          ready = false;
          break;
        }
      if (ready) wave.push_back(t);
    }
    if (wave.empty())
      throw Deadlock("phase set contains a dependency cycle among " +
                     std::to_string(remaining.size()) + " tasks");
    for (TaskIndex t : wave) {
      done.insert(t);
      remaining.erase(t);
    }
    waves.push_back(std::move(wave));
  }
  return waves;
}

// Run a phase set to completion in dependency waves (batch barrier after
// each wave), returning the elapsed time.
double batch_time(const TaskGraph& g, const TaskSet& s, int threads) {
  double elapsed = 0.0;
  for (const auto& wave : waves_of(g, s)) elapsed += wave_time(g, wave, threads);
  return elapsed;
}

// Kernel set flattened wave by wave — the order the phased execution itself
// starts the tasks in, which in-order issue needs to stay anomaly-free.
void append_in_wave_order(const TaskGraph& g, const TaskSet& s,
                          std::vector<TaskIndex>& out) {
  for (const auto& wave : waves_of(g, s))
    for (TaskIndex t : wave) out.push_back(t);
}

} // namespace

double phased_oracle_time(const TaskGraph& g, const MacroStepPlan& plan, const CostModel& m) {
  check_oracle_model(g, m);
  verify_plan(g, plan);
  double clock = 0.0;
  for (const AvoidSplit& step : plan.steps) {
    double step_end = clock;
    for (const ProcSplit& ps : step.procs) {
      const double k1_end = clock + batch_time(g, ps.l1, m.threads);
      const TaskSet got = ps.received();
      const double recv_end =
          k1_end + (got.empty() ? 0.0 : m.alpha + m.beta * static_cast<double>(got.size()));
      const double k2_end = k1_end + batch_time(g, ps.l2, m.threads);
      const double k3_end = std::max(k2_end, recv_end) + batch_time(g, ps.l3_compute(), m.threads);
      step_end = std::max(step_end, k3_end);
    }
    clock = step_end; // global barrier between macro-steps
  }
  return clock;
}

double eager_oracle_time(const TaskGraph& g, const MacroStepPlan& plan, const CostModel& m) {
  check_oracle_model(g, m);
  verify_plan(g, plan);

  std::vector<std::vector<TaskIndex>> schedule(g.nprocs());
  std::set<std::tuple<int, int, TaskIndex>> seen;
  std::vector<OracleMessage> comm;
  for (const AvoidSplit& step : plan.steps) {
    for (const ProcSplit& ps : step.procs) {
      append_in_wave_order(g, ps.l1, schedule[ps.proc]);
      append_in_wave_order(g, ps.l2, schedule[ps.proc]);
      append_in_wave_order(g, ps.l3_compute(), schedule[ps.proc]);
      for (const auto& [q, elems] : ps.recv)
        for (TaskIndex e : elems)
          if (seen.insert({q, ps.proc, e}).second) {
            OracleMessage msg;
            msg.elements = {e};
            msg.from = q;
            msg.to = ps.proc;
            comm.push_back(std::move(msg)); // departs as soon as q holds e
          }
    }
  }
  return event_sim_oracle(g, schedule, comm, m);
}

} // namespace cagraph
