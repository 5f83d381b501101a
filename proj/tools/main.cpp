// cagraph — command-line front end.  Subcommands chain through files only:
// generate writes graphs (and optionally covers), transform turns a graph
// into a macro-step plan, validate/simulate/sweep consume what the earlier
// stages wrote.  Exit codes: 0 success, 1 domain error, 2 usage error.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cagraph/avoid.hpp"
#include "cagraph/cover.hpp"
#include "cagraph/generators.hpp"
#include "cagraph/io.hpp"
#include "cagraph/simulate.hpp"
#include "cagraph/sweep.hpp"

namespace {

using namespace cagraph;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int arg_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw CLI::ValidationError(what + ": '" + s + "' is not an integer");
  return v;
}

double arg_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw CLI::ValidationError(what + ": '" + s + "' is not a number");
  return v;
}

// generate --stencil1d N,P,T,r | --random n,p_edge,P [--seed S]
//          [--boundary dirichlet|periodic] -o graph.json [--cover cover.json]
struct GenerateCmd {
  std::string stencil_spec, random_spec;
  std::string boundary = "dirichlet";
  std::uint64_t seed = 0;
  std::string out, cover_out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "emit a task graph as JSON");
    cmd->add_option("--stencil1d", stencil_spec, "1-D stencil graph: points,procs,steps,radius")
        ->envname("CA_STENCIL1D");
    cmd->add_option("--random", random_spec, "seeded random DAG: n,p_edge,procs")
        ->envname("CA_RANDOM");
    cmd->add_option("--boundary", boundary, "stencil boundary handling")
        ->check(CLI::IsMember({"dirichlet", "periodic"}))
        ->envname("CA_BOUNDARY");
    cmd->add_option("--seed", seed, "seed for --random")->envname("CA_SEED");
    cmd->add_option("-o,--output", out, "graph file to write")->required()->envname("CA_OUTPUT");
    cmd->add_option("--cover", cover_out, "also write the per-level cover here")
        ->envname("CA_COVER");
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (stencil_spec.empty() == random_spec.empty())
      throw CLI::ValidationError("generate", "pass exactly one of --stencil1d or --random");
    TaskGraph g = [&] {
      if (!stencil_spec.empty()) {
        const auto f = split_commas(stencil_spec);
        if (f.size() != 4)
          throw CLI::ValidationError("--stencil1d", "want points,procs,steps,radius");
        return stencil_1d(arg_int(f[0], "points"), arg_int(f[1], "procs"), arg_int(f[2], "steps"),
                          arg_int(f[3], "radius"),
                          boundary == "periodic" ? Boundary::periodic : Boundary::dirichlet);
      }
      const auto f = split_commas(random_spec);
      if (f.size() != 3) throw CLI::ValidationError("--random", "want n,p_edge,procs");
      return random_dag(arg_int(f[0], "n"), arg_double(f[1], "p_edge"), arg_int(f[2], "procs"),
                        seed);
    }();
    save_graph(g, out);
    std::cout << "wrote " << out << ": " << g.size() << " tasks, " << g.num_edges()
              << " edges, " << g.nprocs() << " processors\n";
    if (!cover_out.empty()) {
      const LevelCover c = per_level_cover(g);
      save_cover(c, g, cover_out);
      std::cout << "wrote " << cover_out << ": " << c.blocks.size() << " blocks\n";
    }
  }
};

// transform -g graph.json -b B -o plan.json [--emit-dot plan.dot] [--force]
struct TransformCmd {
  std::string graph_path, out, dot_path;
  int block = 1;
  int dot_proc = 0, dot_step = 0;
  bool force = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("transform", "derive a communication-avoiding macro-step plan");
    cmd->add_option("-g,--graph", graph_path, "input graph file")->required()->envname("CA_GRAPH");
    cmd->add_option("-b,--block", block, "levels per macro-step")->required()->envname("CA_BLOCK");
    cmd->add_option("-o,--output", out, "plan file to write")->required()->envname("CA_OUTPUT");
    cmd->add_option("--emit-dot", dot_path, "also write a Graphviz view of one split")
        ->envname("CA_EMIT_DOT");
    cmd->add_option("--dot-proc", dot_proc, "processor shown in the dot view")
        ->envname("CA_DOT_PROC");
    cmd->add_option("--dot-step", dot_step, "macro-step shown in the dot view")
        ->envname("CA_DOT_STEP");
    cmd->add_flag("--force", force, "write the plan even if verification fails")
        ->envname("CA_FORCE");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const TaskGraph g = load_graph(graph_path);
    const MacroStepPlan plan = blocked_transform(g, per_level_cover(g), block);

    std::size_t bad = 0;
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
      const WellFormedness w = verify_well_formed(g, plan.steps[s]);
      for (const SplitViolation& v : w.violations) {
        ++bad;
        std::cerr << "macro-step " << s << ": rule (" << v.rule << ") processor " << v.proc
                  << ": " << v.detail << "\n";
      }
    }
    if (bad > 0) {
      if (!force)
        throw Error(std::to_string(bad) + " well-formedness violation(s); refusing to write " +
                    out + " (use --force to override)");
      std::cerr << "warning: plan has " << bad << " violation(s); writing anyway (--force)\n";
    }

    save_plan(plan, g, out);
    std::cout << "macro-steps: " << plan.steps.size() << " (block " << plan.block << ")\n";
    if (bad == 0) {
      std::size_t redundant = 0;
      for (const AvoidSplit& s : plan.steps) redundant += redundancy(g, s).redundant;
      const VolumeReport vol = communicated_volume(plan);
      std::cout << "redundant tasks: " << redundant << "\n";
      std::cout << "messages: " << vol.messages << ", elements: " << vol.elements << "\n";
    }
    std::cout << "wrote " << out << "\n";

    if (!dot_path.empty()) {
      if (plan.steps.empty()) {
        write_file(dot_path, to_dot(g));
      } else {
        if (dot_step < 0 || dot_step >= static_cast<int>(plan.steps.size()))
          throw CLI::ValidationError("--dot-step", "plan has " +
                                         std::to_string(plan.steps.size()) + " macro-step(s)");
        if (dot_proc < 0 || dot_proc >= g.nprocs())
          throw CLI::ValidationError("--dot-proc",
                                     "graph has " + std::to_string(g.nprocs()) + " processor(s)");
        write_file(dot_path, to_dot(g, plan.steps[dot_step], dot_proc));
      }
      std::cout << "wrote " << dot_path << "\n";
    }
  }
};

// validate -g graph.json -c cover.json [--overlap]
struct ValidateCmd {
  std::string graph_path, cover_path;
  bool overlap = false;
  int* exit_status = nullptr;

  void attach(CLI::App& app, int* status) {
    exit_status = status;
    auto* cmd = app.add_subcommand("validate", "check a cover against the graph");
    cmd->add_option("-g,--graph", graph_path, "input graph file")->required()->envname("CA_GRAPH");
    cmd->add_option("-c,--cover", cover_path, "cover file to check")->required()
        ->envname("CA_COVER");
    cmd->add_flag("--overlap", overlap, "also require the overlap condition")
        ->envname("CA_OVERLAP");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const TaskGraph g = load_graph(graph_path);
    const LevelCover c = load_cover(cover_path, g);
    const CoverReport rep = validate_cover(g, c);
    std::cout << report_to_json(rep, g);
    if (overlap && rep.valid && !rep.overlap_ok) {
      for (const OverlapWitness& w : check_overlap_condition(g, c).witnesses)
        std::cerr << "overlap: block (k=" << w.k << ", p=" << w.p << "): remote input '"
                  << g.task(w.witness).id << "' of '" << g.task(w.task).id
                  << "' is only one step back\n";
    }
    *exit_status = (rep.valid && (!overlap || rep.overlap_ok)) ? 0 : 1;
  }
};

// simulate -g graph.json -b B [--alpha A] [--beta B2] [--threads W] [--json]
struct SimulateCmd {
  std::string graph_path;
  int block = 1;
  double alpha = 0.0, beta = 0.0;
  int threads = 1;
  bool json = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "phase-model runtime of the blocked execution");
    cmd->add_option("-g,--graph", graph_path, "input graph file")->required()->envname("CA_GRAPH");
    cmd->add_option("-b,--block", block, "levels per macro-step")->required()->envname("CA_BLOCK");
    cmd->add_option("--alpha", alpha, "message latency")->envname("CA_ALPHA");
    cmd->add_option("--beta", beta, "per-element transfer cost")->envname("CA_BETA");
    cmd->add_option("--threads", threads, "worker threads per processor")->envname("CA_THREADS");
    cmd->add_flag("--json", json, "print the trace as JSON instead of the listing")
        ->envname("CA_JSON");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const TaskGraph g = load_graph(graph_path);
    const MacroStepPlan plan = blocked_transform(g, per_level_cover(g), block);
    CostModel m;
    m.alpha = alpha;
    m.beta = beta;
    m.threads = threads;
    m.nodes = g.nprocs();
    const PhaseTrace t = simulate_blocked(plan, g, m);
    std::cout << (json ? trace_to_json(t) : format_trace(t));
  }
};

// sweep --config sweep.json -o out.csv [--gnuplot dir/]
struct SweepCmd {
  std::string config_path, out, gnuplot_dir;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("sweep", "strong-scaling sweep to CSV");
    cmd->add_option("--config", config_path, "sweep scenario JSON")->required()
        ->envname("CA_CONFIG");
    cmd->add_option("-o,--output", out, "CSV file to write")->required()->envname("CA_OUTPUT");
    cmd->add_option("--gnuplot", gnuplot_dir, "also write per-alpha gnuplot columns here")
        ->envname("CA_GNUPLOT");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const SweepScenario sc = load_scenario(config_path);
    const SweepTable t = strong_scaling_sweep(sc);
    save_sweep_csv(t, out);
    std::cout << "wrote " << out << ": " << t.rows.size() << " rows\n";
    if (!gnuplot_dir.empty()) {
      std::filesystem::create_directories(gnuplot_dir);
      std::set<double> alphas;
      for (const SweepRow& r : t.rows) alphas.insert(r.alpha);
      for (double a : alphas) {
        const std::string path =
            (std::filesystem::path(gnuplot_dir) / ("alpha_" + format_number(a) + ".dat")).string();
        write_file(path, gnuplot_columns(t, a));
        std::cout << "wrote " << path << "\n";
      }
    }
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"task-graph analysis for communication-avoiding execution"};
  app.require_subcommand(1);

  int exit_status = 0;
  GenerateCmd generate;
  TransformCmd transform;
  ValidateCmd validate;
  SimulateCmd simulate;
  SweepCmd sweep;
  generate.attach(app);
  transform.attach(app);
  validate.attach(app, &exit_status);
  simulate.attach(app);
  sweep.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e); // prints help or the flag error
    return code == 0 ? 0 : 2;
  } catch (const cagraph::Error& e) {
    std::cerr << "cagraph: " << e.what() << "\n";
    return 1;
  }
  return exit_status;
}
