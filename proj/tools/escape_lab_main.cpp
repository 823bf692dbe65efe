#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "escape_lab/experiments.hpp"
#include "escape_lab/io.hpp"
#include "escape_lab/landscape.hpp"
#include "escape_lab/optimizer.hpp"
#include "escape_lab/regions.hpp"
#include "escape_lab/stochastic.hpp"
#include "escape_lab/theory.hpp"
#include "escape_lab/version.hpp"

namespace {

using namespace escape_lab;

std::vector<std::string> echo_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 1; i < argc; ++i) out.emplace_back(argv[i]);
  return out;
}

nlohmann::json parse_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad json: ") + e.what());
  }
}

StochasticObjective parse_objective(const std::string& text) {
  if (!text.empty() && text.front() == '{') return objective_from_json(parse_json_text(text));
  return objective_from_json(parse_json_text(read_text_file(text)));
}

const Minimum* find_minimum(const Landscape& l, MinimumKind kind) {
  for (const Minimum& m : l.minima())
    if (m.label == kind) return &m;
  return nullptr;
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string joined(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt_double(values[i]);
  }
  return out;
}

// Bound and precondition sections for whichever inputs are supplied; the
// escape report is always present since its checks cannot throw.
nlohmann::json verify_report(const TheoremInputs& in) {
  nlohmann::json out;
  out["inputs"] = theorem_inputs_to_json(in);
  out["escape"] = theorem_report_to_json(escape_preconditions(in));

  if (in.measure_W > 0.0 && in.d >= 1 && in.T >= 0 && in.measure_X >= 0.0) {
    const BoundResult b = avoid_bound(in.T, in.d, in.measure_X, in.measure_W);
    nlohmann::json section = {{"raw", b.raw}, {"probability", b.probability}};
    // the bound's own hypothesis on the step size
    section["applicable"] = in.gamma > 0.0 && in.L > 0.0
                                ? nlohmann::json(in.gamma <= 0.5 / in.L)
                                : nlohmann::json();
    out["avoid_bound"] = std::move(section);
  }
  if (in.measure_W > 0.0 && in.d >= 1 && in.r_W > 0.0 && in.c_X > 0.0 &&
      in.gamma * in.mu_star > 0.0 && in.gamma * in.mu_star < 1.0) {
    const OspcBound b =
        ospc_avoid_bound(in.d, in.r_W, in.c_X, in.gamma, in.mu_star, in.measure_X, in.measure_W);
    nlohmann::json section = {{"raw", b.raw},
                              {"probability", b.probability},
                              {"t0", b.t0},
                              {"zero_branch", b.zero_branch}};
    section["applicable"] =
        in.L > 0.0 ? nlohmann::json(in.gamma <= in.mu_star / (in.L * in.L)) : nlohmann::json();
    out["ospc_avoid_bound"] = std::move(section);
  }
  if (in.gamma > 0.0 && in.mu_star > 0.0 && in.L > 0.0) {
    const bool applicable = in.gamma <= in.mu_star / (in.L * in.L);
    nlohmann::json section = {{"applicable", applicable}};
    section["factor"] = applicable
                            ? nlohmann::json(contraction_step_bound(in.gamma, in.mu_star, in.L))
                            : nlohmann::json();
    out["contraction"] = std::move(section);
  }
  nlohmann::json growth;
  if (in.gamma > 0.0 && in.mu_star > 0.0) {
    const GrowthBound g = escape_growth_bound(in.gamma, in.mu_star);
    growth["using_mu_star"] = {{"value", g.value}, {"valid", g.valid}};
  }
  if (in.gamma > 0.0 && in.mu_dagger > 0.0) {
    const GrowthBound g = escape_growth_bound(in.gamma, in.mu_dagger);
    growth["using_mu_dagger"] = {{"value", g.value}, {"valid", g.valid}};
  }
  if (!growth.empty()) out["growth"] = std::move(growth);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-descent laboratory: landscapes, sweeps and bound calculators"};
  app.require_subcommand(1);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a landscape and its gradient at a point");
  std::string eval_landscape, eval_x;
  eval_cmd->add_option("--landscape", eval_landscape, "landscape spec (id, id:params or json)")
      ->required();
  eval_cmd->add_option("--x", eval_x, "point, comma-separated")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "one gradient-descent run, trajectory to csv");
  std::string run_landscape, run_init, run_init_region, run_schedule, run_out;
  std::uint64_t run_seed = 0;
  double run_gamma = 0.0, run_tol = 1e-10, run_momentum = 0.0, run_wd = 0.0;
  long run_steps = 1000;
  run_cmd->add_option("--landscape", run_landscape, "landscape spec")->required();
  auto* run_init_opt = run_cmd->add_option("--init", run_init, "initial point, comma-separated");
  auto* run_region_opt =
      run_cmd->add_option("--init-region", run_init_region, "region to draw the start from");
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "seed for --init-region");
  run_init_opt->excludes(run_region_opt);
  run_region_opt->needs(run_seed_opt);
  run_cmd->add_option("--gamma", run_gamma, "learning rate")->required();
  run_cmd->add_option("--steps", run_steps, "max update steps");
  run_cmd->add_option("--tol", run_tol, "gradient-norm stopping tolerance");
  run_cmd->add_option("--schedule", run_schedule, "learning-rate factors, step:factor,...");
  run_cmd->add_option("--momentum", run_momentum, "momentum coefficient");
  run_cmd->add_option("--wd", run_wd, "weight decay");
  run_cmd->add_option("--out", run_out, "trajectory csv path")->required();

  // mc-sweep
  auto* sweep_cmd = app.add_subcommand("mc-sweep", "basin-of-attraction counts over a gamma grid");
  std::string sweep_landscape = "toy1d_continuous";
  std::string sweep_region = "7,10";
  std::string sweep_gammas = joined(default_sweep_gammas());
  std::string sweep_out;
  int sweep_n = 100;
  long sweep_steps = default_sweep_steps();
  std::uint64_t sweep_seed = 0;
  double sweep_tol = 1e-10;
  sweep_cmd->add_option("--landscape", sweep_landscape, "landscape spec");
  sweep_cmd->add_option("--region", sweep_region, "initialization region W");
  sweep_cmd->add_option("--gammas", sweep_gammas, "learning-rate grid, comma-separated");
  sweep_cmd->add_option("--n", sweep_n, "replicates per gamma");
  sweep_cmd->add_option("--steps", sweep_steps, "max update steps per run");
  sweep_cmd->add_option("--tol", sweep_tol, "gradient-norm stopping tolerance");
  sweep_cmd->add_option("--seed", sweep_seed, "master seed")->required();
  sweep_cmd->add_option("--out", sweep_out, "sweep csv path")->required();

  // escape-demo
  auto* demo_cmd = app.add_subcommand("escape-demo", "small vs large learning rate from one start");
  std::string demo_landscape, demo_m, demo_x0, demo_out;
  double demo_gamma_small = 0.0, demo_gamma_large = 0.0;
  long demo_steps = 1000;
  demo_cmd->add_option("--landscape", demo_landscape, "landscape spec")->required();
  demo_cmd->add_option("--m-region", demo_m, "region M around the sharp minimum")->required();
  demo_cmd->add_option("--gamma-small", demo_gamma_small, "small learning rate")->required();
  demo_cmd->add_option("--gamma-large", demo_gamma_large, "large learning rate")->required();
  demo_cmd->add_option("--x0", demo_x0, "start point inside M")->required();
  demo_cmd->add_option("--steps", demo_steps, "max update steps");
  demo_cmd->add_option("--out", demo_out, "report json path")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "evaluate the bounds and preconditions");
  std::string verify_inputs, verify_out;
  verify_cmd->add_option("--inputs", verify_inputs, "json file with the constants")->required();
  verify_cmd->add_option("--out", verify_out, "also write the report here");

  // repeats
  auto* repeats_cmd = app.add_subcommand("repeats", "three-arm SGD benchmark");
  std::string repeats_objective, repeats_out;
  double repeats_gl = 0.0, repeats_gs = 0.0, repeats_momentum = 0.0, repeats_wd = 0.0;
  int repeats_k = 10, repeats_epochs = 0, repeats_seeds = 10, repeats_batch = 8;
  std::uint64_t repeats_seed = 0;
  repeats_cmd->add_option("--objective", repeats_objective, "objective spec json or a path to one")
      ->required();
  repeats_cmd->add_option("--gamma-large", repeats_gl, "large learning rate")->required();
  repeats_cmd->add_option("--gamma-small", repeats_gs, "small learning rate")->required();
  repeats_cmd->add_option("--k", repeats_k, "steps per drawn batch in the repeats arm");
  repeats_cmd->add_option("--epochs", repeats_epochs, "epoch budget of the large arm")->required();
  repeats_cmd->add_option("--seeds", repeats_seeds, "number of paired seeds");
  repeats_cmd->add_option("--batch-size", repeats_batch, "mini-batch size");
  repeats_cmd->add_option("--seed", repeats_seed, "master seed");
  repeats_cmd->add_option("--momentum", repeats_momentum, "momentum coefficient");
  repeats_cmd->add_option("--wd", repeats_wd, "weight decay");
  repeats_cmd->add_option("--out", repeats_out, "benchmark json path")->required();

  // pca
  auto* pca_cmd = app.add_subcommand("pca", "project trajectories onto their top-2 directions");
  std::string pca_trajs, pca_out;
  pca_cmd->add_option("--trajs", pca_trajs, "trajectory csv paths, comma-separated")->required();
  pca_cmd->add_option("--out", pca_out, "projection csv path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    RunManifest manifest;
    manifest.argv = echo_args(argc, argv);
    manifest.version = kVersion;

    if (app.got_subcommand(eval_cmd)) {
      const Landscape l = make_landscape(parse_landscape_spec(eval_landscape));
      const Vector x = parse_vector(eval_x);
      const nlohmann::json out = {{"f", eval(l, x)}, {"grad", vector_json(grad(l, x))}};
      std::cout << out.dump() << "\n";
      return 0;
    }

    if (app.got_subcommand(run_cmd)) {
      const Landscape l = make_landscape(parse_landscape_spec(run_landscape));
      GDConfig cfg;
      cfg.learning_rate = run_gamma;
      cfg.max_steps = run_steps;
      cfg.grad_tolerance = run_tol;
      cfg.schedule = parse_schedule(run_schedule);
      cfg.momentum = run_momentum;
      cfg.weight_decay = run_wd;
      Trajectory traj;
      nlohmann::json init_echo;
      if (run_init_opt->count()) {
        const Vector x0 = parse_vector(run_init);
        traj = gd_run(l, x0, cfg);
        init_echo = {{"point", vector_json(x0)}};
      } else if (run_region_opt->count()) {
        const Region w = parse_region(run_init_region);
        traj = gd_random(l, w, cfg, run_seed);
        init_echo = {{"region", region_to_json(w)}, {"seed", run_seed}};
      } else {
        throw std::invalid_argument("run: need --init or --init-region");
      }
      write_text_file(run_out, trajectory_csv(traj));
      manifest.command = "run";
      manifest.config = {{"landscape", landscape_spec_to_json(l.spec())},
                         {"gd", gd_config_to_json(cfg)},
                         {"init", init_echo}};
      manifest.master_seed = run_region_opt->count() ? run_seed : 0;
      manifest.artifacts = {run_out};
      write_manifest(manifest, run_out);
      return 0;
    }

    if (app.got_subcommand(sweep_cmd)) {
      const Landscape l = make_landscape(parse_landscape_spec(sweep_landscape));
      const Region w = parse_region(sweep_region);
      const std::vector<double> gammas = parse_doubles(sweep_gammas);
      GDConfig base;
      base.max_steps = sweep_steps;
      base.grad_tolerance = sweep_tol;
      const SweepResult result = mc_sweep(l, w, gammas, sweep_n, base, sweep_seed);
      write_text_file(sweep_out, sweep_csv(result));
      manifest.command = "mc-sweep";
      manifest.config = {{"landscape", result.landscape},
                         {"w", result.w},
                         {"gammas", gammas},
                         {"n", sweep_n},
                         {"base", result.base_config}};
      manifest.master_seed = sweep_seed;
      manifest.artifacts = {sweep_out};
      write_manifest(manifest, sweep_out);
      return 0;
    }

    if (app.got_subcommand(demo_cmd)) {
      const Landscape l = make_landscape(parse_landscape_spec(demo_landscape));
      const Region m = parse_region(demo_m);
      const Vector x0 = parse_vector(demo_x0);
      const Minimum* sharp = find_minimum(l, MinimumKind::sharp_local);
      const Minimum* global = find_minimum(l, MinimumKind::global);
      if (!sharp || !global)
        throw std::invalid_argument(
            "escape-demo: landscape must have labeled sharp_local and global minima");
      GDConfig base;
      base.max_steps = demo_steps;
      const EscapeDemoReport rep = escape_demo(l, m, sharp->location, global->location,
                                               demo_gamma_small, demo_gamma_large, x0, base);
      write_text_file(demo_out, escape_report_to_json(rep).dump(2) + "\n");
      manifest.command = "escape-demo";
      manifest.config = {{"landscape", landscape_spec_to_json(l.spec())},
                         {"m", region_to_json(m)},
                         {"x0", vector_json(x0)},
                         {"gamma_small", demo_gamma_small},
                         {"gamma_large", demo_gamma_large},
                         {"steps", demo_steps},
                         {"x_dagger", vector_json(sharp->location)},
                         {"x_star", vector_json(global->location)}};
      manifest.artifacts = {demo_out};
      write_manifest(manifest, demo_out);
      return 0;
    }

    if (app.got_subcommand(verify_cmd)) {
      const TheoremInputs in = theorem_inputs_from_json(parse_json_text(read_text_file(verify_inputs)));
      const std::string text = verify_report(in).dump(2) + "\n";
      std::cout << text;
      if (!verify_out.empty()) {
        write_text_file(verify_out, text);
        manifest.command = "verify";
        manifest.config = theorem_inputs_to_json(in);
        manifest.artifacts = {verify_out};
        write_manifest(manifest, verify_out);
      }
      return 0;
    }

    if (app.got_subcommand(repeats_cmd)) {
      const StochasticObjective obj = parse_objective(repeats_objective);
      const BenchmarkResult result =
          repeats_benchmark(obj, repeats_gl, repeats_gs, repeats_k, repeats_epochs, repeats_batch,
                            repeats_seeds, repeats_seed, repeats_momentum, repeats_wd);
      write_text_file(repeats_out, benchmark_to_json(result).dump(2) + "\n");
      manifest.command = "repeats";
      manifest.config = {{"objective", objective_spec_json(obj)},
                         {"gamma_large", repeats_gl},
                         {"gamma_small", repeats_gs},
                         {"k", repeats_k},
                         {"epochs", repeats_epochs},
                         {"batch_size", repeats_batch},
                         {"n_seeds", repeats_seeds},
                         {"momentum", repeats_momentum},
                         {"weight_decay", repeats_wd}};
      manifest.master_seed = repeats_seed;
      manifest.artifacts = {repeats_out};
      write_manifest(manifest, repeats_out);
      return 0;
    }

    if (app.got_subcommand(pca_cmd)) {
      std::vector<Trajectory> trajs;
      std::vector<std::string> paths;
      std::size_t start = 0;
      while (start <= pca_trajs.size()) {
        const auto pos = pca_trajs.find(',', start);
        const std::string path = pca_trajs.substr(
            start, pos == std::string::npos ? std::string::npos : pos - start);
        if (path.empty()) throw std::invalid_argument("pca: empty trajectory path");
        paths.push_back(path);
        trajs.push_back(trajectory_from_csv(read_text_file(path)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      const PcaProjection proj = pca_project(trajs);
      write_text_file(pca_out, pca_csv(proj));
      manifest.command = "pca";
      manifest.config = {{"trajs", paths},
                         {"explained", {proj.explained1, proj.explained2}},
                         {"eigenvalues", {proj.eigenvalue1, proj.eigenvalue2}}};
      manifest.artifacts = {pca_out};
      write_manifest(manifest, pca_out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
