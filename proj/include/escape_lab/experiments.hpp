#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "escape_lab/landscape.hpp"
#include "escape_lab/optimizer.hpp"
#include "escape_lab/regions.hpp"

namespace escape_lab {

enum class BasinKind { global, sharp_local, flat_local, none };
const char* to_string(BasinKind k);

// Minima sit >= 2.5 units apart in the shipped landscapes, so a coordinate
// tolerance of 1e-3 leaves three orders of magnitude of slack.
inline constexpr double kClassifyTolerance = 1e-3;

struct BasinLabel {
  BasinKind kind = BasinKind::none;
  Vector final_point;
  double final_loss = 0.0;
};

// global / sharp_local: final point within kClassifyTolerance of that
// minimum's location. flat_local: final point inside the plateau (falls back
// to the same tolerance when no plateau is recorded). Diverged runs are none.
BasinLabel classify(const Trajectory& traj, const Landscape& l);

struct SweepColumn {
  double gamma = 0.0;
  long global = 0;
  long sharp_local = 0;
  long flat_local = 0;
  long none = 0;
  long diverged = 0;  // subset of none
};

struct SweepResult {
  std::vector<SweepColumn> columns;
  int n = 0;
  nlohmann::json landscape;
  nlohmann::json w;
  nlohmann::json base_config;
  std::uint64_t master_seed = 0;
};

// n runs per gamma. Replicate j's initial point is drawn from
// derive_seed(master_seed, j) alone, so the identical inits recur in every
// column and the grid isolates the learning-rate effect. Runs execute in
// parallel; counts never depend on the worker count.
SweepResult mc_sweep(const Landscape& l, const Region& w, const std::vector<double>& gammas,
                     int n, const GDConfig& base, std::uint64_t master_seed);

// gamma,global,sharp_local,flat_local,none
std::string sweep_csv(const SweepResult& result);

// Shipped sweep defaults for toy1d_continuous, fixed by a coarse reference
// sweep so that all three convergence regimes show up across the grid. The
// CLI uses them when --gammas / --region / --steps are omitted.
std::vector<double> default_sweep_gammas();
Region default_sweep_w();
long default_sweep_steps();

struct EscapeArm {
  double gamma = 0.0;
  bool exited_m = false;
  long exit_step = -1;  // first recorded index outside m
  double min_distance_to_star = 0.0;
  bool distance_target_met = false;  // min distance < |x_dagger - x_star| - diam(m)
  Termination termination = Termination::max_steps;
  double final_loss = 0.0;
  Vector final_point;
};

struct EscapeDemoReport {
  double target_distance = 0.0;
  EscapeArm small_arm;
  EscapeArm large_arm;
};

// Runs gd from x0 (must lie in m) at both learning rates and reports whether
// each trajectory leaves m and how close it gets to x_star. base supplies
// step budget and tolerance; its learning rate is overwritten per arm.
EscapeDemoReport escape_demo(const Landscape& l, const Region& m, const Vector& x_dagger,
                             const Vector& x_star, double gamma_small, double gamma_large,
                             const Vector& x0, const GDConfig& base = GDConfig{});

nlohmann::json escape_report_to_json(const EscapeDemoReport& rep);

// Diagonalizes symmetric a in place, accumulating eigenvectors into v's
// columns. Row-major sweep order and a fixed rotation formula keep the result
// reproducible; stops when the off-diagonal Frobenius norm drops below
// tol * ||a||_F or after 100 sweeps.
void cyclic_jacobi(Eigen::MatrixXd& a, Eigen::MatrixXd& v, double tol = 1e-12);

struct PcaProjection {
  Vector component1;  // unit vectors in parameter space, mutually orthogonal
  Vector component2;
  double eigenvalue1 = 0.0;
  double eigenvalue2 = 0.0;
  double explained1 = 0.0;  // eigenvalue / total displacement energy
  double explained2 = 0.0;
  // One matrix per input trajectory: row t = (pc1, pc2) of point t's
  // displacement from that trajectory's start; row 0 is always the origin.
  std::vector<Eigen::MatrixXd> paths;
};

// Top-2 directions of the pooled displacements x_t - x_0 (t >= 1), from the
// eigendecomposition of their inner-product matrix. Component signs are fixed
// so each one's largest-magnitude coordinate is positive. When the second
// eigenvalue vanishes the second direction is a deterministic orthonormal
// completion and its eigenvalue is reported as 0. Needs at least 2 pooled
// displacements and ambient dimension >= 2.
PcaProjection pca_project(const std::vector<Trajectory>& trajs);

// traj_id,step,pc1,pc2
std::string pca_csv(const PcaProjection& proj);

// Indices i with losses[i] > factor * min(losses[0..i]); factor must exceed 1.
std::vector<long> spike_detect(const std::vector<double>& losses, double factor);

}  // namespace escape_lab
