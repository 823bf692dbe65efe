#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace escape_lab {

// Everything the bound calculators consume. Only the fields a given
// calculator needs have to be meaningful.
struct TheoremInputs {
  double gamma = 0.0;
  int d = 1;                       // ambient dimension
  double L = 0.0;                  // local smoothness constant
  double L_global = 0.0;           // global smoothness constant
  double mu_star = 0.0;            // pull toward the good minimum
  double mu_dagger = 0.0;          // pull toward the bad minimum, inside M
  double r = 0.0;                  // diameter of the avoided set M
  double dist_star_dagger = 0.0;   // distance between the two minima
  double measure_X = 0.0;
  double measure_W = 0.0;
  double c_X = 0.0;                // inf distance from X to the good minimum
  double r_W = 0.0;                // sup distance from W to the good minimum
  long T = 0;                      // step budget
};

struct BoundResult {
  double raw = 0.0;          // unclamped value
  double probability = 0.0;  // min(1, raw)
};

// 2^((T+1) d) * measure_X / measure_W, clamped to [0,1] as a probability.
// measure_X == 0 gives exactly 0.
BoundResult avoid_bound(long T, int d, double measure_X, double measure_W);

struct OspcBound {
  double raw = 0.0;
  double probability = 0.0;
  double t0 = 0.0;          // crossing time log2(c_X/r_W) / log2(1 - gamma mu_star)
  bool zero_branch = false; // c_X > r_W: the set is out of reach, bound is 0
};

// 2^d * (r_W/c_X)^(-d / log2(1 - gamma mu_star)) * measure_X / measure_W
// when c_X <= r_W, zero otherwise. Requires 0 < gamma*mu_star < 1.
OspcBound ospc_avoid_bound(int d, double r_W, double c_X, double gamma, double mu_star,
                           double measure_X, double measure_W);

// Per-step factor 1 - gamma*mu_star on squared distances; only valid in the
// small-step regime gamma <= mu_star / L^2 (throws outside it).
double contraction_step_bound(double gamma, double mu_star, double L);

struct GrowthBound {
  double value = 0.0;  // 2*gamma*mu_local - 3, per-step squared-distance growth
  bool valid = false;  // growth is only guaranteed when the value is positive
};

// mu_local is the pull constant that holds around the minimum being left;
// callers choose which constant they trust there.
GrowthBound escape_growth_bound(double gamma, double mu_local);

struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin = 0.0;  // slack; positive means comfortably satisfied
};

struct TheoremReport {
  std::vector<Condition> conditions;
  bool pass = false;
};

// r * (1 + sqrt((gamma^2 Lg^2 - 3)(1 - gamma mu_star))) / (1 - sqrt(1 - gamma mu_star)),
// with the radicands clamped at zero; +inf when the denominator degenerates.
double separation_threshold(double gamma, double mu_star, double l_global, double r);

// Checks every hypothesis of the large-step escape guarantee with numeric
// margins. Failures are reported, never thrown.
TheoremReport escape_preconditions(const TheoremInputs& in);

nlohmann::json theorem_report_to_json(const TheoremReport& rep);
nlohmann::json theorem_inputs_to_json(const TheoremInputs& in);
TheoremInputs theorem_inputs_from_json(const nlohmann::json& j);

}  // namespace escape_lab
