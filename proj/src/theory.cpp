#include "escape_lab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace escape_lab {

namespace {

double clamp_probability(double raw) { return std::min(1.0, std::max(0.0, raw)); }

}  // namespace

BoundResult avoid_bound(long T, int d, double measure_X, double measure_W) {
  if (d < 1) throw std::invalid_argument("avoid_bound: dimension must be positive");
  if (T < 0) throw std::invalid_argument("avoid_bound: step budget must be nonnegative");
  if (!(measure_W > 0.0)) throw std::invalid_argument("avoid_bound: measure_W must be positive");
  if (measure_X < 0.0) throw std::invalid_argument("avoid_bound: measure_X must be nonnegative");
  BoundResult out;
  if (measure_X == 0.0) {
    // exp2 can overflow to inf for large T*d; 0 * inf would poison the result.
    out.raw = 0.0;
    out.probability = 0.0;
    return out;
  }
  out.raw = std::exp2(static_cast<double>(T + 1) * d) * measure_X / measure_W;
  out.probability = clamp_probability(out.raw);
  return out;
}

OspcBound ospc_avoid_bound(int d, double r_W, double c_X, double gamma, double mu_star,
                           double measure_X, double measure_W) {
  if (d < 1) throw std::invalid_argument("ospc_avoid_bound: dimension must be positive");
  if (!(measure_W > 0.0))
    throw std::invalid_argument("ospc_avoid_bound: measure_W must be positive");
  if (measure_X < 0.0)
    throw std::invalid_argument("ospc_avoid_bound: measure_X must be nonnegative");
  if (!(r_W > 0.0)) throw std::invalid_argument("ospc_avoid_bound: r_W must be positive");
  if (!(c_X > 0.0)) throw std::invalid_argument("ospc_avoid_bound: c_X must be positive");
  const double product = gamma * mu_star;
  if (!(product > 0.0) || product >= 1.0)
    throw std::domain_error("ospc_avoid_bound: needs 0 < gamma*mu_star < 1");

  OspcBound out;
  // Squared distance to the minimum contracts by (1 - gamma mu_star) each step,
  // so reaching distance c_X from at most r_W takes at least t0 steps.
  out.t0 = std::log2(c_X / r_W) / std::log2(1.0 - product);
  if (c_X > r_W) {
    out.zero_branch = true;
    out.raw = 0.0;
    out.probability = 0.0;
    return out;
  }
  const double exponent = -static_cast<double>(d) / std::log2(1.0 - product);
  out.raw = std::exp2(static_cast<double>(d)) * std::pow(r_W / c_X, exponent) * measure_X /
            measure_W;
  out.probability = clamp_probability(out.raw);
  return out;
}

double contraction_step_bound(double gamma, double mu_star, double L) {
  if (!(gamma > 0.0)) throw std::invalid_argument("contraction_step_bound: gamma must be positive");
  if (!(mu_star > 0.0))
    throw std::invalid_argument("contraction_step_bound: mu_star must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("contraction_step_bound: L must be positive");
  if (gamma > mu_star / (L * L))
    throw std::domain_error("contraction_step_bound: gamma exceeds mu_star / L^2");
  return 1.0 - gamma * mu_star;
}

GrowthBound escape_growth_bound(double gamma, double mu_local) {
  if (!(gamma > 0.0)) throw std::invalid_argument("escape_growth_bound: gamma must be positive");
  if (!(mu_local > 0.0))
    throw std::invalid_argument("escape_growth_bound: mu_local must be positive");
  GrowthBound out;
  out.value = 2.0 * gamma * mu_local - 3.0;
  out.valid = out.value > 0.0;
  return out;
}

double separation_threshold(double gamma, double mu_star, double l_global, double r) {
  const double contraction = std::max(0.0, 1.0 - gamma * mu_star);
  const double ring = std::max(0.0, gamma * gamma * l_global * l_global - 3.0);
  const double denom = 1.0 - std::sqrt(contraction);
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return r * (1.0 + std::sqrt(ring * contraction)) / denom;
}

TheoremReport escape_preconditions(const TheoremInputs& in) {
  TheoremReport rep;
  auto add = [&rep](std::string name, double lhs, double rhs, bool pass) {
    Condition c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.pass = pass;
    c.margin = pass ? std::abs(rhs - lhs) : -std::abs(rhs - lhs);
    rep.conditions.push_back(std::move(c));
  };

  // gamma > 2 / mu_dagger: the step is large enough to be repelled near the
  // sharp minimum.
  const double floor = 2.0 / in.mu_dagger;
  add("gamma_above_escape_floor", in.gamma, floor, in.gamma > floor);

  // gamma <= mu_star / L^2: still small enough to contract toward the good one.
  const double cap = in.mu_star / (in.L * in.L);
  add("gamma_within_contraction_cap", in.gamma, cap, in.gamma <= cap);

  // The two regimes only coexist when the sharp minimum is much sharper.
  const double gap = 2.0 * in.L * in.L / in.mu_star;
  add("sharpness_gap", in.mu_dagger, gap, in.mu_dagger > gap);

  // The expelled iterates live on a ring of real radius.
  const double ring_arg = in.gamma * in.gamma * in.L_global * in.L_global;
  add("ring_radius_real", ring_arg, 3.0, ring_arg > 3.0);

  // Once outside the ring, the contraction toward the good minimum must not
  // drag iterates back across it.
  const double sep = separation_threshold(in.gamma, in.mu_star, in.L_global, in.r);
  add("separation", sep, in.dist_star_dagger, sep < in.dist_star_dagger);

  add("local_smoothness_below_global", in.L, in.L_global, in.L <= in.L_global);

  rep.pass = std::all_of(rep.conditions.begin(), rep.conditions.end(),
                         [](const Condition& c) { return c.pass; });
  return rep;
}

nlohmann::json theorem_report_to_json(const TheoremReport& rep) {
  nlohmann::json conditions = nlohmann::json::array();
  for (const Condition& c : rep.conditions) {
    conditions.push_back({{"name", c.name},
                          {"lhs", c.lhs},
                          {"rhs", c.rhs},
                          {"pass", c.pass},
                          {"margin", c.margin}});
  }
  return {{"conditions", std::move(conditions)}, {"pass", rep.pass}};
}

nlohmann::json theorem_inputs_to_json(const TheoremInputs& in) {
  return {{"gamma", in.gamma},
          {"d", in.d},
          {"L", in.L},
          {"L_global", in.L_global},
          {"mu_star", in.mu_star},
          {"mu_dagger", in.mu_dagger},
          {"r", in.r},
          {"dist_star_dagger", in.dist_star_dagger},
          {"measure_X", in.measure_X},
          {"measure_W", in.measure_W},
          {"c_X", in.c_X},
          {"r_W", in.r_W},
          {"T", in.T}};
}

TheoremInputs theorem_inputs_from_json(const nlohmann::json& j) {
  TheoremInputs in;
  in.gamma = j.value("gamma", 0.0);
  in.d = j.value("d", 1);
  in.L = j.value("L", 0.0);
  in.L_global = j.value("L_global", 0.0);
  in.mu_star = j.value("mu_star", 0.0);
  in.mu_dagger = j.value("mu_dagger", 0.0);
  in.r = j.value("r", 0.0);
  in.dist_star_dagger = j.value("dist_star_dagger", 0.0);
  in.measure_X = j.value("measure_X", 0.0);
  in.measure_W = j.value("measure_W", 0.0);
  in.c_X = j.value("c_X", 0.0);
  in.r_W = j.value("r_W", 0.0);
  in.T = j.value("T", 0L);
  return in;
}

}  // namespace escape_lab
