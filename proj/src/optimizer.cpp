#include "escape_lab/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace escape_lab {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::tolerance: return "tolerance";
    case Termination::max_steps: return "max_steps";
    case Termination::diverged: return "diverged";
  }
  return "?";
}

void validate(const GDConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
    throw std::invalid_argument("config: learning_rate must be finite and > 0");
  if (cfg.max_steps < 0) throw std::invalid_argument("config: max_steps must be >= 0");
  if (!(cfg.grad_tolerance >= 0.0))
    throw std::invalid_argument("config: grad_tolerance must be >= 0");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
    throw std::invalid_argument("config: momentum must lie in [0, 1)");
  if (!(cfg.weight_decay >= 0.0))
    throw std::invalid_argument("config: weight_decay must be >= 0");
  long prev = 0;
  for (const auto& e : cfg.schedule) {
    if (e.step <= prev)
      throw std::invalid_argument("config: schedule steps must be strictly increasing and >= 1");
    if (!(e.factor > 0.0)) throw std::invalid_argument("config: schedule factors must be > 0");
    prev = e.step;
  }
}

namespace {

bool diverged(const Vector& x, double f) {
  if (!std::isfinite(f) || std::abs(f) > kDivergeCap) return true;
  if (!x.allFinite()) return true;
  return x.norm() > kDivergeCap;
}

}  // namespace

Vector random_init(const Region& w, std::uint64_t seed) {
  Rng rng(seed);
  return sample_uniform(w, rng);
}

Trajectory gd_run(const Landscape& l, const Vector& x0, const GDConfig& cfg) {
  validate(cfg);
  if (x0.size() != l.dimension())
    throw std::invalid_argument("gd_run: x0 dimension does not match landscape");

  Trajectory traj;
  traj.config = gd_config_to_json(cfg);

  Vector x = x0;
  Vector g = grad(l, x);
  double f = eval(l, x);
  traj.points.push_back(x);
  traj.losses.push_back(f);
  traj.grad_norms.push_back(g.norm());
  if (g.norm() <= cfg.grad_tolerance) {
    traj.termination = Termination::tolerance;
    return traj;
  }
  if (diverged(x, f)) {
    traj.termination = Termination::diverged;
    return traj;
  }

  Vector v = Vector::Zero(x.size());
  double gamma = cfg.learning_rate;
  std::size_t next_sched = 0;
  for (long t = 1; t <= cfg.max_steps; ++t) {
    if (next_sched < cfg.schedule.size() && cfg.schedule[next_sched].step == t) {
      gamma *= cfg.schedule[next_sched].factor;
      ++next_sched;
    }
    v = cfg.momentum * v + g + cfg.weight_decay * x;
    x = x - gamma * v;
    f = eval(l, x);
    g = grad(l, x);
    traj.points.push_back(x);
    traj.losses.push_back(f);
    traj.grad_norms.push_back(g.norm());
    if (g.norm() <= cfg.grad_tolerance) {
      traj.termination = Termination::tolerance;
      return traj;
    }
    if (diverged(x, f)) {
      traj.termination = Termination::diverged;
      return traj;
    }
  }
  traj.termination = Termination::max_steps;
  return traj;
}

Trajectory gd_random(const Landscape& l, const Region& w, const GDConfig& cfg,
                     std::uint64_t seed) {
  if (w.dimension() != l.dimension())
    throw std::invalid_argument("gd_random: region dimension does not match landscape");
  Trajectory traj = gd_run(l, random_init(w, seed), cfg);
  traj.seed = seed;
  return traj;
}

nlohmann::json gd_config_to_json(const GDConfig& cfg) {
  auto sched = nlohmann::json::array();
  for (const auto& e : cfg.schedule) sched.push_back({e.step, e.factor});
  return nlohmann::json{{"learning_rate", cfg.learning_rate},
                        {"max_steps", cfg.max_steps},
                        {"grad_tolerance", cfg.grad_tolerance},
                        {"schedule", sched},
                        {"momentum", cfg.momentum},
                        {"weight_decay", cfg.weight_decay}};
}

GDConfig gd_config_from_json(const nlohmann::json& j) {
  GDConfig cfg;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("max_steps")) cfg.max_steps = j.at("max_steps").get<long>();
  if (j.contains("grad_tolerance")) cfg.grad_tolerance = j.at("grad_tolerance").get<double>();
  if (j.contains("momentum")) cfg.momentum = j.at("momentum").get<double>();
  if (j.contains("weight_decay")) cfg.weight_decay = j.at("weight_decay").get<double>();
  if (j.contains("schedule")) {
    for (const auto& e : j.at("schedule"))
      cfg.schedule.push_back({e.at(0).get<long>(), e.at(1).get<double>()});
  }
  validate(cfg);
  return cfg;
}

}  // namespace escape_lab
