#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "escape_lab/landscape.hpp"
#include "escape_lab/regions.hpp"

namespace escape_lab {

struct ScheduleEntry {
  long step = 0;     // 1-based update index (epoch index for SGD runs)
  double factor = 1.0;
};

struct GDConfig {
  double learning_rate = 0.0;
  long max_steps = 1000;
  double grad_tolerance = 1e-10;
  std::vector<ScheduleEntry> schedule;  // strictly increasing step indices
  double momentum = 0.0;                // velocity form; 0 gives plain GD
  double weight_decay = 0.0;
};

void validate(const GDConfig& cfg);

enum class Termination { tolerance, max_steps, diverged };
const char* to_string(Termination t);

// Iterates and a boundedness cap: |f| or ||x|| beyond this is divergence.
inline constexpr double kDivergeCap = 1e100;

struct Trajectory {
  std::vector<Vector> points;      // x_0 .. x_T
  std::vector<double> losses;      // f at each point
  std::vector<double> grad_norms;  // ||grad f|| at each point
  std::optional<std::uint64_t> seed;
  nlohmann::json config;           // snapshot of the run configuration
  Termination termination = Termination::max_steps;
};

// Uniform draw from w; the seed alone determines the point.
Vector random_init(const Region& w, std::uint64_t seed);

// x_t = x_{t-1} - gamma_t * v_t with v_t = momentum*v_{t-1} + grad + wd*x_{t-1}.
// Schedule factors multiply gamma at the start of the listed update.
// Stops on grad tolerance, divergence, or after max_steps updates.
Trajectory gd_run(const Landscape& l, const Vector& x0, const GDConfig& cfg);

// random_init + gd_run; the trajectory records the seed.
Trajectory gd_random(const Landscape& l, const Region& w, const GDConfig& cfg,
                     std::uint64_t seed);

nlohmann::json gd_config_to_json(const GDConfig& cfg);
GDConfig gd_config_from_json(const nlohmann::json& j);

}  // namespace escape_lab
