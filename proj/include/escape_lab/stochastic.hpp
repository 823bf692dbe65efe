#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "escape_lab/optimizer.hpp"

namespace escape_lab {

enum class DatasetKind { linear, teacher_mlp2 };

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& s);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::linear;
  int n = 0;
  int input_dim = 0;
  int teacher_width = 0;  // teacher_mlp2 only
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

// Regenerating from the same spec is bit-identical.
struct Dataset {
  DatasetSpec spec;
  Eigen::MatrixXd inputs;  // one example per row
  Eigen::VectorXd targets;
  int size() const { return static_cast<int>(targets.size()); }
};

Dataset make_dataset(const DatasetSpec& spec);

// Same generator, fresh draws: only the seed is re-derived.
DatasetSpec holdout_spec(DatasetSpec spec);

nlohmann::json dataset_spec_to_json(const DatasetSpec& spec);
DatasetSpec dataset_spec_from_json(const nlohmann::json& j);

enum class ObjectiveKind { least_squares, mlp2 };

std::string to_string(ObjectiveKind kind);

// Mean squared-error objective over a dataset. mlp2 is a two-layer scalar
// network, first layer ReLU (subgradient 0 at the kink), parameters laid out
// as [W1 row-major (width x input_dim), b1, w2, b2]; least_squares predicts
// params . x. Per-example loss is (prediction - target)^2 / 2; batch loss and
// gradient are means over the batch.
struct StochasticObjective {
  ObjectiveKind kind = ObjectiveKind::least_squares;
  int input_dim = 0;
  int width = 0;  // hidden units, mlp2 only
  std::uint64_t init_seed = 0;
  Dataset data;

  int param_dim() const;
  // Uniform in +-1/sqrt(fan_in) per layer, filled in layout order.
  Vector init_params() const;
  Vector init_params(std::uint64_t seed) const;
  double predict(const Vector& params, const Vector& x) const;
  double loss(const Vector& params, const std::vector<int>& batch) const;
  Vector gradient(const Vector& params, const std::vector<int>& batch) const;
  double full_loss(const Vector& params) const;
  Vector full_gradient(const Vector& params) const;
  double loss_on(const Dataset& other, const Vector& params) const;
};

StochasticObjective make_mlp2(int width, int input_dim, std::uint64_t seed, Dataset data);
StochasticObjective make_least_squares(std::uint64_t seed, Dataset data);

nlohmann::json objective_spec_json(const StochasticObjective& obj);
StochasticObjective objective_from_json(const nlohmann::json& j);

// SGD-with-repeats: each drawn batch is used for k consecutive steps. From
// switch_off_epoch on (0-based), k collapses to 1. base.max_steps is unused;
// the budget is epochs. Schedule entries fire at the start of the matching
// epoch index.
struct RepeatsConfig {
  GDConfig base;
  int k = 1;
  int batch_size = 1;
  int epochs = 1;
  std::optional<int> switch_off_epoch;
};

void validate(const RepeatsConfig& cfg, int dataset_size);

// Batch order for one epoch: a Fisher-Yates permutation seeded by
// (seed, epoch) only, chunked into batch_size groups (last one may be short).
// Never depends on learning rate, k, or parameter values.
std::vector<std::vector<int>> epoch_batches(int n, int batch_size, std::uint64_t seed, int epoch);

struct SgdState {
  Vector params;
  Vector velocity;
  double learning_rate = 0.0;
  bool done = false;
  Termination termination = Termination::max_steps;
};

// Advances epochs [epoch_begin, epoch_end), recording every parameter update
// into traj when given (full-dataset loss and gradient norm, as gd_run does
// with the landscape). batch_log captures each batch in order of use.
void sgd_advance(const StochasticObjective& obj, const RepeatsConfig& cfg,
                 std::uint64_t batch_seed, int epoch_begin, int epoch_end, SgdState& state,
                 Trajectory* traj = nullptr, std::vector<std::vector<int>>* batch_log = nullptr);

// Init params from derive_seed(seed, 1), batch stream from derive_seed(seed, 2),
// so runs sharing `seed` share both regardless of learning rate or k.
Trajectory sgd_repeats_run(const StochasticObjective& obj, const RepeatsConfig& cfg,
                           std::uint64_t seed);

// Standard SGD, written as its own loop; sgd_repeats_run with k=1 must match
// it bitwise.
Trajectory sgd_run(const StochasticObjective& obj, const GDConfig& base, int batch_size,
                   int epochs, std::uint64_t seed);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double final_loss = 0.0;    // full training loss at the last iterate; +inf on divergence
  double holdout_loss = 0.0;  // loss on a fresh dataset from holdout_spec
};

struct ArmResult {
  std::string name;
  double gamma = 0.0;
  int k = 1;
  int epochs = 0;
  std::vector<SeedOutcome> seeds;
  double mean = 0.0;
  double sd = 0.0;
  double holdout_mean = 0.0;
  double holdout_sd = 0.0;
};

struct BenchmarkResult {
  std::vector<ArmResult> arms;  // large_lr, small_lr_repeats, small_lr_long
  std::uint64_t master_seed = 0;
};

// Three arms per seed j (run seed = derive_seed(master_seed, j), shared across
// arms): gamma_large at k=1 for `epochs`; gamma_small with repeats k for
// `epochs` plus a k=1 tail of max(1, epochs/10) epochs; gamma_small at k=1 for
// k*epochs. Runs are independent and may execute in parallel.
BenchmarkResult repeats_benchmark(const StochasticObjective& obj, double gamma_large,
                                  double gamma_small, int k, int epochs, int batch_size,
                                  int n_seeds, std::uint64_t master_seed, double momentum = 0.0,
                                  double weight_decay = 0.0);

nlohmann::json benchmark_to_json(const BenchmarkResult& res);

}  // namespace escape_lab
