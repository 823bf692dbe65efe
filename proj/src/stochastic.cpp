#include "escape_lab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "escape_lab/parallel.hpp"
#include "escape_lab/rng.hpp"

namespace escape_lab {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int mlp2_param_dim(int width, int input_dim) { return width * input_dim + 2 * width + 1; }

double mlp2_forward(const Vector& params, int width, int input_dim, const Vector& x) {
  Eigen::Map<const RowMat> w1(params.data(), width, input_dim);
  const auto b1 = params.segment(width * input_dim, width);
  const auto w2 = params.segment(width * input_dim + width, width);
  const double b2 = params(width * input_dim + 2 * width);
  const Vector h = (w1 * x + b1).cwiseMax(0.0);
  return w2.dot(h) + b2;
}

// Uniform +-1/sqrt(fan_in), filled in layout order. Shared by student init
// and teacher generation so both are pinned to one scheme.
Vector mlp2_init(int width, int input_dim, std::uint64_t seed) {
  Rng rng(seed);
  Vector p(mlp2_param_dim(width, input_dim));
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(width));
  const int layer1 = width * input_dim + width;
  for (int i = 0; i < layer1; ++i) p(i) = rng.uniform(-bound1, bound1);
  for (int i = layer1; i < p.size(); ++i) p(i) = rng.uniform(-bound2, bound2);
  return p;
}

void check_batch(const std::vector<int>& batch, int n) {
  if (batch.empty()) throw std::invalid_argument("objective: empty batch");
  for (int idx : batch) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("objective: batch index out of range");
  }
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

double batch_loss(const StochasticObjective& obj, const Dataset& data, const Vector& params,
                  const std::vector<int>& batch) {
  double total = 0.0;
  for (int idx : batch) {
    const Vector x = data.inputs.row(idx).transpose();
    const double e = obj.predict(params, x) - data.targets(idx);
    total += 0.5 * e * e;
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace

std::string to_string(DatasetKind kind) {
  return kind == DatasetKind::linear ? "linear" : "teacher_mlp2";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "linear") return DatasetKind::linear;
  if (s == "teacher_mlp2") return DatasetKind::teacher_mlp2;
  throw std::invalid_argument("unknown dataset kind: " + s);
}

std::string to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::least_squares ? "least_squares" : "mlp2";
}

Dataset make_dataset(const DatasetSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("make_dataset: need at least one example");
  if (spec.input_dim < 1) throw std::invalid_argument("make_dataset: input_dim must be positive");
  if (spec.noise_sd < 0.0) throw std::invalid_argument("make_dataset: noise_sd must be nonnegative");
  if (spec.kind == DatasetKind::teacher_mlp2 && spec.teacher_width < 1)
    throw std::invalid_argument("make_dataset: teacher_width must be positive");

  Dataset data;
  data.spec = spec;
  data.inputs.resize(spec.n, spec.input_dim);
  data.targets.resize(spec.n);

  Rng rng_x(derive_seed(spec.seed, 1));
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.input_dim; ++j) data.inputs(i, j) = rng_x.normal();

  if (spec.kind == DatasetKind::linear) {
    Rng rng_teacher(derive_seed(spec.seed, 2));
    Vector w(spec.input_dim);
    for (int j = 0; j < spec.input_dim; ++j) w(j) = rng_teacher.normal();
    data.targets = data.inputs * w;
  } else {
    const Vector teacher = mlp2_init(spec.teacher_width, spec.input_dim, derive_seed(spec.seed, 2));
    for (int i = 0; i < spec.n; ++i)
      data.targets(i) =
          mlp2_forward(teacher, spec.teacher_width, spec.input_dim, data.inputs.row(i).transpose());
  }

  Rng rng_noise(derive_seed(spec.seed, 3));
  for (int i = 0; i < spec.n; ++i) data.targets(i) += spec.noise_sd * rng_noise.normal();
  return data;
}

DatasetSpec holdout_spec(DatasetSpec spec) {
  spec.seed = derive_seed(spec.seed, 1001);
  return spec;
}

nlohmann::json dataset_spec_to_json(const DatasetSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"n", spec.n},
          {"input_dim", spec.input_dim},
          {"teacher_width", spec.teacher_width},
          {"noise_sd", spec.noise_sd},
          {"seed", spec.seed}};
}

DatasetSpec dataset_spec_from_json(const nlohmann::json& j) {
  DatasetSpec spec;
  spec.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
  spec.n = j.at("n").get<int>();
  spec.input_dim = j.at("input_dim").get<int>();
  spec.teacher_width = j.value("teacher_width", 0);
  spec.noise_sd = j.value("noise_sd", 0.0);
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

int StochasticObjective::param_dim() const {
  return kind == ObjectiveKind::mlp2 ? mlp2_param_dim(width, input_dim) : input_dim;
}

Vector StochasticObjective::init_params() const { return init_params(init_seed); }

Vector StochasticObjective::init_params(std::uint64_t seed) const {
  if (kind == ObjectiveKind::mlp2) return mlp2_init(width, input_dim, seed);
  Rng rng(seed);
  Vector p(input_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (int i = 0; i < p.size(); ++i) p(i) = rng.uniform(-bound, bound);
  return p;
}

double StochasticObjective::predict(const Vector& params, const Vector& x) const {
  if (params.size() != param_dim()) throw std::invalid_argument("objective: bad parameter size");
  if (x.size() != input_dim) throw std::invalid_argument("objective: bad input size");
  if (kind == ObjectiveKind::mlp2) return mlp2_forward(params, width, input_dim, x);
  return params.dot(x);
}

double StochasticObjective::loss(const Vector& params, const std::vector<int>& batch) const {
  check_batch(batch, data.size());
  return batch_loss(*this, data, params, batch);
}

Vector StochasticObjective::gradient(const Vector& params, const std::vector<int>& batch) const {
  check_batch(batch, data.size());
  if (params.size() != param_dim()) throw std::invalid_argument("objective: bad parameter size");
  Vector grad = Vector::Zero(param_dim());

  if (kind == ObjectiveKind::least_squares) {
    for (int idx : batch) {
      const Vector x = data.inputs.row(idx).transpose();
      const double e = params.dot(x) - data.targets(idx);
      grad += e * x;
    }
  } else {
    Eigen::Map<const RowMat> w1(params.data(), width, input_dim);
    const auto b1 = params.segment(width * input_dim, width);
    const auto w2 = params.segment(width * input_dim + width, width);
    const double b2 = params(width * input_dim + 2 * width);
    Eigen::Map<RowMat> g_w1(grad.data(), width, input_dim);
    auto g_b1 = grad.segment(width * input_dim, width);
    auto g_w2 = grad.segment(width * input_dim + width, width);
    double& g_b2 = grad(width * input_dim + 2 * width);

    for (int idx : batch) {
      const Vector x = data.inputs.row(idx).transpose();
      const Vector z = w1 * x + b1;
      const Vector h = z.cwiseMax(0.0);
      const double e = w2.dot(h) + b2 - data.targets(idx);
      // dL/dz_j = e * w2_j on the active side, 0 at and below the kink
      const Vector dz = (z.array() > 0.0).select(e * w2, Vector::Zero(width));
      g_w1 += dz * x.transpose();
      g_b1 += dz;
      g_w2 += e * h;
      g_b2 += e;
    }
  }
  grad /= static_cast<double>(batch.size());
  return grad;
}

double StochasticObjective::full_loss(const Vector& params) const {
  return loss(params, all_indices(data.size()));
}

Vector StochasticObjective::full_gradient(const Vector& params) const {
  return gradient(params, all_indices(data.size()));
}

double StochasticObjective::loss_on(const Dataset& other, const Vector& params) const {
  if (other.inputs.cols() != input_dim)
    throw std::invalid_argument("objective: dataset dimension mismatch");
  if (other.size() < 1) throw std::invalid_argument("objective: empty dataset");
  return batch_loss(*this, other, params, all_indices(other.size()));
}

StochasticObjective make_mlp2(int width, int input_dim, std::uint64_t seed, Dataset data) {
  if (width < 1) throw std::invalid_argument("make_mlp2: width must be positive");
  if (input_dim < 1) throw std::invalid_argument("make_mlp2: input_dim must be positive");
  if (data.size() < 1) throw std::invalid_argument("make_mlp2: empty dataset");
  if (data.inputs.cols() != input_dim)
    throw std::invalid_argument("make_mlp2: dataset dimension mismatch");
  StochasticObjective obj;
  obj.kind = ObjectiveKind::mlp2;
  obj.input_dim = input_dim;
  obj.width = width;
  obj.init_seed = seed;
  obj.data = std::move(data);
  return obj;
}

StochasticObjective make_least_squares(std::uint64_t seed, Dataset data) {
  if (data.size() < 1) throw std::invalid_argument("make_least_squares: empty dataset");
  StochasticObjective obj;
  obj.kind = ObjectiveKind::least_squares;
  obj.input_dim = static_cast<int>(data.inputs.cols());
  obj.init_seed = seed;
  obj.data = std::move(data);
  return obj;
}

nlohmann::json objective_spec_json(const StochasticObjective& obj) {
  return {{"kind", to_string(obj.kind)},
          {"width", obj.width},
          {"input_dim", obj.input_dim},
          {"init_seed", obj.init_seed},
          {"data", dataset_spec_to_json(obj.data.spec)}};
}

StochasticObjective objective_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Dataset data = make_dataset(dataset_spec_from_json(j.at("data")));
  const auto seed = j.value("init_seed", std::uint64_t{0});
  if (kind == "mlp2") {
    const int input_dim = j.value("input_dim", static_cast<int>(data.inputs.cols()));
    return make_mlp2(j.at("width").get<int>(), input_dim, seed, std::move(data));
  }
  if (kind == "least_squares") return make_least_squares(seed, std::move(data));
  throw std::invalid_argument("unknown objective kind: " + kind);
}

void validate(const RepeatsConfig& cfg, int dataset_size) {
  validate(cfg.base);
  if (cfg.k < 1) throw std::invalid_argument("repeats: k must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("repeats: batch_size must be >= 1");
  if (cfg.epochs < 0) throw std::invalid_argument("repeats: epochs must be nonnegative");
  if (dataset_size < 1) throw std::invalid_argument("repeats: empty dataset");
  if (cfg.switch_off_epoch &&
      (*cfg.switch_off_epoch < 0 || *cfg.switch_off_epoch > cfg.epochs))
    throw std::invalid_argument("repeats: switch_off_epoch must lie in [0, epochs]");
}

std::vector<std::vector<int>> epoch_batches(int n, int batch_size, std::uint64_t seed,
                                            int epoch) {
  if (n < 1) throw std::invalid_argument("epoch_batches: need at least one example");
  if (batch_size < 1) throw std::invalid_argument("epoch_batches: batch_size must be >= 1");
  if (epoch < 0) throw std::invalid_argument("epoch_batches: epoch must be nonnegative");
  std::vector<int> perm = all_indices(n);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n; start += batch_size) {
    const int end = std::min(n, start + batch_size);
    batches.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return batches;
}

namespace {

// Records the current point and applies the same stop rules as gd_run:
// tolerance first, then the divergence cap.
void record_and_check(const StochasticObjective& obj, const GDConfig& base, SgdState& state,
                      Trajectory* traj) {
  const double f = obj.full_loss(state.params);
  const double gn = obj.full_gradient(state.params).norm();
  if (traj) {
    traj->points.push_back(state.params);
    traj->losses.push_back(f);
    traj->grad_norms.push_back(gn);
  }
  if (gn <= base.grad_tolerance) {
    state.done = true;
    state.termination = Termination::tolerance;
    return;
  }
  if (!std::isfinite(f) || state.params.norm() > kDivergeCap) {
    state.done = true;
    state.termination = Termination::diverged;
  }
}

}  // namespace

void sgd_advance(const StochasticObjective& obj, const RepeatsConfig& cfg,
                 std::uint64_t batch_seed, int epoch_begin, int epoch_end, SgdState& state,
                 Trajectory* traj, std::vector<std::vector<int>>* batch_log) {
  const int n = obj.data.size();
  for (int epoch = epoch_begin; epoch < epoch_end && !state.done; ++epoch) {
    for (const ScheduleEntry& entry : cfg.base.schedule)
      if (entry.step == epoch) state.learning_rate *= entry.factor;
    const int k_eff =
        (cfg.switch_off_epoch && epoch >= *cfg.switch_off_epoch) ? 1 : cfg.k;
    for (const std::vector<int>& batch : epoch_batches(n, cfg.batch_size, batch_seed, epoch)) {
      if (batch_log) batch_log->push_back(batch);
      for (int rep = 0; rep < k_eff && !state.done; ++rep) {
        const Vector g = obj.gradient(state.params, batch);
        state.velocity =
            cfg.base.momentum * state.velocity + g + cfg.base.weight_decay * state.params;
        state.params -= state.learning_rate * state.velocity;
        record_and_check(obj, cfg.base, state, traj);
      }
      if (state.done) break;
    }
  }
}

Trajectory sgd_repeats_run(const StochasticObjective& obj, const RepeatsConfig& cfg,
                           std::uint64_t seed) {
  validate(cfg, obj.data.size());
  Trajectory traj;
  traj.seed = seed;
  traj.config = gd_config_to_json(cfg.base);
  traj.config["k"] = cfg.k;
  traj.config["batch_size"] = cfg.batch_size;
  traj.config["epochs"] = cfg.epochs;
  traj.config["switch_off_epoch"] =
      cfg.switch_off_epoch ? nlohmann::json(*cfg.switch_off_epoch) : nlohmann::json();
  traj.config["objective"] = objective_spec_json(obj);

  SgdState state;
  state.params = obj.init_params(derive_seed(seed, 1));
  state.velocity = Vector::Zero(obj.param_dim());
  state.learning_rate = cfg.base.learning_rate;
  record_and_check(obj, cfg.base, state, &traj);
  sgd_advance(obj, cfg, derive_seed(seed, 2), 0, cfg.epochs, state, &traj, nullptr);
  traj.termination = state.termination;
  return traj;
}

Trajectory sgd_run(const StochasticObjective& obj, const GDConfig& base, int batch_size,
                   int epochs, std::uint64_t seed) {
  validate(base);
  const int n = obj.data.size();
  if (n < 1) throw std::invalid_argument("sgd_run: empty dataset");
  if (batch_size < 1) throw std::invalid_argument("sgd_run: batch_size must be >= 1");
  if (epochs < 0) throw std::invalid_argument("sgd_run: epochs must be nonnegative");

  Trajectory traj;
  traj.seed = seed;
  traj.config = gd_config_to_json(base);
  traj.config["batch_size"] = batch_size;
  traj.config["epochs"] = epochs;
  traj.config["objective"] = objective_spec_json(obj);

  SgdState state;
  state.params = obj.init_params(derive_seed(seed, 1));
  state.velocity = Vector::Zero(obj.param_dim());
  state.learning_rate = base.learning_rate;
  record_and_check(obj, base, state, &traj);

  const std::uint64_t batch_seed = derive_seed(seed, 2);
  for (int epoch = 0; epoch < epochs && !state.done; ++epoch) {
    for (const ScheduleEntry& entry : base.schedule)
      if (entry.step == epoch) state.learning_rate *= entry.factor;
    for (const std::vector<int>& batch : epoch_batches(n, batch_size, batch_seed, epoch)) {
      const Vector g = obj.gradient(state.params, batch);
      state.velocity = base.momentum * state.velocity + g + base.weight_decay * state.params;
      state.params -= state.learning_rate * state.velocity;
      record_and_check(obj, base, state, &traj);
      if (state.done) break;
    }
  }
  traj.termination = state.termination;
  return traj;
}

namespace {

struct ArmSpec {
  std::string name;
  RepeatsConfig cfg;
};

double sample_sd(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

BenchmarkResult repeats_benchmark(const StochasticObjective& obj, double gamma_large,
                                  double gamma_small, int k, int epochs, int batch_size,
                                  int n_seeds, std::uint64_t master_seed, double momentum,
                                  double weight_decay) {
  if (n_seeds < 1) throw std::invalid_argument("repeats_benchmark: need at least one seed");
  if (k < 1) throw std::invalid_argument("repeats_benchmark: k must be >= 1");
  if (epochs < 1) throw std::invalid_argument("repeats_benchmark: epochs must be >= 1");

  GDConfig base;
  base.momentum = momentum;
  base.weight_decay = weight_decay;

  std::vector<ArmSpec> arms(3);
  arms[0].name = "large_lr";
  arms[0].cfg.base = base;
  arms[0].cfg.base.learning_rate = gamma_large;
  arms[0].cfg.k = 1;
  arms[0].cfg.batch_size = batch_size;
  arms[0].cfg.epochs = epochs;

  // Repeats arm: after the budgeted epochs a short k=1 tail lets the run
  // settle off the last repeated batch.
  const int tail = k > 1 ? std::max(1, epochs / 10) : 0;
  arms[1].name = "small_lr_repeats";
  arms[1].cfg.base = base;
  arms[1].cfg.base.learning_rate = gamma_small;
  arms[1].cfg.k = k;
  arms[1].cfg.batch_size = batch_size;
  arms[1].cfg.epochs = epochs + tail;
  arms[1].cfg.switch_off_epoch = epochs;

  arms[2].name = "small_lr_long";
  arms[2].cfg.base = base;
  arms[2].cfg.base.learning_rate = gamma_small;
  arms[2].cfg.k = 1;
  arms[2].cfg.batch_size = batch_size;
  arms[2].cfg.epochs = k * epochs;

  for (const ArmSpec& arm : arms) validate(arm.cfg, obj.data.size());
  const Dataset holdout = make_dataset(holdout_spec(obj.data.spec));

  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(3 * n_seeds));
  parallel_for(3L * n_seeds, [&](long idx) {
    const int arm = static_cast<int>(idx / n_seeds);
    const int j = static_cast<int>(idx % n_seeds);
    const std::uint64_t run_seed = derive_seed(master_seed, static_cast<std::uint64_t>(j));
    const Trajectory traj = sgd_repeats_run(obj, arms[static_cast<std::size_t>(arm)].cfg, run_seed);
    SeedOutcome& out = outcomes[static_cast<std::size_t>(idx)];
    out.seed = run_seed;
    if (traj.termination == Termination::diverged) {
      out.final_loss = std::numeric_limits<double>::infinity();
      out.holdout_loss = std::numeric_limits<double>::infinity();
    } else {
      out.final_loss = traj.losses.back();
      out.holdout_loss = obj.loss_on(holdout, traj.points.back());
    }
  });

  BenchmarkResult result;
  result.master_seed = master_seed;
  for (int arm = 0; arm < 3; ++arm) {
    ArmResult r;
    r.name = arms[static_cast<std::size_t>(arm)].name;
    r.gamma = arms[static_cast<std::size_t>(arm)].cfg.base.learning_rate;
    r.k = arms[static_cast<std::size_t>(arm)].cfg.k;
    r.epochs = arms[static_cast<std::size_t>(arm)].cfg.epochs;
    std::vector<double> finals, holdouts;
    for (int j = 0; j < n_seeds; ++j) {
      const SeedOutcome& out = outcomes[static_cast<std::size_t>(arm * n_seeds + j)];
      r.seeds.push_back(out);
      finals.push_back(out.final_loss);
      holdouts.push_back(out.holdout_loss);
    }
    r.mean = std::accumulate(finals.begin(), finals.end(), 0.0) / n_seeds;
    r.sd = sample_sd(finals, r.mean);
    r.holdout_mean = std::accumulate(holdouts.begin(), holdouts.end(), 0.0) / n_seeds;
    r.holdout_sd = sample_sd(holdouts, r.holdout_mean);
    result.arms.push_back(std::move(r));
  }
  return result;
}

nlohmann::json benchmark_to_json(const BenchmarkResult& res) {
  nlohmann::json arms = nlohmann::json::array();
  for (const ArmResult& arm : res.arms) {
    nlohmann::json seeds = nlohmann::json::array();
    for (const SeedOutcome& out : arm.seeds)
      seeds.push_back({{"seed", out.seed},
                       {"final_loss", out.final_loss},
                       {"holdout_loss", out.holdout_loss}});
    arms.push_back({{"name", arm.name},
                    {"gamma", arm.gamma},
                    {"k", arm.k},
                    {"epochs", arm.epochs},
                    {"seeds", std::move(seeds)},
                    {"mean", arm.mean},
                    {"sd", arm.sd},
                    {"holdout_mean", arm.holdout_mean},
                    {"holdout_sd", arm.holdout_sd}});
  }
  return {{"master_seed", res.master_seed}, {"arms", std::move(arms)}};
}

}  // namespace escape_lab
