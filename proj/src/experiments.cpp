#include "escape_lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "escape_lab/io.hpp"
#include "escape_lab/parallel.hpp"
#include "escape_lab/rng.hpp"

namespace escape_lab {

const char* to_string(BasinKind k) {
  switch (k) {
    case BasinKind::global: return "global";
    case BasinKind::sharp_local: return "sharp_local";
    case BasinKind::flat_local: return "flat_local";
    case BasinKind::none: return "none";
  }
  return "none";
}

BasinLabel classify(const Trajectory& traj, const Landscape& l) {
  if (traj.points.empty()) throw std::invalid_argument("classify: empty trajectory");
  BasinLabel label;
  label.final_point = traj.points.back();
  label.final_loss = traj.losses.back();
  if (traj.termination == Termination::diverged) return label;
  for (const Minimum& m : l.minima()) {
    const bool near = (label.final_point - m.location).norm() <= kClassifyTolerance;
    const bool hit = m.label == MinimumKind::flat_local && m.plateau
                         ? contains(*m.plateau, label.final_point)
                         : near;
    if (!hit) continue;
    switch (m.label) {
      case MinimumKind::global: label.kind = BasinKind::global; break;
      case MinimumKind::sharp_local: label.kind = BasinKind::sharp_local; break;
      case MinimumKind::flat_local: label.kind = BasinKind::flat_local; break;
    }
    return label;
  }
  return label;
}

SweepResult mc_sweep(const Landscape& l, const Region& w, const std::vector<double>& gammas,
                     int n, const GDConfig& base, std::uint64_t master_seed) {
  if (gammas.empty()) throw std::invalid_argument("mc_sweep: empty gamma grid");
  if (n < 1) throw std::invalid_argument("mc_sweep: need at least one replicate");
  if (!(measure(w) > 0.0)) throw std::invalid_argument("mc_sweep: W must have positive measure");
  std::vector<GDConfig> configs;
  for (double gamma : gammas) {
    GDConfig cfg = base;
    cfg.learning_rate = gamma;
    validate(cfg);
    configs.push_back(cfg);
  }

  const long total = static_cast<long>(gammas.size()) * n;
  std::vector<BasinKind> labels(static_cast<std::size_t>(total), BasinKind::none);
  std::vector<char> blew_up(static_cast<std::size_t>(total), 0);
  parallel_for(total, [&](long idx) {
    const long gi = idx / n;
    const long j = idx % n;
    const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(j));
    const Trajectory traj = gd_random(l, w, configs[static_cast<std::size_t>(gi)], seed);
    labels[static_cast<std::size_t>(idx)] = classify(traj, l).kind;
    blew_up[static_cast<std::size_t>(idx)] = traj.termination == Termination::diverged ? 1 : 0;
  });

  SweepResult result;
  result.n = n;
  result.landscape = landscape_spec_to_json(l.spec());
  result.w = region_to_json(w);
  result.base_config = gd_config_to_json(base);
  result.master_seed = master_seed;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    SweepColumn col;
    col.gamma = gammas[gi];
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = gi * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
      switch (labels[idx]) {
        case BasinKind::global: ++col.global; break;
        case BasinKind::sharp_local: ++col.sharp_local; break;
        case BasinKind::flat_local: ++col.flat_local; break;
        case BasinKind::none: ++col.none; break;
      }
      if (blew_up[idx]) ++col.diverged;
    }
    result.columns.push_back(col);
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "gamma,global,sharp_local,flat_local,none\n";
  for (const SweepColumn& col : result.columns) {
    out += fmt_double(col.gamma);
    out += ',' + std::to_string(col.global);
    out += ',' + std::to_string(col.sharp_local);
    out += ',' + std::to_string(col.flat_local);
    out += ',' + std::to_string(col.none);
    out += '\n';
  }
  return out;
}

std::vector<double> default_sweep_gammas() {
  return {2e-4, 4e-4,  6e-4, 8e-4, 8.5e-4, 9e-4,   9.5e-4, 1.2e-3,
          2e-3, 4e-3,  8e-3, 1.5e-2, 2.5e-2, 3.5e-2, 4e-2};
}

Region default_sweep_w() { return Region::interval(7.0, 10.0); }

long default_sweep_steps() { return 20000; }

namespace {

EscapeArm run_escape_arm(const Landscape& l, const Region& m, const Vector& x_star,
                         double target, double gamma, const Vector& x0, GDConfig cfg) {
  cfg.learning_rate = gamma;
  validate(cfg);
  const Trajectory traj = gd_run(l, x0, cfg);
  EscapeArm arm;
  arm.gamma = gamma;
  arm.min_distance_to_star = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < traj.points.size(); ++t) {
    const Vector& p = traj.points[t];
    if (!arm.exited_m && !contains(m, p)) {
      arm.exited_m = true;
      arm.exit_step = static_cast<long>(t);
    }
    arm.min_distance_to_star = std::min(arm.min_distance_to_star, (p - x_star).norm());
  }
  arm.distance_target_met = arm.min_distance_to_star < target;
  arm.termination = traj.termination;
  arm.final_loss = traj.losses.back();
  arm.final_point = traj.points.back();
  return arm;
}

}  // namespace

EscapeDemoReport escape_demo(const Landscape& l, const Region& m, const Vector& x_dagger,
                             const Vector& x_star, double gamma_small, double gamma_large,
                             const Vector& x0, const GDConfig& base) {
  if (!contains(m, x0)) throw std::invalid_argument("escape_demo: x0 must lie in m");
  if (x_dagger.size() != x_star.size() || x0.size() != x_dagger.size())
    throw std::invalid_argument("escape_demo: dimension mismatch");
  EscapeDemoReport rep;
  rep.target_distance = (x_dagger - x_star).norm() - diameter(m);
  rep.small_arm = run_escape_arm(l, m, x_star, rep.target_distance, gamma_small, x0, base);
  rep.large_arm = run_escape_arm(l, m, x_star, rep.target_distance, gamma_large, x0, base);
  return rep;
}

namespace {

nlohmann::json arm_to_json(const EscapeArm& arm) {
  nlohmann::json point = nlohmann::json::array();
  for (int i = 0; i < arm.final_point.size(); ++i) point.push_back(arm.final_point(i));
  return {{"gamma", arm.gamma},
          {"exited_m", arm.exited_m},
          {"exit_step", arm.exit_step},
          {"min_distance_to_star", arm.min_distance_to_star},
          {"distance_target_met", arm.distance_target_met},
          {"termination", to_string(arm.termination)},
          {"final_loss", arm.final_loss},
          {"final_point", std::move(point)}};
}

}  // namespace

nlohmann::json escape_report_to_json(const EscapeDemoReport& rep) {
  return {{"target_distance", rep.target_distance},
          {"small", arm_to_json(rep.small_arm)},
          {"large", arm_to_json(rep.large_arm)}};
}

void cyclic_jacobi(Eigen::MatrixXd& a, Eigen::MatrixXd& v, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cyclic_jacobi: matrix must be square");
  const long n = a.rows();
  v = Eigen::MatrixXd::Identity(n, n);
  const double scale = a.norm();
  if (scale == 0.0) return;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (long p = 0; p < n; ++p)
      for (long q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol * scale) break;
    for (long p = 0; p < n - 1; ++p) {
      for (long q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // stable tangent choice: the smaller rotation of the two that
        // annihilate a(p,q)
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double sign = theta >= 0.0 ? 1.0 : -1.0;
        const double t = sign / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (long k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(p, k) = a(k, p);
          a(k, q) = s * akp + c * akq;
          a(q, k) = a(k, q);
        }
        for (long k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

namespace {

// First standard basis vector not parallel to u, orthogonalized and
// normalized. Used when the data itself pins down only one direction.
Vector orthonormal_completion(const Vector& u) {
  const long d = u.size();
  for (long j = 0; j < d; ++j) {
    Vector w = Vector::Zero(d);
    w(j) = 1.0;
    w -= w.dot(u) * u;
    const double norm = w.norm();
    if (norm > 1e-8) return w / norm;
  }
  throw std::runtime_error("pca: no orthonormal completion found");
}

void fix_sign(Vector& w) {
  long arg = 0;
  double best = -1.0;
  for (long i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > best) {
      best = std::abs(w(i));
      arg = i;
    }
  }
  if (w(arg) < 0.0) w = -w;
}

}  // namespace

PcaProjection pca_project(const std::vector<Trajectory>& trajs) {
  long total = 0;
  long dim = -1;
  for (const Trajectory& traj : trajs) {
    if (traj.points.empty()) throw std::invalid_argument("pca: empty trajectory");
    if (dim < 0) dim = traj.points.front().size();
    for (const Vector& p : traj.points)
      if (p.size() != dim) throw std::invalid_argument("pca: dimension mismatch");
    total += static_cast<long>(traj.points.size()) - 1;
  }
  if (total < 2) throw std::invalid_argument("pca: need at least 2 displacement vectors");
  if (dim < 2) throw std::invalid_argument("pca: ambient dimension must be at least 2");

  Eigen::MatrixXd displacements(total, dim);
  long row = 0;
  for (const Trajectory& traj : trajs) {
    const Vector& origin = traj.points.front();
    for (std::size_t t = 1; t < traj.points.size(); ++t)
      displacements.row(row++) = (traj.points[t] - origin).transpose();
  }

  const double trace = displacements.squaredNorm();
  Eigen::MatrixXd gram = displacements * displacements.transpose();
  Eigen::MatrixXd vecs;
  cyclic_jacobi(gram, vecs, 1e-12);

  std::vector<long> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(),
                   [&gram](long a, long b) { return gram(a, a) > gram(b, b); });

  PcaProjection proj;
  proj.eigenvalue1 = std::max(0.0, gram(order[0], order[0]));
  proj.eigenvalue2 = std::max(0.0, gram(order[1], order[1]));

  if (proj.eigenvalue1 <= 0.0) {
    // no displacement energy at all; report a fixed frame
    proj.component1 = Vector::Zero(dim);
    proj.component1(0) = 1.0;
    proj.component2 = orthonormal_completion(proj.component1);
  } else {
    proj.component1 =
        displacements.transpose() * vecs.col(order[0]) / std::sqrt(proj.eigenvalue1);
    proj.component1.normalize();
    if (proj.eigenvalue2 <= proj.eigenvalue1 * 1e-10) {
      proj.eigenvalue2 = 0.0;
      proj.component2 = orthonormal_completion(proj.component1);
    } else {
      proj.component2 =
          displacements.transpose() * vecs.col(order[1]) / std::sqrt(proj.eigenvalue2);
      // one re-orthogonalization pass keeps the pair orthonormal even when
      // the eigengap is small
      proj.component2 -= proj.component2.dot(proj.component1) * proj.component1;
      proj.component2.normalize();
    }
  }
  fix_sign(proj.component1);
  fix_sign(proj.component2);
  if (trace > 0.0) {
    proj.explained1 = proj.eigenvalue1 / trace;
    proj.explained2 = proj.eigenvalue2 / trace;
  }

  for (const Trajectory& traj : trajs) {
    const Vector& origin = traj.points.front();
    Eigen::MatrixXd path(traj.points.size(), 2);
    path.row(0).setZero();
    for (std::size_t t = 1; t < traj.points.size(); ++t) {
      const Vector d = traj.points[t] - origin;
      path(static_cast<long>(t), 0) = d.dot(proj.component1);
      path(static_cast<long>(t), 1) = d.dot(proj.component2);
    }
    proj.paths.push_back(std::move(path));
  }
  return proj;
}

std::string pca_csv(const PcaProjection& proj) {
  std::string out = "traj_id,step,pc1,pc2\n";
  for (std::size_t id = 0; id < proj.paths.size(); ++id) {
    const Eigen::MatrixXd& path = proj.paths[id];
    for (long t = 0; t < path.rows(); ++t) {
      out += std::to_string(id);
      out += ',' + std::to_string(t);
      out += ',' + fmt_double(path(t, 0));
      out += ',' + fmt_double(path(t, 1));
      out += '\n';
    }
  }
  return out;
}

std::vector<long> spike_detect(const std::vector<double>& losses, double factor) {
  if (losses.empty()) throw std::invalid_argument("spike_detect: empty series");
  if (!(factor > 1.0)) throw std::invalid_argument("spike_detect: factor must exceed 1");
  std::vector<long> spikes;
  double running_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < losses.size(); ++i) {
    running_min = std::min(running_min, losses[i]);
    if (losses[i] > factor * running_min) spikes.push_back(static_cast<long>(i));
  }
  return spikes;
}

}  // namespace escape_lab
