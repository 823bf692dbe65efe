#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "escape_lab/experiments.hpp"
#include "escape_lab/rng.hpp"

using namespace escape_lab;

namespace {

Vector vec1(double x) {
  Vector v(1);
  v << x;
  return v;
}

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Landscape wells() { return make_landscape({"toy1d_continuous", {}}); }

Trajectory line_traj(const Vector& dir, int steps) {
  Trajectory t;
  for (int i = 0; i <= steps; ++i) {
    t.points.push_back(i * dir);
    t.losses.push_back(0.0);
    t.grad_norms.push_back(0.0);
  }
  return t;
}

}  // namespace

TEST_CASE("runs are labelled by the basin they settle in") {
  const Landscape l = wells();
  GDConfig cfg;
  cfg.learning_rate = 2e-4;
  cfg.max_steps = 5000;

  CHECK(classify(gd_run(l, vec1(0.3), cfg), l).kind == BasinKind::global);
  CHECK(classify(gd_run(l, vec1(2.45), cfg), l).kind == BasinKind::sharp_local);
  CHECK(classify(gd_run(l, vec1(8.45), cfg), l).kind == BasinKind::flat_local);

  cfg.max_steps = 3;  // stops mid-flight, near nothing
  CHECK(classify(gd_run(l, vec1(9.9), cfg), l).kind == BasinKind::none);
}

TEST_CASE("anywhere on the shelf counts as the flat basin") {
  const Landscape l = wells();
  GDConfig cfg;
  cfg.learning_rate = 1e-3;
  const BasinLabel lab = classify(gd_run(l, vec1(8.58), cfg), l);
  CHECK(lab.kind == BasinKind::flat_local);
  CHECK(lab.final_point[0] == 8.58);  // the shelf froze it in place
}

TEST_CASE("diverged runs are never assigned a basin") {
  const Landscape l = wells();
  GDConfig cfg;
  cfg.learning_rate = 0.06;  // bowl factor -1.4
  cfg.max_steps = 100000;
  const Trajectory traj = gd_run(l, vec1(9.7), cfg);
  REQUIRE(traj.termination == Termination::diverged);
  CHECK(classify(traj, l).kind == BasinKind::none);
}

TEST_CASE("sweeps are deterministic and share starts across the grid") {
  const Landscape l = wells();
  const Region w = Region::interval(7.0, 10.0);
  GDConfig base;
  base.learning_rate = 1.0;  // overwritten per column
  base.max_steps = 300;
  const std::vector<double> gammas = {3e-4, 3e-4, 2e-3};
  const SweepResult a = mc_sweep(l, w, gammas, 25, base, 42);
  const SweepResult b = mc_sweep(l, w, gammas, 25, base, 42);
  REQUIRE(a.columns.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.columns[i].global == b.columns[i].global);
    CHECK(a.columns[i].sharp_local == b.columns[i].sharp_local);
    CHECK(a.columns[i].flat_local == b.columns[i].flat_local);
    CHECK(a.columns[i].none == b.columns[i].none);
    CHECK(a.columns[i].global + a.columns[i].sharp_local + a.columns[i].flat_local +
              a.columns[i].none ==
          25);
    CHECK(a.columns[i].diverged <= a.columns[i].none);
  }
  // identical gammas see identical draws, so whole columns coincide
  CHECK(a.columns[0].flat_local == a.columns[1].flat_local);
  CHECK(a.columns[0].sharp_local == a.columns[1].sharp_local);

  const SweepResult c = mc_sweep(l, w, gammas, 25, base, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < 3; ++i)
    any_diff = any_diff || c.columns[i].flat_local != a.columns[i].flat_local;
  CHECK(any_diff);
}

TEST_CASE("sweep csv has the fixed header and one row per gamma") {
  const Landscape l = wells();
  GDConfig base;
  base.learning_rate = 1.0;
  base.max_steps = 50;
  const SweepResult res = mc_sweep(l, Region::interval(7.0, 10.0), {1e-3, 2e-3}, 5, base, 1);
  const std::string csv = sweep_csv(res);
  CHECK(csv.rfind("gamma,global,sharp_local,flat_local,none\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("sweep validates its inputs") {
  const Landscape l = wells();
  GDConfig base;
  base.learning_rate = 1.0;
  CHECK_THROWS_AS(mc_sweep(l, Region::interval(7.0, 10.0), {}, 5, base, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_sweep(l, Region::interval(7.0, 10.0), {1e-3}, 0, base, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_sweep(l, Region::interval(7.0, 7.0), {1e-3}, 5, base, 1),
                  std::invalid_argument);
}

TEST_CASE("shipped sweep defaults are in range for the shelf landscape") {
  const Region w = default_sweep_w();
  CHECK(w.dimension() == 1);
  CHECK(contains(w, vec1(8.0)));
  const auto gammas = default_sweep_gammas();
  REQUIRE(gammas.size() >= 10);
  for (std::size_t i = 1; i < gammas.size(); ++i) CHECK(gammas[i] > gammas[i - 1]);
  CHECK(gammas.front() < 2.0 / 2040.0);  // some columns keep the sharp well stable
  CHECK(gammas.back() < 0.05);           // none of them diverge on the bowl
  CHECK(default_sweep_steps() >= 1000);
}

TEST_CASE("escape demo separates the two step-size regimes on the graft instance") {
  const Landscape l = make_landscape({"sharp_patch", {20.0, 100.0, 0.25, 1.0}});
  const Region m = Region::ball(vec1(1.0), 0.25);
  GDConfig base;
  base.max_steps = 1000;
  const EscapeDemoReport rep =
      escape_demo(l, m, vec1(0.8), vec1(0.0), 0.004, 0.0249, vec1(0.9), base);

  CHECK(rep.target_distance == doctest::Approx(0.3).epsilon(1e-14));

  CHECK_FALSE(rep.small_arm.exited_m);
  CHECK(rep.small_arm.termination == Termination::tolerance);
  CHECK(std::abs(rep.small_arm.final_point[0] - 0.8) < 1e-6);
  CHECK_FALSE(rep.small_arm.distance_target_met);
  CHECK(rep.small_arm.gamma == 0.004);

  CHECK(rep.large_arm.exited_m);
  CHECK(rep.large_arm.exit_step >= 1);
  CHECK(rep.large_arm.termination == Termination::tolerance);
  CHECK(rep.large_arm.min_distance_to_star < 0.3);
  CHECK(rep.large_arm.distance_target_met);
  CHECK(std::abs(rep.large_arm.final_point[0]) < 1e-6);

  const nlohmann::json j = escape_report_to_json(rep);
  CHECK(j.at("target_distance").get<double>() == rep.target_distance);
  CHECK(j.at("small").at("exited_m").get<bool>() == false);
  CHECK(j.at("large").at("exited_m").get<bool>() == true);
}

TEST_CASE("escape demo rejects starts outside the watched set") {
  const Landscape l = make_landscape({"sharp_patch", {20.0, 100.0, 0.25, 1.0}});
  const Region m = Region::ball(vec1(1.0), 0.25);
  CHECK_THROWS_AS(escape_demo(l, m, vec1(0.8), vec1(0.0), 0.004, 0.0249, vec1(0.5)),
                  std::invalid_argument);
}

TEST_CASE("jacobi rotation diagonalizes a random symmetric matrix") {
  Rng rng(2026);
  Eigen::MatrixXd a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
  const Eigen::MatrixXd original = a;
  Eigen::MatrixXd v;
  cyclic_jacobi(a, v);

  // a now holds the eigenvalues on its diagonal
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) CHECK(std::abs(a(i, j)) < 1e-9);
  CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-12);
  CHECK((original * v - v * a.diagonal().asDiagonal().toDenseMatrix()).norm() <
        1e-9 * original.norm());
}

TEST_CASE("a straight-line run projects onto one component only") {
  const Vector dir = vec2(1.0, 2.0);
  const PcaProjection proj = pca_project({line_traj(dir, 5)});

  CHECK(proj.explained1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(proj.eigenvalue2 == 0.0);
  CHECK(proj.explained2 == 0.0);
  CHECK(std::abs(proj.component1.norm() - 1.0) < 1e-10);
  CHECK(std::abs(proj.component2.norm() - 1.0) < 1e-10);
  CHECK(std::abs(proj.component1.dot(proj.component2)) < 1e-10);
  // sign rule: the largest-magnitude coordinate points up
  CHECK(proj.component1[1] > 0.0);

  REQUIRE(proj.paths.size() == 1);
  const Eigen::MatrixXd& path = proj.paths[0];
  REQUIRE(path.rows() == 6);
  CHECK(path(0, 0) == 0.0);
  CHECK(path(0, 1) == 0.0);
  const double step = dir.norm();
  for (int t = 1; t < 6; ++t) {
    CHECK(path(t, 0) == doctest::Approx(t * step).epsilon(1e-10));
    CHECK(std::abs(path(t, 1)) < 1e-9);
  }
}

TEST_CASE("orthogonal runs land on orthogonal components ordered by energy") {
  const Trajectory big = line_traj(vec2(3.0, 0.0), 4);    // energy along x
  const Trajectory small = line_traj(vec2(0.0, 1.0), 4);  // smaller along y
  const PcaProjection proj = pca_project({big, small});

  CHECK(proj.eigenvalue1 > proj.eigenvalue2);
  CHECK(proj.eigenvalue2 > 0.0);
  CHECK(proj.explained1 + proj.explained2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(proj.component1[0]) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(proj.component1[1]) < 1e-10);
  CHECK(proj.component1[0] > 0.0);  // sign rule
  CHECK(proj.component2[1] > 0.0);
  REQUIRE(proj.paths.size() == 2);
  CHECK(proj.paths[0].rows() == 5);
  CHECK(proj.paths[1].rows() == 5);
  // the small run moves only along the second component
  for (int t = 0; t < 5; ++t) CHECK(std::abs(proj.paths[1](t, 0)) < 1e-10);
}

TEST_CASE("in two dimensions the projection preserves displacement geometry") {
  Rng rng(8);
  Trajectory a, b;
  for (int t = 0; t <= 6; ++t) {
    a.points.push_back(vec2(rng.normal(), rng.normal()));
    b.points.push_back(vec2(rng.normal(), rng.normal()));
    a.losses.push_back(0.0);
    b.losses.push_back(0.0);
    a.grad_norms.push_back(0.0);
    b.grad_norms.push_back(0.0);
  }
  const PcaProjection proj = pca_project({a, b});
  const auto check_traj = [&](const Trajectory& t, const Eigen::MatrixXd& path) {
    for (int i = 1; i < static_cast<int>(t.points.size()); ++i) {
      const Vector d = t.points[static_cast<std::size_t>(i)] - t.points[0];
      const Vector p = path.row(i).transpose();
      CHECK(std::abs(d.norm() - p.norm()) < 1e-8);
      CHECK(std::abs(d.dot(t.points[1] - t.points[0]) -
                     p.dot(path.row(1).transpose())) < 1e-8);
    }
  };
  check_traj(a, proj.paths[0]);
  check_traj(b, proj.paths[1]);
}

TEST_CASE("projection rejects degenerate inputs") {
  CHECK_THROWS_AS(pca_project({}), std::invalid_argument);

  Trajectory single;
  single.points.push_back(vec2(1.0, 2.0));
  single.losses.push_back(0.0);
  single.grad_norms.push_back(0.0);
  CHECK_THROWS_AS(pca_project({single}), std::invalid_argument);

  Trajectory flat1d;
  flat1d.points = {vec1(0.0), vec1(1.0), vec1(2.0)};
  flat1d.losses = {0.0, 0.0, 0.0};
  flat1d.grad_norms = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(pca_project({flat1d}), std::invalid_argument);
}

TEST_CASE("projection csv lists every step of every run") {
  const PcaProjection proj = pca_project({line_traj(vec2(1.0, 0.0), 3)});
  const std::string csv = pca_csv(proj);
  CHECK(csv.rfind("traj_id,step,pc1,pc2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("0,0,0,0\n") != std::string::npos);
}

TEST_CASE("loss spikes are flagged against the running minimum") {
  CHECK(spike_detect({1.0, 0.5, 5.0, 0.2}, 2.0) == std::vector<long>{2});
  CHECK(spike_detect({1.0, 3.0, 0.5, 0.9}, 2.0) == std::vector<long>{1});
  CHECK(spike_detect({5.0, 4.0, 3.0}, 1.5).empty());
  // the running minimum includes the current point, so a new low never spikes
  CHECK(spike_detect({1.0, 0.01, 0.02}, 1.5) == std::vector<long>{2});
  CHECK_THROWS_AS(spike_detect({}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(spike_detect({1.0}, 1.0), std::invalid_argument);
}
