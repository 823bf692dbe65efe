#include "escape_lab/landscape.hpp"

#include <cmath>
#include <stdexcept>

namespace escape_lab {

const char* to_string(MinimumKind k) {
  switch (k) {
    case MinimumKind::global: return "global";
    case MinimumKind::sharp_local: return "sharp_local";
    case MinimumKind::flat_local: return "flat_local";
  }
  return "?";
}

Landscape::Landscape(LandscapeSpec spec, std::shared_ptr<const LandscapeImpl> impl)
    : spec_(std::move(spec)), impl_(std::move(impl)), minima_(impl_->minima()) {}

namespace {

Vector scalar_vec(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

class Quadratic final : public LandscapeImpl {
 public:
  Quadratic(double a, int d) : a_(a), d_(d) {}
  double eval(const Vector& x) const override { return a_ * x.squaredNorm(); }
  Vector grad(const Vector& x) const override { return 2.0 * a_ * x; }
  int dimension() const override { return d_; }
  std::vector<Minimum> minima() const override {
    return {Minimum{Vector::Zero(d_), MinimumKind::global, 0.0, std::nullopt}};
  }

 private:
  double a_;
  int d_;
};

// 1-D landscape assembled from closed branches (first match wins) over a
// quadratic fallback.
class Piecewise1d final : public LandscapeImpl {
 public:
  Piecewise1d(std::vector<ScalarBranch> branches, double fallback_coef,
              std::vector<Minimum> minima, std::vector<double> breakpoints)
      : branches_(std::move(branches)),
        fallback_coef_(fallback_coef),
        minima_(std::move(minima)),
        breakpoints_(std::move(breakpoints)) {}

  double eval(const Vector& x) const override {
    const double t = x[0];
    for (const auto& b : branches_)
      if (t >= b.lo && t <= b.hi) return b.f(t);
    return fallback_coef_ * t * t;
  }

  Vector grad(const Vector& x) const override {
    const double t = x[0];
    for (const auto& b : branches_)
      if (t >= b.lo && t <= b.hi) return scalar_vec(b.df(t));
    return scalar_vec(2.0 * fallback_coef_ * t);
  }

  int dimension() const override { return 1; }
  std::vector<Minimum> minima() const override { return minima_; }
  std::vector<double> breakpoints() const override { return breakpoints_; }

 private:
  std::vector<ScalarBranch> branches_;
  double fallback_coef_;
  std::vector<Minimum> minima_;
  std::vector<double> breakpoints_;
};

double quintic_well(double x) {
  const double u = x - 2.5;
  return u * u * (1020.0 + u * (800.0 + u * (-2000.0 - 1600.0 * u)));
}

double quintic_well_deriv(double x) {
  const double u = x - 2.5;
  return u * (2040.0 + u * (2400.0 + u * (-8000.0 - 8000.0 * u)));
}

}  // namespace

std::vector<ScalarBranch> toy1d_branches(bool continuous) {
  const double c = continuous ? 1e5 : 1e4;
  std::vector<ScalarBranch> b;
  b.push_back({2.0, 3.0, quintic_well, quintic_well_deriv});
  b.push_back({8.4, 8.40001, [c](double x) { return 1411.2 * (1.0 - c * (x - 8.4)); },
               [c](double) { return -1411.2 * c; }});
  b.push_back({8.40001, 8.59999, [](double) { return 0.0; }, [](double) { return 0.0; }});
  b.push_back({8.59999, 8.6, [c](double x) { return 1479.2 * (c * (x - 8.6) + 1.0); },
               [c](double) { return 1479.2 * c; }});
  return b;
}

namespace {

Landscape make_toy1d(const LandscapeSpec& spec, bool continuous) {
  if (!spec.params.empty())
    throw std::invalid_argument(spec.id + " takes no parameters");
  std::vector<Minimum> minima;
  minima.push_back({scalar_vec(0.0), MinimumKind::global, 0.0, std::nullopt});
  minima.push_back({scalar_vec(2.5), MinimumKind::sharp_local, 0.0, std::nullopt});
  minima.push_back({scalar_vec(8.5), MinimumKind::flat_local, 0.0,
                    Region::interval(8.40001, 8.59999)});
  std::vector<double> breaks = {2.0, 3.0, 8.4, 8.40001, 8.59999, 8.6};
  auto impl = std::make_shared<Piecewise1d>(toy1d_branches(continuous), 20.0, std::move(minima),
                                            std::move(breaks));
  return Landscape(spec, std::move(impl));
}

Landscape make_sharp_patch(const LandscapeSpec& spec) {
  const auto& p = spec.params;
  if (p.size() != 3 && p.size() != 4)
    throw std::invalid_argument("sharp_patch takes [base, patch, radius] or "
                                "[base, patch, radius, center]");
  const double base = p[0], patch = p[1], radius = p[2];
  const double center = p.size() == 4 ? p[3] : 0.0;
  if (!(base > 0.0)) throw std::invalid_argument("sharp_patch: base coefficient must be > 0");
  if (!(patch > base))
    throw std::invalid_argument("sharp_patch: patch curvature must exceed base curvature");
  if (!(radius > 0.0)) throw std::invalid_argument("sharp_patch: radius must be > 0");

  // The inner parabola of curvature 2*patch through both edge points of the
  // base bowl; its vertex is the recorded local minimum. For center 0 this
  // reduces to patch*x^2 + (base - patch)*radius^2.
  const double vertex = center * (1.0 - base / patch);
  const double lift =
      base * (center + radius) * (center + radius) -
      patch * (center + radius - vertex) * (center + radius - vertex);

  std::vector<ScalarBranch> branches;
  branches.push_back({center - radius, center + radius,
                      [patch, vertex, lift](double x) {
                        const double u = x - vertex;
                        return patch * u * u + lift;
                      },
                      [patch, vertex](double x) { return 2.0 * patch * (x - vertex); }});

  std::vector<Minimum> minima;
  if (std::abs(center) > radius) {
    minima.push_back({scalar_vec(0.0), MinimumKind::global, 0.0, std::nullopt});
    minima.push_back({scalar_vec(vertex), MinimumKind::sharp_local, lift, std::nullopt});
  } else {
    // the patch covers the bowl's bottom; the only stationary point left
    minima.push_back({scalar_vec(vertex), MinimumKind::global, lift, std::nullopt});
  }
  auto impl = std::make_shared<Piecewise1d>(std::move(branches), base, std::move(minima),
                                            std::vector<double>{center - radius, center + radius});
  return Landscape(spec, std::move(impl));
}

}  // namespace

Landscape make_landscape(const LandscapeSpec& spec) {
  if (spec.id == "quadratic") {
    if (spec.params.size() != 1 && spec.params.size() != 2)
      throw std::invalid_argument("quadratic takes [a] or [a, d]");
    const double a = spec.params[0];
    if (!(a > 0.0)) throw std::invalid_argument("quadratic: coefficient must be > 0");
    int d = 1;
    if (spec.params.size() == 2) {
      const double dv = spec.params[1];
      d = static_cast<int>(dv);
      if (!(dv == d) || d < 1) throw std::invalid_argument("quadratic: d must be a positive integer");
    }
    return Landscape(spec, std::make_shared<Quadratic>(a, d));
  }
  if (spec.id == "toy1d") return make_toy1d(spec, false);
  if (spec.id == "toy1d_continuous") return make_toy1d(spec, true);
  if (spec.id == "sharp_patch") return make_sharp_patch(spec);
  throw std::invalid_argument("unknown landscape id: " + spec.id);
}

double eval(const Landscape& l, const Vector& x) {
  if (x.size() != l.dimension())
    throw std::invalid_argument("eval: point dimension does not match landscape");
  return l.impl().eval(x);
}

Vector grad(const Landscape& l, const Vector& x) {
  if (x.size() != l.dimension())
    throw std::invalid_argument("grad: point dimension does not match landscape");
  return l.impl().grad(x);
}

Vector finite_diff_grad(const Landscape& l, const Vector& x, double h) {
  if (x.size() != l.dimension())
    throw std::invalid_argument("finite_diff_grad: point dimension does not match landscape");
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = l.impl().eval(probe);
    probe[i] = x[i] - h;
    const double fm = l.impl().eval(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double second_difference(const Landscape& l, double x, double h) {
  if (l.dimension() != 1) throw std::invalid_argument("second_difference: 1-D landscapes only");
  if (!(h > 0.0)) throw std::invalid_argument("second_difference: h must be > 0");
  const double fp = l.impl().eval(scalar_vec(x + h));
  const double f0 = l.impl().eval(scalar_vec(x));
  const double fm = l.impl().eval(scalar_vec(x - h));
  return (fp - 2.0 * f0 + fm) / (h * h);
}

SmoothnessEstimate estimate_smoothness(const Landscape& l, const Region& region, int n_pairs,
                                       std::uint64_t seed) {
  if (region.dimension() != l.dimension())
    throw std::invalid_argument("estimate_smoothness: region dimension mismatch");
  if (n_pairs < 1) throw std::invalid_argument("estimate_smoothness: n_pairs must be >= 1");
  if (!(measure(region) > 0.0))
    throw std::invalid_argument("estimate_smoothness: region has zero measure");
  Rng rng(seed);
  double best = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    const Vector x = sample_uniform(region, rng);
    const Vector y = sample_uniform(region, rng);
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double ratio = (l.impl().grad(x) - l.impl().grad(y)).norm() / dist;
    if (ratio > best) best = ratio;
  }
  return SmoothnessEstimate{best, n_pairs, seed};
}

double estimate_opsc(const Landscape& l, const Region& region, const Vector& target,
                     int n_samples, std::uint64_t seed) {
  if (region.dimension() != l.dimension())
    throw std::invalid_argument("estimate_opsc: region dimension mismatch");
  if (target.size() != l.dimension())
    throw std::invalid_argument("estimate_opsc: target dimension mismatch");
  if (n_samples < 1) throw std::invalid_argument("estimate_opsc: n_samples must be >= 1");
  if (!(measure(region) > 0.0))
    throw std::invalid_argument("estimate_opsc: region has zero measure");
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const Vector x = sample_uniform(region, rng);
    const Vector d = x - target;
    const double n2 = d.squaredNorm();
    if (n2 == 0.0) continue;
    const double ratio = l.impl().grad(x).dot(d) / n2;
    if (ratio < worst) worst = ratio;
  }
  if (!std::isfinite(worst))
    throw std::runtime_error("estimate_opsc: no usable samples (all hit the target)");
  return worst;
}

nlohmann::json landscape_spec_to_json(const LandscapeSpec& spec) {
  return nlohmann::json{{"id", spec.id}, {"params", spec.params}};
}

LandscapeSpec landscape_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id"))
    throw std::invalid_argument("landscape JSON must be an object with an \"id\" key");
  LandscapeSpec spec;
  spec.id = j.at("id").get<std::string>();
  if (j.contains("params")) spec.params = j.at("params").get<std::vector<double>>();
  return spec;
}

}  // namespace escape_lab
