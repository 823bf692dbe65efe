#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "escape_lab/regions.hpp"

namespace escape_lab {

enum class MinimumKind { global, sharp_local, flat_local };
const char* to_string(MinimumKind k);

struct Minimum {
  Vector location;
  MinimumKind label = MinimumKind::global;
  double value = 0.0;
  // Set when the minimum is a whole flat basin rather than a point;
  // location then holds a representative interior point.
  std::optional<Region> plateau;
};

struct LandscapeSpec {
  std::string id;
  std::vector<double> params;
};

// Internal polymorphic core; users hold Landscape values.
class LandscapeImpl {
 public:
  virtual ~LandscapeImpl() = default;
  virtual double eval(const Vector& x) const = 0;
  virtual Vector grad(const Vector& x) const = 0;
  virtual int dimension() const = 0;
  virtual std::vector<Minimum> minima() const = 0;
  // 1-D piece boundaries (kinks / branch edges); empty for smooth landscapes.
  virtual std::vector<double> breakpoints() const { return {}; }
};

class Landscape {
 public:
  Landscape(LandscapeSpec spec, std::shared_ptr<const LandscapeImpl> impl);
  const LandscapeSpec& spec() const { return spec_; }
  int dimension() const { return impl_->dimension(); }
  const std::vector<Minimum>& minima() const { return minima_; }
  std::vector<double> breakpoints() const { return impl_->breakpoints(); }
  const LandscapeImpl& impl() const { return *impl_; }

 private:
  LandscapeSpec spec_;
  std::shared_ptr<const LandscapeImpl> impl_;
  std::vector<Minimum> minima_;
};

// Known ids:
//   quadratic           params [a] or [a, d]: f(x) = a * |x|^2 on R^d
//   toy1d               piecewise 1-D with a sharp well, a flat shelf and
//                       steep shelf walls (printed constants; discontinuous)
//   toy1d_continuous    same with wall slope 1e5, which restores continuity
//   sharp_patch         params [base, patch, radius] or [base, patch, radius,
//                       center]: base*x^2 with a sharper parabola grafted
//                       over |x - center| <= radius, offset fixed so the two
//                       pieces meet at both edges
Landscape make_landscape(const LandscapeSpec& spec);

double eval(const Landscape& l, const Vector& x);
Vector grad(const Landscape& l, const Vector& x);

// Central differences, one coordinate at a time.
Vector finite_diff_grad(const Landscape& l, const Vector& x, double h);

// (f(x+h) - 2 f(x) + f(x-h)) / h^2 for 1-D landscapes.
double second_difference(const Landscape& l, double x, double h);

// One closed branch of a piecewise 1-D definition; first match wins,
// the quadratic bowl is the fallback for unmatched x.
struct ScalarBranch {
  double lo;
  double hi;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

// The special branches of toy1d (listed in match order); fallback 20 x^2.
std::vector<ScalarBranch> toy1d_branches(bool continuous);

struct SmoothnessEstimate {
  double l_hat = 0.0;
  int n_pairs = 0;
  std::uint64_t seed = 0;
};

// Max of ||grad(x) - grad(y)|| / ||x - y|| over seeded uniform pairs.
// Nondecreasing in n_pairs for a fixed seed (pairs are drawn as a prefix
// of one stream).
SmoothnessEstimate estimate_smoothness(const Landscape& l, const Region& region, int n_pairs,
                                       std::uint64_t seed);

// Min of <grad(x), x - target> / ||x - target||^2 over seeded uniform
// samples; may be negative. Samples landing exactly on target are skipped.
double estimate_opsc(const Landscape& l, const Region& region, const Vector& target,
                     int n_samples, std::uint64_t seed);

nlohmann::json landscape_spec_to_json(const LandscapeSpec& spec);
LandscapeSpec landscape_spec_from_json(const nlohmann::json& j);

}  // namespace escape_lab
