#pragma once

#include <Eigen/Core>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "escape_lab/rng.hpp"

namespace escape_lab {

using Vector = Eigen::VectorXd;

struct Box {
  Vector lo;
  Vector hi;  // lo[i] <= hi[i]; equal endpoints give a measure-zero slab
};

struct Ball {
  Vector center;
  double radius = 0.0;  // >= 0
};

// Axis-aligned box or Euclidean ball. Immutable value type.
class Region {
 public:
  static Region box(Vector lo, Vector hi);
  static Region ball(Vector center, double radius);
  // 1-D interval convenience
  static Region interval(double lo, double hi);

  bool is_box() const { return std::holds_alternative<Box>(shape_); }
  bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
  const Box& as_box() const { return std::get<Box>(shape_); }
  const Ball& as_ball() const { return std::get<Ball>(shape_); }
  int dimension() const;

 private:
  explicit Region(std::variant<Box, Ball> shape) : shape_(std::move(shape)) {}
  std::variant<Box, Ball> shape_;
};

// Lebesgue measure (box: product of widths; ball: closed-form d-volume).
double measure(const Region& r);

// Euclidean diameter.
double diameter(const Region& r);

// inf / sup of ||p - q|| over q in the region (closed-form, no sampling).
double inf_distance(const Region& r, const Vector& p);
double sup_distance(const Region& r, const Vector& p);

// Closed membership: boundary points are inside.
bool contains(const Region& r, const Vector& p);

// Uniform draw; balls sample by rejection from the bounding box.
Vector sample_uniform(const Region& r, Rng& rng);

// Ball around x_dagger of radius diam(m) * sqrt((gamma*l_global)^2 - 3),
// minus m itself.
struct Ring {
  Vector center;
  double radius = 0.0;
  Region excluded;
  bool contains(const Vector& p) const;
};

// Empty optional when (gamma*l_global)^2 < 3 (the radius would be imaginary).
std::optional<Ring> ring(const Region& m, const Vector& x_dagger, double gamma,
                         double l_global);

nlohmann::json region_to_json(const Region& r);
Region region_from_json(const nlohmann::json& j);

}  // namespace escape_lab
