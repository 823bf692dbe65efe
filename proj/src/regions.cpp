#include "escape_lab/regions.hpp"

#include <cmath>
#include <stdexcept>

namespace escape_lab {

namespace {

void check_dim(const Region& r, const Vector& p, const char* what) {
  if (r.dimension() != p.size())
    throw std::invalid_argument(std::string(what) + ": point dimension " +
                                std::to_string(p.size()) + " does not match region dimension " +
                                std::to_string(r.dimension()));
}

}  // namespace

Region Region::box(Vector lo, Vector hi) {
  if (lo.size() == 0 || lo.size() != hi.size())
    throw std::invalid_argument("box: lo and hi must be nonempty and equally sized");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i]))
      throw std::invalid_argument("box: lo[" + std::to_string(i) + "] > hi[" + std::to_string(i) +
                                  "]");
  }
  return Region(Box{std::move(lo), std::move(hi)});
}

Region Region::ball(Vector center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball: empty center");
  if (!(radius >= 0.0)) throw std::invalid_argument("ball: radius must be >= 0");
  return Region(Ball{std::move(center), radius});
}

Region Region::interval(double lo, double hi) {
  Vector l(1), h(1);
  l[0] = lo;
  h[0] = hi;
  return box(std::move(l), std::move(h));
}

int Region::dimension() const {
  if (is_box()) return static_cast<int>(as_box().lo.size());
  return static_cast<int>(as_ball().center.size());
}

double measure(const Region& r) {
  if (r.is_box()) {
    const Box& b = r.as_box();
    double m = 1.0;
    for (Eigen::Index i = 0; i < b.lo.size(); ++i) m *= b.hi[i] - b.lo[i];
    return m;
  }
  const Ball& b = r.as_ball();
  const double d = static_cast<double>(b.center.size());
  constexpr double pi = 3.141592653589793238462643383279502884;
  const double unit = std::pow(pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return unit * std::pow(b.radius, d);
}

double diameter(const Region& r) {
  if (r.is_box()) {
    const Box& b = r.as_box();
    return (b.hi - b.lo).norm();
  }
  return 2.0 * r.as_ball().radius;
}

double inf_distance(const Region& r, const Vector& p) {
  check_dim(r, p, "inf_distance");
  if (r.is_box()) {
    const Box& b = r.as_box();
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double e = std::max({b.lo[i] - p[i], 0.0, p[i] - b.hi[i]});
      s += e * e;
    }
    return std::sqrt(s);
  }
  const Ball& b = r.as_ball();
  return std::max(0.0, (p - b.center).norm() - b.radius);
}

double sup_distance(const Region& r, const Vector& p) {
  check_dim(r, p, "sup_distance");
  if (r.is_box()) {
    const Box& b = r.as_box();
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double e = std::max(std::abs(p[i] - b.lo[i]), std::abs(p[i] - b.hi[i]));
      s += e * e;
    }
    return std::sqrt(s);
  }
  const Ball& b = r.as_ball();
  return (p - b.center).norm() + b.radius;
}

bool contains(const Region& r, const Vector& p) {
  check_dim(r, p, "contains");
  if (r.is_box()) {
    const Box& b = r.as_box();
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p[i] < b.lo[i] || p[i] > b.hi[i]) return false;
    return true;
  }
  const Ball& b = r.as_ball();
  return (p - b.center).norm() <= b.radius;
}

Vector sample_uniform(const Region& r, Rng& rng) {
  if (r.is_box()) {
    const Box& b = r.as_box();
    Vector x(b.lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(b.lo[i], b.hi[i]);
    return x;
  }
  const Ball& b = r.as_ball();
  if (b.radius == 0.0) return b.center;
  Vector x(b.center.size());
  while (true) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = rng.uniform(b.center[i] - b.radius, b.center[i] + b.radius);
    if ((x - b.center).norm() <= b.radius) return x;
  }
}

bool Ring::contains(const Vector& p) const {
  if (p.size() != center.size()) return false;
  if ((p - center).norm() > radius) return false;
  return !escape_lab::contains(excluded, p);
}

std::optional<Ring> ring(const Region& m, const Vector& x_dagger, double gamma, double l_global) {
  check_dim(m, x_dagger, "ring");
  const double s = gamma * l_global;
  const double rad2 = s * s - 3.0;
  if (rad2 < 0.0) return std::nullopt;
  return Ring{x_dagger, diameter(m) * std::sqrt(rad2), m};
}

nlohmann::json region_to_json(const Region& r) {
  nlohmann::json j;
  if (r.is_box()) {
    j["shape"] = "box";
    auto bounds = nlohmann::json::array();
    const Box& b = r.as_box();
    for (Eigen::Index i = 0; i < b.lo.size(); ++i)
      bounds.push_back({b.lo[i], b.hi[i]});
    j["bounds"] = bounds;
  } else {
    const Ball& b = r.as_ball();
    j["shape"] = "ball";
    j["center"] = std::vector<double>(b.center.data(), b.center.data() + b.center.size());
    j["radius"] = b.radius;
  }
  return j;
}

Region region_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("shape"))
    throw std::invalid_argument("region JSON must be an object with a \"shape\" key");
  const std::string shape = j.at("shape").get<std::string>();
  if (shape == "box") {
    const auto& bounds = j.at("bounds");
    if (!bounds.is_array() || bounds.empty())
      throw std::invalid_argument("box region needs a nonempty \"bounds\" array");
    Vector lo(bounds.size()), hi(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const auto& pair = bounds.at(i);
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("box bounds entries must be [lo, hi] pairs");
      lo[static_cast<Eigen::Index>(i)] = pair.at(0).get<double>();
      hi[static_cast<Eigen::Index>(i)] = pair.at(1).get<double>();
    }
    return Region::box(std::move(lo), std::move(hi));
  }
  if (shape == "ball") {
    const auto center = j.at("center").get<std::vector<double>>();
    if (center.empty()) throw std::invalid_argument("ball region needs a nonempty center");
    Vector c(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) c[static_cast<Eigen::Index>(i)] = center[i];
    return Region::ball(std::move(c), j.at("radius").get<double>());
  }
  throw std::invalid_argument("unknown region shape: " + shape);
}

}  // namespace escape_lab
