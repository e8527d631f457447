#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "refplan/core/rng.hpp"
#include "refplan/core/types.hpp"

namespace refplan::sbmp {

// Closed axis-aligned box: boundary points count as inside.
struct AaBox {
  Config lo;
  Config hi;

  bool contains(const Config& q) const {
    for (int i = 0; i < q.dim; ++i)
      if (q[i] < lo[i] || q[i] > hi[i]) return false;
    return true;
  }

  Config center() const {
    Config c = lo;
    for (int i = 0; i < lo.dim; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
};

struct Sphere {
  Config center;
  double radius = 0.0;

  bool contains(const Config& q) const { return distance(q, center) <= radius; }
};

// World bounds plus closed obstacles. Bounds are inclusive: clamped states
// sitting exactly on the boundary are valid.
struct Workspace {
  AaBox bounds;
  std::vector<AaBox> boxes;
  std::vector<Sphere> spheres;

  int dim() const { return bounds.lo.dim; }

  bool in_bounds(const Config& q) const { return bounds.contains(q); }

  bool is_valid(const Config& q) const {
    if (!bounds.contains(q)) return false;
    for (const auto& b : boxes)
      if (b.contains(q)) return false;
    for (const auto& s : spheres)
      if (s.contains(q)) return false;
    return true;
  }

  Config clamp(const Config& q) const {
    Config r = q;
    for (int i = 0; i < q.dim; ++i) {
      if (r[i] < bounds.lo[i]) r[i] = bounds.lo[i];
      if (r[i] > bounds.hi[i]) r[i] = bounds.hi[i];
    }
    return r;
  }

  // Rejection sampling of a collision-free configuration.
  Config sample_valid(Rng& rng, int max_rejects = 1000) const {
    for (int attempt = 0; attempt < max_rejects; ++attempt) {
      Config q;
      q.dim = dim();
      for (int i = 0; i < q.dim; ++i) q[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
      if (is_valid(q)) return q;
    }
    throw std::runtime_error("Workspace::sample_valid: rejection cap exceeded");
  }
};

inline nlohmann::json config_to_json(const Config& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < c.dim; ++i) arr.push_back(c[i]);
  return arr;
}

inline Config config_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3)
    throw std::invalid_argument("config: expected 2 or 3 coordinates");
  Config c;
  c.dim = static_cast<int>(j.size());
  for (int i = 0; i < c.dim; ++i) c[i] = j[static_cast<std::size_t>(i)].get<double>();
  return c;
}

inline nlohmann::json workspace_to_json(const Workspace& w) {
  nlohmann::json j;
  j["bounds"] = {{"lo", config_to_json(w.bounds.lo)}, {"hi", config_to_json(w.bounds.hi)}};
  j["obstacles"] = nlohmann::json::array();
  for (const auto& b : w.boxes)
    j["obstacles"].push_back(
        {{"type", "box"}, {"lo", config_to_json(b.lo)}, {"hi", config_to_json(b.hi)}});
  for (const auto& s : w.spheres)
    j["obstacles"].push_back(
        {{"type", "sphere"}, {"center", config_to_json(s.center)}, {"radius", s.radius}});
  return j;
}

inline Workspace workspace_from_json(const nlohmann::json& j) {
  Workspace w;
  w.bounds.lo = config_from_json(j.at("bounds").at("lo"));
  w.bounds.hi = config_from_json(j.at("bounds").at("hi"));
  if (j.contains("obstacles")) {
    for (const auto& o : j.at("obstacles")) {
      const std::string type = o.at("type").get<std::string>();
      if (type == "box") {
        w.boxes.push_back({config_from_json(o.at("lo")), config_from_json(o.at("hi"))});
      } else if (type == "sphere") {
        w.spheres.push_back({config_from_json(o.at("center")), o.at("radius").get<double>()});
      } else {
        throw std::invalid_argument("workspace: unknown obstacle type " + type);
      }
    }
  }
  return w;
}

}  // namespace refplan::sbmp
