#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "refplan/sbmp/geometry.hpp"

namespace refplan::sbmp {

struct ValidateParams {
  double resolution = 0.25;  // max spacing between checked configurations
  int batch_width = 8;
};

// Straight-line motion validation. The segment is sampled at uniform spacing
// <= resolution (endpoints included) and the samples are checked in fixed
// batches with a branch-free inner loop; early exit happens only between
// batches, so the verdict is independent of batch_width.
inline bool validate_motion(const Workspace& world, const Config& a, const Config& b,
                            const ValidateParams& params = {}) {
  const double dist = distance(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(dist / params.resolution)));
  const int samples = n + 1;
  const int width = std::max(1, params.batch_width);

  constexpr int kMaxWidth = 64;
  double coords[3][kMaxWidth];
  const int w = std::min(width, kMaxWidth);
  const int dim = a.dim;

  for (int base = 0; base < samples; base += w) {
    const int lanes = std::min(w, samples - base);
    for (int d = 0; d < dim; ++d) {
      const double lo = a[d];
      const double delta = b[d] - a[d];
      for (int l = 0; l < lanes; ++l)
        coords[d][l] = lo + delta * (static_cast<double>(base + l) / n);
    }

    std::uint64_t invalid = 0;

    // Bounds (inclusive).
    for (int d = 0; d < dim; ++d) {
      const double lo = world.bounds.lo[d];
      const double hi = world.bounds.hi[d];
      for (int l = 0; l < lanes; ++l) {
        const bool out = coords[d][l] < lo || coords[d][l] > hi;
        invalid |= static_cast<std::uint64_t>(out) << l;
      }
    }

    for (const auto& box : world.boxes) {
      std::uint64_t inside = ~0ull;
      for (int d = 0; d < dim; ++d) {
        const double lo = box.lo[d];
        const double hi = box.hi[d];
        std::uint64_t in_d = 0;
        for (int l = 0; l < lanes; ++l) {
          const bool in = coords[d][l] >= lo && coords[d][l] <= hi;
          in_d |= static_cast<std::uint64_t>(in) << l;
        }
        inside &= in_d;
      }
      invalid |= inside;
    }

    for (const auto& sph : world.spheres) {
      const double r2 = sph.radius * sph.radius;
      for (int l = 0; l < lanes; ++l) {
        double d2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double diff = coords[d][l] - sph.center[d];
          d2 += diff * diff;
        }
        invalid |= static_cast<std::uint64_t>(d2 <= r2) << l;
      }
    }

    const std::uint64_t lane_mask = (lanes == 64) ? ~0ull : ((1ull << lanes) - 1);
    if (invalid & lane_mask) return false;
  }
  return true;
}

// Exact segment-versus-obstacle test: slab intersection for boxes, closest
// point for spheres, endpoint containment for the (convex) bounds. A motion
// that passes is clear at every interpolated point, so a path built from such
// motions re-validates at any sampling resolution. Obstacles are inflated by
// `margin` so roundoff near a graze cannot flip the verdict.
inline bool motion_clear_exact(const Workspace& world, const Config& a, const Config& b,
                               double margin = 1e-9) {
  const int dim = a.dim;
  for (int d = 0; d < dim; ++d) {
    if (a[d] < world.bounds.lo[d] || a[d] > world.bounds.hi[d]) return false;
    if (b[d] < world.bounds.lo[d] || b[d] > world.bounds.hi[d]) return false;
  }

  for (const auto& box : world.boxes) {
    double t0 = 0.0, t1 = 1.0;
    bool miss = false;
    for (int d = 0; d < dim && !miss; ++d) {
      const double lo = box.lo[d] - margin;
      const double hi = box.hi[d] + margin;
      const double s = a[d];
      const double e = b[d] - a[d];
      if (e == 0.0) {
        miss = s < lo || s > hi;
        continue;
      }
      double ta = (lo - s) / e;
      double tb = (hi - s) / e;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      miss = t0 > t1;
    }
    if (!miss) return false;
  }

  for (const auto& sph : world.spheres) {
    double ab2 = 0.0;
    double proj = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double e = b[d] - a[d];
      ab2 += e * e;
      proj += (sph.center[d] - a[d]) * e;
    }
    const double t = ab2 > 0.0 ? std::clamp(proj / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = a[d] + t * (b[d] - a[d]) - sph.center[d];
      d2 += diff * diff;
    }
    const double rr = sph.radius + margin;
    if (d2 <= rr * rr) return false;
  }
  return true;
}

}  // namespace refplan::sbmp
