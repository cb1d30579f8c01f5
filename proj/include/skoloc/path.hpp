#pragma once

#include "skoloc/geometry.hpp"

#include <vector>

namespace skoloc {

/// Finite-jump exploding cadlag path over S = R^d.  The path holds values[i]
/// on [times[i], times[i+1]) and Delta from xi onwards; xi = +inf means the
/// last value is held forever.  Invariants: times[0] = 0, times strictly
/// increasing, all times < xi, xi > 0, all values finite with matching dim.
struct StepPath {
  int dim = 1;
  std::vector<double> times;
  std::vector<Vec> values;
  double xi = kInf;

  StepPath() = default;
  StepPath(int d, std::vector<double> t, std::vector<Vec> v, double explosion);

  std::size_t segment_count() const { return times.size(); }

  /// End of segment i: times[i+1], or xi for the last segment.
  double segment_end(std::size_t i) const {
    return i + 1 < times.size() ? times[i + 1] : xi;
  }

  /// Index of the segment whose half-open interval contains t; requires
  /// 0 <= t < xi.
  std::size_t segment_index(double t) const;

  bool exploded() const { return std::isfinite(xi); }

  void validate() const;
};

/// Constant path at a, never exploding.
StepPath constant_path(Vec a, double xi = kInf);

/// Convenience for d = 1.
StepPath step_path_1d(const std::vector<double>& times,
                      const std::vector<double>& values, double xi = kInf);

/// x_t, with x_t = Delta for t >= xi.
Point eval(const StepPath& x, double t);

/// x_{t-}: the value immediately left of t (t > 0); Delta for t > xi; the
/// last held value for t = xi.
Point left_limit(const StepPath& x, double t);

/// tau^U = inf{t >= 0 | x_{t-} not in U or x_t not in U} ^ xi, where U is the
/// interior of the given compact set and x_{0-} := x_0.  Delta never lies in
/// U, so the result is at most xi.
double exit_time(const StepPath& x, const CompactSet& U);

/// Cuts the path at the first jump time whose value leaves K within the time
/// window [0, t]; the cut time becomes the new explosion time.  Canonicalizes
/// paths so that rho_tilde_{t,K} sees identical data: the distance between a
/// path and its truncation is exactly 0.
StepPath truncate_at_exit(const StepPath& x, const CompactSet& K, double t);

}  // namespace skoloc
