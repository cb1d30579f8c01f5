#pragma once

#include "skoloc/path.hpp"
#include "skoloc/warp.hpp"

#include <cstdint>
#include <vector>

namespace skoloc {

/// Solver for the cadlag modulus
///
///   omega'_{t,K,x}(delta) = inf over subdivisions 0 = t_0 < ... < t_N <= xi
///     with t_{i+1} - t_i >= delta and (t_N, x_{t_N}) outside [0,t] x K
///     of the largest within-interval oscillation sup d(x_{s1}, x_{s2}).
///
/// The infimum over the relaxed mesh constraint (>= delta instead of the
/// strict > delta) is computed exactly: the value is always one of the
/// finitely many segment-run diameters, and feasibility of a threshold is
/// decided by interval reachability over breakpoint positions.
///
/// Construction precomputes the O(M^2) run-diameter table, so reuse one
/// solver for many (t, K, delta) queries against the same path.
class OmegaSolver {
 public:
  OmegaSolver(const StepPath& x, const StateSpace& space);

  double value(double t, const CompactSet& K, double delta) const;

  /// Also recovers a subdivision achieving the value (empty when the value
  /// is +inf).  The subdivision satisfies the relaxed mesh constraint.
  double value_with_subdivision(double t, const CompactSet& K, double delta,
                                Subdivision* out) const;

  /// Largest oscillation threshold, i.e. the full value-set diameter.
  double max_diameter() const;

  const StepPath& path() const { return x_; }

 private:
  using Intervals = std::vector<std::pair<double, double>>;

  double run_diameter(std::size_t i, std::size_t j) const {
    return diam_[i * seg_count_ + j];
  }
  // Window end reachable from a position inside segment s at threshold theta.
  double window_end(std::size_t s, double theta) const;
  bool feasible(double theta, double t, const std::vector<char>& in_k,
                double delta, double pos_cap,
                std::vector<Intervals>* trace) const;
  bool terminal_point(const Intervals& set, double t,
                      const std::vector<char>& in_k, double* q_out) const;

  StepPath x_;
  StateSpace space_;
  std::size_t seg_count_;
  std::vector<double> bounds_;      // segment boundaries, last = xi (may be inf)
  std::vector<double> diam_;        // run diameters, row-major
  std::vector<double> candidates_;  // sorted unique diameters
};

double omega_prime(const StepPath& x, double t, const CompactSet& K,
                   double delta, const StateSpace& space);

double omega_prime_with_subdivision(const StepPath& x, double t,
                                    const CompactSet& K, double delta,
                                    const StateSpace& space, Subdivision* out);

/// omega''_x(delta) = sup_{s1<=s2<=s3<=s1+delta} d(x_s1,x_s2) ^ d(x_s2,x_s3),
/// exact over segment triples, restricted to [0, xi).
double omega_double_prime(const StepPath& x, double delta,
                          const StateSpace& space);

/// omega_x(delta) = sup_{s1<=s2<=s1+delta} d(x_s1,x_s2), exact, on [0, xi).
double omega_plain(const StepPath& x, double delta, const StateSpace& space);

/// Randomized upper bound on omega' via random feasible subdivisions plus
/// local moves (snap to jump times, mesh chains, insert/delete/perturb).
/// Deterministic given the seed; used as an independent check of the solver.
double omega_prime_oracle(const StepPath& x, double t, const CompactSet& K,
                          double delta, int n_restarts, std::uint64_t seed,
                          const StateSpace& space);

}  // namespace skoloc
