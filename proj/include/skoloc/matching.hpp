#pragma once

#include "skoloc/modulus.hpp"
#include "skoloc/path.hpp"
#include "skoloc/warp.hpp"

#include <optional>

namespace skoloc {

/// Feasibility witness for a computed distance: a time warp, the cut times
/// t1 (on x) and t2 = lambda(t1) (on y), and the certified level.
struct MatchCertificate {
  TimeWarp warp;
  double cut_x = 0.0;
  double cut_y = 0.0;
  double epsilon = 0.0;
};

/// Computes the localized Skorokhod pseudo-metrics between two step paths by
/// binary search on the level eps, deciding feasibility with a dynamic
/// program over monotone alignments of the segment grids.  Candidate warps
/// are piecewise linear with breakpoints at matched jump times; for step
/// paths this class attains the infimum over all admissible warps, so the
/// result is exact up to the binary-search tolerance (1e-10 absolute).
///
/// A matcher instance caches the value-distance table; reuse it for many
/// (t, K) windows against the same pair.
class PathMatcher {
 public:
  /// compactified: interpret both paths as elements of D(S^Delta): the
  /// explosion tail becomes an ordinary Delta-valued segment, distances use
  /// the compactified metric and K is the whole (compact) space.
  PathMatcher(const StepPath& x, const StepPath& y, const StateSpace& space,
              bool compactified = false);

  /// rho~_{t,K} (slope_constrained = false) or rho_{t,K} (true).  K must be
  /// non-null unless compactified.
  double distance(double t, const CompactSet* K, bool slope_constrained,
                  MatchCertificate* cert = nullptr) const;

 private:
  struct Query;
  struct Grid;
  struct CutInfo;
  bool feasible(Query& q, Grid* grid, CutInfo* cut) const;
  void extract_certificate(const Query& q, const Grid& grid,
                           const CutInfo& cut, MatchCertificate* cert) const;

  StateSpace space_;
  bool compactified_;
  std::size_t mx_, my_;
  std::vector<double> bx_, by_;  // segment boundaries, size m+1
  std::vector<Point> vx_, vy_;
  double xix_, xiy_;             // +inf in compactified mode
  std::vector<double> dd_;       // value distances, mx x my row-major
};

double rho_tilde(const StepPath& x, const StepPath& y, double t,
                 const CompactSet& K, const StateSpace& space);

double rho(const StepPath& x, const StepPath& y, double t, const CompactSet& K,
           const StateSpace& space);

double rho_with_warp(const StepPath& x, const StepPath& y, double t,
                     const CompactSet& K, const StateSpace& space,
                     MatchCertificate* cert);

/// Global pseudo-metric on D(S^Delta) over the window [0, t]: both paths are
/// compactified and the space-localization penalty disappears.
double rho_global(const StepPath& x, const StepPath& y, double t,
                  const StateSpace& space, bool slope_constrained = true);

/// Partial sum of sum_n 2^{-n} (rho_{n,K_n} ^ 1) with its tail enclosure.
struct IntervalEstimate {
  double lower = 0.0;
  double upper = 0.0;
};

IntervalEstimate local_metric(const StepPath& x, const StepPath& y,
                              const Exhaustion& exhaustion, int n_terms,
                              const StateSpace& space);

/// Same combined form for the global topology on D(S^Delta).
IntervalEstimate global_metric(const StepPath& x, const StepPath& y,
                               int n_terms, const StateSpace& space);

}  // namespace skoloc
