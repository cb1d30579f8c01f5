#pragma once

#include "skoloc/geometry.hpp"

#include <vector>

namespace skoloc {

/// Piecewise-linear increasing bijection of R_+ with lambda(0) = 0, extended
/// affinely with slope 1 after the last breakpoint.  Slopes are finite and
/// positive, so both lambda and its inverse are locally Lipschitz.
class TimeWarp {
 public:
  TimeWarp() = default;  // identity

  /// Breakpoints (u_j, w_j), strictly increasing in both coordinates; (0,0)
  /// is implicit and must not be passed.
  static TimeWarp through(std::vector<double> u, std::vector<double> w);

  static TimeWarp identity() { return TimeWarp(); }

  double operator()(double s) const;
  double inverse(double s) const;

  const std::vector<double>& knots_in() const { return u_; }
  const std::vector<double>& knots_out() const { return w_; }

  bool is_identity() const { return u_.empty(); }

 private:
  std::vector<double> u_, w_;
};

/// ||lambda - id||_t = sup_{0<=s<=t} |lambda_s - s|, exact (attained at
/// breakpoints or at t).
double warp_deviation(const TimeWarp& warp, double t);

/// esssup_{0<=s<=t} |log(d lambda / ds)|: the max of |log slope| over the
/// segments meeting [0, t] with positive length.
double warp_log_slope(const TimeWarp& warp, double t);

/// Ordered subdivision times 0 = t_0 < ... < t_N; mesh and termination are
/// checked by the consuming operation.
struct Subdivision {
  std::vector<double> times;
};

}  // namespace skoloc
