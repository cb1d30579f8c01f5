#include "skoloc/warp.hpp"

#include <algorithm>
#include <cmath>

namespace skoloc {

TimeWarp TimeWarp::through(std::vector<double> u, std::vector<double> w) {
  check_internal(u.size() == w.size(), "TimeWarp: knot size mismatch");
  double pu = 0.0, pw = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    check_internal(std::isfinite(u[i]) && std::isfinite(w[i]),
                   "TimeWarp: non-finite knot");
    check_internal(u[i] > pu && w[i] > pw,
                   "TimeWarp: knots must increase strictly");
    pu = u[i];
    pw = w[i];
  }
  TimeWarp t;
  t.u_ = std::move(u);
  t.w_ = std::move(w);
  return t;
}

double TimeWarp::operator()(double s) const {
  if (u_.empty()) return s;
  auto it = std::upper_bound(u_.begin(), u_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - u_.begin());
  double u0 = (i == 0) ? 0.0 : u_[i - 1];
  double w0 = (i == 0) ? 0.0 : w_[i - 1];
  if (i == u_.size()) return w0 + (s - u0);  // slope 1 past the last knot
  double slope = (w_[i] - w0) / (u_[i] - u0);
  return w0 + slope * (s - u0);
}

double TimeWarp::inverse(double s) const {
  if (u_.empty()) return s;
  auto it = std::upper_bound(w_.begin(), w_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - w_.begin());
  double u0 = (i == 0) ? 0.0 : u_[i - 1];
  double w0 = (i == 0) ? 0.0 : w_[i - 1];
  if (i == w_.size()) return u0 + (s - w0);
  double slope = (u_[i] - u0) / (w_[i] - w0);
  return u0 + slope * (s - w0);
}

double warp_deviation(const TimeWarp& warp, double t) {
  check_internal(t >= 0.0, "warp_deviation: t must be >= 0");
  double best = 0.0;
  for (std::size_t i = 0;
       i < warp.knots_in().size() && warp.knots_in()[i] <= t; ++i)
    best = std::max(best,
                    std::abs(warp.knots_out()[i] - warp.knots_in()[i]));
  best = std::max(best, std::abs(warp(t) - t));
  return best;
}

double warp_log_slope(const TimeWarp& warp, double t) {
  check_internal(t >= 0.0, "warp_log_slope: t must be >= 0");
  if (t == 0.0) return 0.0;
  const auto& u = warp.knots_in();
  const auto& w = warp.knots_out();
  double best = 0.0;
  double pu = 0.0, pw = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (pu >= t) return best;
    best = std::max(best, std::abs(std::log((w[i] - pw) / (u[i] - pu))));
    pu = u[i];
    pw = w[i];
  }
  // trailing slope-1 segment contributes |log 1| = 0
  return best;
}

}  // namespace skoloc
