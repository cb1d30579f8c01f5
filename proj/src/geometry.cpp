#include "skoloc/geometry.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace skoloc {
namespace {

// Golden-section minimization of f on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, int iters = 80) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

// min over |b - c| = r of |a - b|^2 / (1 + |b|^2).  The minimizer lies in a
// plane containing a - c and c (rotational symmetry about that plane), so the
// search reduces to one angle.
double sphere_min_ratio(const Vec& a, const Vec& c, double r) {
  const int d = static_cast<int>(a.size());
  auto ratio = [&](const Vec& b) {
    return (a - b).squaredNorm() / (1.0 + b.squaredNorm());
  };
  if (d == 1) {
    Vec b1 = c, b2 = c;
    b1[0] -= r;
    b2[0] += r;
    return std::min(ratio(b1), ratio(b2));
  }
  Vec e1 = a - c;
  if (e1.norm() < 1e-300) e1 = Vec::Unit(d, 0);
  e1.normalize();
  Vec e2 = c - c.dot(e1) * e1;
  if (e2.norm() < 1e-12) {
    // a - c and c collinear; any orthogonal direction completes the plane.
    int k = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(e1[i]) < std::abs(e1[k])) k = i;
    e2 = Vec::Unit(d, k) - e1[k] * e1;
  }
  e2.normalize();
  auto f = [&](double th) {
    Vec b = c + r * (std::cos(th) * e1 + std::sin(th) * e2);
    return ratio(b);
  };
  const int n_scan = 128;
  double best = kInf;
  std::vector<double> vals(n_scan);
  for (int i = 0; i < n_scan; ++i)
    vals[i] = f(2.0 * M_PI * i / n_scan);
  for (int i = 0; i < n_scan; ++i) {
    double prev = vals[(i + n_scan - 1) % n_scan];
    double next = vals[(i + 1) % n_scan];
    if (vals[i] <= prev && vals[i] <= next) {
      double lo = 2.0 * M_PI * (i - 1) / n_scan;
      double hi = 2.0 * M_PI * (i + 1) / n_scan;
      best = std::min(best, golden_min(f, lo, hi));
    }
  }
  return best;
}

}  // namespace

double CompactSet::dist_to_complement(const Vec& a,
                                      const StateSpace& space) const {
  if (!contains_interior(a)) return 0.0;
  switch (space.metric_kind) {
    case MetricKind::euclidean_truncated:
      return std::min(euclid_inradius(a), 1.0);
    case MetricKind::chordal: {
      // The closure of K^c in S^Delta is the boundary of K together with
      // Delta, so the infimum is the smaller of the two distances.
      double to_delta = space.dist_delta(a);
      if (is_ball_) {
        double m = sphere_min_ratio(a, center_, radius_);
        double chord = 2.0 * std::sqrt(m / (1.0 + a.squaredNorm()));
        return std::min(chord, to_delta);
      }
      if (a.size() == 1) {
        Vec b1 = lo_, b2 = hi_;
        return std::min({space.dist(a, b1), space.dist(a, b2), to_delta});
      }
      throw io_error("chordal distance-to-complement for boxes is only "
                     "implemented in dimension 1; use a ball");
    }
  }
  return 0.0;
}

std::string CompactSet::describe() const {
  std::ostringstream os;
  if (is_ball_) {
    os << "ball(r=" << radius_ << ")";
  } else {
    os << "box";
  }
  return os.str();
}

}  // namespace skoloc
