#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace skoloc {

using Vec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Error in user-supplied data (files, configs, malformed inputs). CLI exit 2.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant (a bug sentinel). CLI exit 3.
struct invariant_error : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw io_error(msg);
}

inline void check_internal(bool cond, const std::string& msg) {
  if (!cond) throw invariant_error(msg);
}

enum class MetricKind {
  euclidean_truncated,  // d(a,b) = min(|a-b|, 1)
  chordal,              // pullback of the sphere chord metric, Delta = north pole
};

/// A point of the one-point compactification S^Delta: either coordinates in
/// S = R^d or the cemetery Delta.
class Point {
 public:
  static Point delta() { return Point(); }
  static Point at(Vec v) { return Point(std::move(v)); }

  bool is_delta() const { return !coords_.has_value(); }
  const Vec& coords() const {
    check_internal(coords_.has_value(), "Point::coords on Delta");
    return *coords_;
  }

  bool operator==(const Point& o) const {
    if (is_delta() || o.is_delta()) return is_delta() == o.is_delta();
    return coords_->size() == o.coords_->size() && *coords_ == *o.coords_;
  }

 private:
  Point() = default;
  explicit Point(Vec v) : coords_(std::move(v)) {}
  std::optional<Vec> coords_;
};

/// Chordal metric on R^d u {Delta} via inverse stereographic projection onto
/// the unit sphere; sphere diameter 2.
inline double chordal_dist(const Vec& a, const Vec& b) {
  return 2.0 * (a - b).norm() /
         std::sqrt((1.0 + a.squaredNorm()) * (1.0 + b.squaredNorm()));
}

inline double chordal_dist_delta(const Vec& a) {
  return 2.0 / std::sqrt(1.0 + a.squaredNorm());
}

/// Euclidean radius of the chordal ball B(Delta, r)^c, i.e. the set
/// {a : chordal_dist_delta(a) >= r} is the closed Euclidean ball of this
/// radius.  Requires 0 < r <= 2.
inline double chordal_delta_ball_euclid_radius(double r) {
  check_internal(r > 0.0 && r <= 2.0, "chordal radius out of (0,2]");
  return std::sqrt(std::max(0.0, 4.0 / (r * r) - 1.0));
}

/// State space S = R^d with a pluggable metric d, plus the induced metric on
/// S^Delta.  For the chordal kind the compactified metric is the chordal
/// metric itself; for the truncated-Euclidean kind it is the standard
/// one-point-compactification metric min(d(a,b), h(a)+h(b)) with
/// h(a) = 1/sqrt(1+|a|^2), which is 1-Lipschitz for d.
struct StateSpace {
  int dim = 1;
  MetricKind metric_kind = MetricKind::euclidean_truncated;

  StateSpace() = default;
  StateSpace(int d, MetricKind k) : dim(d), metric_kind(k) {
    require(d >= 1, "StateSpace: dim must be >= 1");
  }

  double dist(const Vec& a, const Vec& b) const {
    switch (metric_kind) {
      case MetricKind::euclidean_truncated:
        return std::min((a - b).norm(), 1.0);
      case MetricKind::chordal:
        return chordal_dist(a, b);
    }
    return 0.0;
  }

  double dist_delta(const Vec& a) const {
    switch (metric_kind) {
      case MetricKind::euclidean_truncated:
        return 1.0 / std::sqrt(1.0 + a.squaredNorm());
      case MetricKind::chordal:
        return chordal_dist_delta(a);
    }
    return 0.0;
  }

  /// Metric on S^Delta.
  double dist_compactified(const Point& a, const Point& b) const {
    if (a.is_delta() && b.is_delta()) return 0.0;
    if (a.is_delta()) return dist_delta(b.coords());
    if (b.is_delta()) return dist_delta(a.coords());
    switch (metric_kind) {
      case MetricKind::euclidean_truncated:
        return std::min(dist(a.coords(), b.coords()),
                        dist_delta(a.coords()) + dist_delta(b.coords()));
      case MetricKind::chordal:
        return chordal_dist(a.coords(), b.coords());
    }
    return 0.0;
  }

  Vec origin() const { return Vec::Zero(dim); }
};

/// Closed compact subset of S: a Euclidean ball or a box, with membership
/// predicates and the exact distance to the complement S \ K.
class CompactSet {
 public:
  static CompactSet ball(Vec center, double radius) {
    require(radius >= 0.0, "CompactSet: radius must be >= 0");
    CompactSet k;
    k.is_ball_ = true;
    k.center_ = std::move(center);
    k.radius_ = radius;
    return k;
  }

  static CompactSet box(Vec lo, Vec hi) {
    require(lo.size() == hi.size(), "CompactSet: box corner dims differ");
    for (int i = 0; i < lo.size(); ++i)
      require(lo[i] <= hi[i], "CompactSet: box lo > hi");
    CompactSet k;
    k.is_ball_ = false;
    k.lo_ = std::move(lo);
    k.hi_ = std::move(hi);
    return k;
  }

  bool is_ball() const { return is_ball_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  bool contains(const Vec& a) const {
    if (is_ball_) return (a - center_).norm() <= radius_;
    for (int i = 0; i < a.size(); ++i)
      if (a[i] < lo_[i] || a[i] > hi_[i]) return false;
    return true;
  }

  bool contains(const Point& p) const {
    return !p.is_delta() && contains(p.coords());
  }

  bool contains_interior(const Vec& a) const {
    if (is_ball_) return (a - center_).norm() < radius_;
    for (int i = 0; i < a.size(); ++i)
      if (a[i] <= lo_[i] || a[i] >= hi_[i]) return false;
    return true;
  }

  /// d(a, K^c) in the space's metric: 0 iff a is not interior, 1-Lipschitz.
  double dist_to_complement(const Vec& a, const StateSpace& space) const;

  /// Euclidean distance from a to the boundary, positive inside.
  double euclid_inradius(const Vec& a) const {
    if (is_ball_) return radius_ - (a - center_).norm();
    double m = kInf;
    for (int i = 0; i < a.size(); ++i)
      m = std::min({m, a[i] - lo_[i], hi_[i] - a[i]});
    return m;
  }

  std::string describe() const;

 private:
  bool is_ball_ = true;
  Vec center_;
  double radius_ = 0.0;
  Vec lo_, hi_;
};

/// Canonical exhaustion K_n of S: closed Euclidean balls centered at the
/// origin with radius base * growth^n.
struct Exhaustion {
  double base = 1.0;
  double growth = 2.0;

  Exhaustion() = default;
  Exhaustion(double b, double g) : base(b), growth(g) {
    require(b > 0.0 && g > 1.0, "Exhaustion: need base > 0 and growth > 1");
  }

  CompactSet at(int n, const StateSpace& space) const {
    return CompactSet::ball(space.origin(), base * std::pow(growth, n));
  }
};

}  // namespace skoloc
