#include "skoloc/path.hpp"

#include <algorithm>
#include <sstream>

namespace skoloc {

StepPath::StepPath(int d, std::vector<double> t, std::vector<Vec> v,
                   double explosion)
    : dim(d), times(std::move(t)), values(std::move(v)), xi(explosion) {
  validate();
}

void StepPath::validate() const {
  require(dim >= 1, "StepPath: dim must be >= 1");
  require(!times.empty(), "StepPath: needs at least one segment");
  require(times.size() == values.size(),
          "StepPath: times/values size mismatch");
  require(times[0] == 0.0, "StepPath: first jump time must be 0");
  require(xi > 0.0, "StepPath: explosion time must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::ostringstream at;
    at << "jumps[" << i << "]";
    require(std::isfinite(times[i]), at.str() + ".t: not finite");
    if (i > 0)
      require(times[i] > times[i - 1],
              at.str() + ".t: times must be strictly increasing");
    require(times[i] < xi, at.str() + ".t: jump at or after explosion");
    require(values[i].size() == dim, at.str() + ".v: wrong dimension");
    require(values[i].allFinite(), at.str() + ".v: non-finite coordinate");
  }
}

std::size_t StepPath::segment_index(double t) const {
  check_internal(t >= 0.0 && t < xi, "segment_index: t outside [0, xi)");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

StepPath constant_path(Vec a, double xi) {
  StepPath p;
  p.dim = static_cast<int>(a.size());
  p.times = {0.0};
  p.values = {std::move(a)};
  p.xi = xi;
  p.validate();
  return p;
}

StepPath step_path_1d(const std::vector<double>& times,
                      const std::vector<double>& values, double xi) {
  std::vector<Vec> vs;
  vs.reserve(values.size());
  for (double v : values) {
    Vec u(1);
    u[0] = v;
    vs.push_back(u);
  }
  return StepPath(1, times, std::move(vs), xi);
}

Point eval(const StepPath& x, double t) {
  check_internal(t >= 0.0, "eval: t must be >= 0");
  if (t >= x.xi) return Point::delta();
  return Point::at(x.values[x.segment_index(t)]);
}

Point left_limit(const StepPath& x, double t) {
  check_internal(t > 0.0, "left_limit: t must be > 0");
  if (t > x.xi) return Point::delta();
  auto it = std::lower_bound(x.times.begin(), x.times.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x.times.begin());
  return Point::at(x.values[i - 1]);
}

double exit_time(const StepPath& x, const CompactSet& U) {
  for (std::size_t i = 0; i < x.times.size(); ++i)
    if (!U.contains_interior(x.values[i])) return x.times[i];
  return x.xi;
}

StepPath truncate_at_exit(const StepPath& x, const CompactSet& K, double t) {
  std::size_t cut = x.times.size();
  for (std::size_t i = 0; i < x.times.size(); ++i) {
    if (x.times[i] > std::min(t, x.xi)) break;
    if (!K.contains(x.values[i])) {
      cut = i;
      break;
    }
  }
  if (cut == x.times.size() || cut == 0) return x;  // no cut, or outside at 0
  StepPath out;
  out.dim = x.dim;
  out.times.assign(x.times.begin(), x.times.begin() + cut);
  out.values.assign(x.values.begin(), x.values.begin() + cut);
  out.xi = x.times[cut];
  out.validate();
  return out;
}

}  // namespace skoloc
