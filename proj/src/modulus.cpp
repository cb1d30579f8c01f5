#include "skoloc/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace skoloc {
namespace {

using Intervals = std::vector<std::pair<double, double>>;

void merge_into(Intervals& base, Intervals add) {
  for (auto& iv : add) base.push_back(iv);
  std::sort(base.begin(), base.end());
  Intervals out;
  for (auto& iv : base) {
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  base = std::move(out);
}

bool set_contains(const Intervals& set, double q) {
  for (auto& iv : set)
    if (iv.first <= q && q <= iv.second) return true;
  return false;
}

}  // namespace

OmegaSolver::OmegaSolver(const StepPath& x, const StateSpace& space)
    : x_(x), space_(space), seg_count_(x.times.size()) {
  bounds_ = x.times;
  bounds_.push_back(x.xi);
  const std::size_t m = seg_count_;
  diam_.assign(m * m, 0.0);
  // E[i] = max_{i<=k<=j} d(V_k, V_j) built per column j, then
  // diam(i..j) = max(diam(i..j-1), E[i]).
  std::vector<double> tail_max(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double run = 0.0;
    for (std::size_t i = j + 1; i-- > 0;) {
      run = std::max(run, space_.dist(x_.values[i], x_.values[j]));
      tail_max[i] = run;
    }
    for (std::size_t i = 0; i <= j; ++i) {
      double left = (j > i) ? diam_[i * m + (j - 1)] : 0.0;
      diam_[i * m + j] = std::max(left, tail_max[i]);
    }
  }
  candidates_ = diam_;
  std::sort(candidates_.begin(), candidates_.end());
  candidates_.erase(std::unique(candidates_.begin(), candidates_.end()),
                    candidates_.end());
}

double OmegaSolver::max_diameter() const {
  return candidates_.empty() ? 0.0 : candidates_.back();
}

double OmegaSolver::window_end(std::size_t s, double theta) const {
  // largest j >= s with diam(s..j) <= theta; the row is nondecreasing in j
  std::size_t lo = s, hi = seg_count_ - 1;
  if (run_diameter(s, hi) <= theta) return bounds_[hi + 1];
  while (lo < hi) {
    std::size_t mid = (lo + hi + 1) / 2;
    if (run_diameter(s, mid) <= theta)
      lo = mid;
    else
      hi = mid - 1;
  }
  return bounds_[lo + 1];
}

bool OmegaSolver::terminal_point(const Intervals& set, double t,
                                 const std::vector<char>& in_k,
                                 double* q_out) const {
  double best = kInf;
  for (auto& [l, r] : set) {
    if (r > t) best = std::min(best, std::max(l, std::min(r, (std::max(l, t) + r) / 2)));
    if (std::isfinite(x_.xi) && l <= x_.xi && x_.xi <= r)
      best = std::min(best, x_.xi);
    for (std::size_t s = 0; s < seg_count_; ++s) {
      if (in_k[s]) continue;
      double q = std::max(l, bounds_[s]);
      if (q <= r && q < bounds_[s + 1]) best = std::min(best, q);
    }
  }
  if (best == kInf) return false;
  if (q_out) *q_out = best;
  return true;
}

bool OmegaSolver::feasible(double theta, double t,
                           const std::vector<char>& in_k, double delta,
                           double pos_cap,
                           std::vector<Intervals>* trace) const {
  Intervals reach = {{0.0, 0.0}};
  if (trace) {
    trace->clear();
    trace->push_back(reach);
  }
  if (terminal_point(reach, t, in_k, nullptr)) return true;
  const std::size_t max_iter =
      static_cast<std::size_t>(std::min(4.0e6, pos_cap / delta + 4.0)) +
      seg_count_ + 16;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    Intervals fresh;
    for (auto& [l, r] : reach) {
      auto it = std::upper_bound(bounds_.begin(), bounds_.end(), l);
      std::size_t s = static_cast<std::size_t>(it - bounds_.begin());
      s = (s == 0) ? 0 : s - 1;
      for (; s < seg_count_ && bounds_[s] <= r; ++s) {
        double lo = std::max(l, bounds_[s]);
        double hi = std::min(r, bounds_[s + 1]);
        if (hi < lo) continue;
        double w = std::min(window_end(s, theta), pos_cap);
        if (w >= lo + delta) fresh.emplace_back(lo + delta, w);
      }
    }
    Intervals next = reach;
    merge_into(next, std::move(fresh));
    if (next == reach) return false;
    reach = std::move(next);
    if (trace) trace->push_back(reach);
    if (terminal_point(reach, t, in_k, nullptr)) return true;
  }
  throw invariant_error("OmegaSolver: reachability iteration cap exceeded");
}

double OmegaSolver::value_with_subdivision(double t, const CompactSet& K,
                                           double delta,
                                           Subdivision* out) const {
  check_internal(t >= 0.0 && delta > 0.0, "omega_prime: need t>=0, delta>0");
  std::vector<char> in_k(seg_count_);
  for (std::size_t s = 0; s < seg_count_; ++s)
    in_k[s] = K.contains(x_.values[s]) ? 1 : 0;
  const double pos_cap = std::min(x_.xi, t + delta + 1.0);

  if (out) out->times.clear();
  // N = 0: the single point 0 already terminates when x_0 is outside K.
  if (!in_k[0]) {
    if (out) out->times = {0.0};
    return 0.0;
  }
  if (!feasible(candidates_.back(), t, in_k, delta, pos_cap, nullptr))
    return kInf;
  std::size_t lo = 0, hi = candidates_.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(candidates_[mid], t, in_k, delta, pos_cap, nullptr))
      hi = mid;
    else
      lo = mid + 1;
  }
  const double theta = candidates_[lo];
  if (!out) return theta;

  std::vector<Intervals> gens;
  bool ok = feasible(theta, t, in_k, delta, pos_cap, &gens);
  check_internal(ok, "omega_prime: feasibility lost during reconstruction");
  std::size_t g_term = 0;
  double q = 0.0;
  for (; g_term < gens.size(); ++g_term)
    if (terminal_point(gens[g_term], t, in_k, &q)) break;
  check_internal(g_term < gens.size(), "omega_prime: no terminal generation");

  std::vector<double> rev = {q};
  std::size_t g = g_term;
  while (q > 0.0) {
    check_internal(g > 0, "omega_prime: backtrack hit generation 0");
    // earliest generation already containing q
    while (g > 1 && set_contains(gens[g - 1], q)) --g;
    const Intervals& prev = gens[g - 1];
    bool found = false;
    for (std::size_t k = prev.size(); k-- > 0 && !found;) {
      double cand = std::min(prev[k].second, q - delta);
      if (cand < prev[k].first) continue;
      auto it = std::upper_bound(bounds_.begin(), bounds_.end(), cand);
      std::size_t s = static_cast<std::size_t>(it - bounds_.begin()) - 1;
      s = std::min(s, seg_count_ - 1);
      if (std::min(window_end(s, theta), pos_cap) >= q) {
        rev.push_back(cand);
        q = cand;
        found = true;
      }
    }
    check_internal(found, "omega_prime: backtrack found no parent");
  }
  std::reverse(rev.begin(), rev.end());
  out->times = std::move(rev);
  return theta;
}

double OmegaSolver::value(double t, const CompactSet& K, double delta) const {
  return value_with_subdivision(t, K, delta, nullptr);
}

double omega_prime(const StepPath& x, double t, const CompactSet& K,
                   double delta, const StateSpace& space) {
  return OmegaSolver(x, space).value(t, K, delta);
}

double omega_prime_with_subdivision(const StepPath& x, double t,
                                    const CompactSet& K, double delta,
                                    const StateSpace& space,
                                    Subdivision* out) {
  return OmegaSolver(x, space).value_with_subdivision(t, K, delta, out);
}

double omega_double_prime(const StepPath& x, double delta,
                          const StateSpace& space) {
  check_internal(delta > 0.0, "omega_double_prime: delta > 0");
  const std::size_t m = x.times.size();
  std::vector<double> bounds = x.times;
  bounds.push_back(x.xi);
  double best = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i; k < m && bounds[k] < bounds[i + 1] + delta; ++k) {
      for (std::size_t j = i; j <= k; ++j) {
        double v = std::min(space.dist(x.values[i], x.values[j]),
                            space.dist(x.values[j], x.values[k]));
        best = std::max(best, v);
      }
    }
  }
  return best;
}

double omega_plain(const StepPath& x, double delta, const StateSpace& space) {
  check_internal(delta > 0.0, "omega_plain: delta > 0");
  const std::size_t m = x.times.size();
  std::vector<double> bounds = x.times;
  bounds.push_back(x.xi);
  double best = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i; k < m && bounds[k] < bounds[i + 1] + delta; ++k)
      best = std::max(best, space.dist(x.values[i], x.values[k]));
  return best;
}

namespace {

struct OracleHelper {
  const StepPath& x;
  const StateSpace& space;
  const CompactSet& K;
  double t;
  std::vector<double> bounds;
  std::vector<char> in_k;

  OracleHelper(const StepPath& px, const StateSpace& sp, const CompactSet& k,
               double pt)
      : x(px), space(sp), K(k), t(pt) {
    bounds = x.times;
    bounds.push_back(x.xi);
    in_k.resize(x.times.size());
    for (std::size_t s = 0; s < x.times.size(); ++s)
      in_k[s] = K.contains(x.values[s]) ? 1 : 0;
  }

  std::size_t seg_left(double q) const {
    auto it = std::lower_bound(bounds.begin(), bounds.end(), q);
    return static_cast<std::size_t>(it - bounds.begin()) - 1;
  }

  bool terminal(double q) const {
    if (q > t) return true;
    if (q == x.xi) return true;
    if (q >= x.xi) return false;
    return !in_k[x.segment_index(q)];
  }

  double oscillation(double p, double q) const {
    auto it = std::upper_bound(bounds.begin(), bounds.end(), p);
    std::size_t s0 = static_cast<std::size_t>(it - bounds.begin()) - 1;
    std::size_t s1 = seg_left(q);
    double best = 0.0;
    for (std::size_t i = s0; i <= s1; ++i)
      for (std::size_t j = i + 1; j <= s1; ++j)
        best = std::max(best, space.dist(x.values[i], x.values[j]));
    return best;
  }

  double evaluate(const std::vector<double>& ts) const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      worst = std::max(worst, oscillation(ts[i], ts[i + 1]));
    return worst;
  }

  bool valid(const std::vector<double>& ts, double delta) const {
    if (ts.empty() || ts[0] != 0.0) return false;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      if (ts[i + 1] - ts[i] < delta) return false;
    if (ts.back() > x.xi) return false;
    return terminal(ts.back());
  }
};

}  // namespace

double omega_prime_oracle(const StepPath& x, double t, const CompactSet& K,
                          double delta, int n_restarts, std::uint64_t seed,
                          const StateSpace& space) {
  check_internal(n_restarts >= 1, "omega_prime_oracle: n_restarts >= 1");
  OracleHelper h(x, space, K, t);
  if (h.terminal(0.0)) return 0.0;

  std::vector<double> anchors = x.times;
  if (std::isfinite(x.xi)) anchors.push_back(x.xi);
  anchors.push_back(t + 0.5 * delta);
  anchors.push_back(t + delta);
  for (std::size_t s = 0; s < x.times.size(); ++s)
    if (!h.in_k[s]) anchors.push_back(x.times[s]);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  double best = kInf;
  auto consider = [&](std::vector<double> ts) {
    if (!h.valid(ts, delta)) return;
    best = std::min(best, h.evaluate(ts));
  };

  // Systematic pass: subdivisions drawn from anchor subsets, with terminal
  // repair by appending the first reachable terminal anchor.
  std::vector<double> jump_anchors(x.times.begin() + 1, x.times.end());
  std::vector<double> terminals;
  for (double a : anchors)
    if (a <= x.xi && h.terminal(a)) terminals.push_back(a);
  const std::size_t nj = jump_anchors.size();
  if (nj <= 12) {
    for (std::size_t mask = 0; mask < (1u << nj); ++mask) {
      std::vector<double> ts = {0.0};
      for (std::size_t b = 0; b < nj; ++b)
        if (mask & (1u << b)) {
          if (jump_anchors[b] >= ts.back() + delta)
            ts.push_back(jump_anchors[b]);
        }
      if (h.terminal(ts.back()) && ts.size() > 1) consider(ts);
      for (double q : terminals) {
        if (q >= ts.back() + delta) {
          auto ext = ts;
          ext.push_back(q);
          consider(ext);
          break;
        }
      }
      // also a mesh-chain hop before the terminal
      auto ext = ts;
      double hop = ext.back() + delta;
      if (hop <= x.xi) {
        ext.push_back(hop);
        if (h.terminal(hop)) consider(ext);
        for (double q : terminals)
          if (q >= hop + delta) {
            auto e2 = ext;
            e2.push_back(q);
            consider(e2);
            break;
          }
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 0; r < n_restarts; ++r) {
    std::vector<double> ts = {0.0};
    for (int steps = 0; steps < 400; ++steps) {
      double p = ts.back();
      double q = kInf;
      double u = unif(rng);
      if (u < 0.35) {
        q = p + delta;
      } else if (u < 0.6) {
        q = p + delta * (1.0 + 3.0 * unif(rng));
      } else {
        std::vector<double> opts;
        for (double a : anchors)
          if (a >= p + delta && a <= x.xi) opts.push_back(a);
        if (!opts.empty())
          q = opts[static_cast<std::size_t>(unif(rng) * opts.size()) %
                   opts.size()];
      }
      if (!std::isfinite(q) || q > x.xi) break;
      ts.push_back(q);
      if (h.terminal(q)) break;
    }
    if (!h.valid(ts, delta)) continue;
    double cur = h.evaluate(ts);
    best = std::min(best, cur);
    // local moves: snap an interior breakpoint to an anchor or a mesh chain
    for (int mv = 0; mv < 60; ++mv) {
      auto prop = ts;
      double u = unif(rng);
      if (prop.size() > 2 && u < 0.4) {
        std::size_t i =
            1 + static_cast<std::size_t>(unif(rng) * (prop.size() - 2));
        double a = anchors[static_cast<std::size_t>(unif(rng) *
                                                    anchors.size()) %
                           anchors.size()];
        prop[i] = a;
        std::sort(prop.begin(), prop.end());
      } else if (prop.size() > 2 && u < 0.7) {
        std::size_t i =
            1 + static_cast<std::size_t>(unif(rng) * (prop.size() - 2));
        prop.erase(prop.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        double a = anchors[static_cast<std::size_t>(unif(rng) *
                                                    anchors.size()) %
                           anchors.size()];
        prop.push_back(a);
        std::sort(prop.begin(), prop.end());
        prop.erase(std::unique(prop.begin(), prop.end()), prop.end());
      }
      if (!h.valid(prop, delta)) continue;
      double pv = h.evaluate(prop);
      if (pv <= cur) {
        cur = pv;
        ts = std::move(prop);
        best = std::min(best, cur);
      }
    }
  }
  return best;
}

}  // namespace skoloc
