#include "skoloc/matching.hpp"

#include <algorithm>
#include <cmath>

namespace skoloc {
namespace {

constexpr double kBisectTol = 1e-10;

enum Src : std::uint8_t {
  SRC_NONE = 0,
  SRC_INIT,
  SRC_T1X,  // x-jump entry, parent Ex(i-1, j)
  SRC_T1Y,  // x-jump entry, parent Ey(i-1, j)
  SRC_T2X,  // y-jump entry, parent Ex(i, j-1)
  SRC_T2Y,  // y-jump entry, parent Ey(i, j-1)
  SRC_T3X,  // aligned jumps, parent Ex(i-1, j-1)
  SRC_T3Y,  // aligned jumps, parent Ey(i-1, j-1)
};

struct Iv {
  double lo, hi;
  std::uint8_t src;
};

struct IvSet {
  std::vector<Iv> v;
  bool empty() const { return v.empty(); }
  void clear() { v.clear(); }
  void add(double lo, double hi, std::uint8_t src) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) return;
    v.push_back({lo, hi, src});
  }
  void normalize() {
    if (v.size() < 2) return;
    std::sort(v.begin(), v.end(), [](const Iv& a, const Iv& b) {
      if (a.src != b.src) return a.src < b.src;
      return a.lo < b.lo;
    });
    std::vector<Iv> out;
    for (auto& iv : v) {
      if (!out.empty() && out.back().src == iv.src &&
          iv.lo <= out.back().hi) {
        out.back().hi = std::max(out.back().hi, iv.hi);
      } else {
        out.push_back(iv);
      }
    }
    v = std::move(out);
    check_internal(v.size() < 8192, "PathMatcher: interval set blow-up");
  }
};

struct State {
  IvSet ex;  // entries (bx[i], q), q in the stored intervals
  IvSet ey;  // entries (p, by[j]), p in the stored intervals
  bool empty() const { return ex.empty() && ey.empty(); }
  void clear() {
    ex.clear();
    ey.clear();
  }
};

// Feasibility of: t1 in [a1,b1], t2 in [a2,b2], |t2 - t1| <= eps and
// t2 - q0 within the slope band for some entry (p0, q0) with p0 in [pl,ph],
// q0 in [ql,qh].  All bounds are affine in t1, the feasible region is an
// interval, so testing endpoints, kinks and pairwise crossings is exact.
bool solve_cut_box(double a1, double b1, double a2, double b2, double ql,
                   double qh, double pl, double ph, double sl, double su,
                   double eps, double* out_t1, double* out_t2) {
  if (!(a1 <= b1) || !(a2 <= b2)) return false;
  auto lower = [&](double t1) {
    double band = ql + sl * std::max(0.0, t1 - ph);
    return std::max({a2, t1 - eps, band});
  };
  auto upper = [&](double t1) {
    double band;
    if (std::isinf(su))
      band = (t1 > pl) ? kInf : qh;
    else
      band = qh + su * std::max(0.0, t1 - pl);
    return std::min({b2, t1 + eps, band});
  };
  std::vector<double> cand = {a1, b1, pl, ph, (a1 + b1) / 2};
  // crossings of the affine pieces of lower and upper
  struct Aff {
    double c, m;
  };
  std::vector<Aff> lows = {{a2, 0.0}, {-eps, 1.0}, {ql - sl * ph, sl}};
  std::vector<Aff> ups = {{b2, 0.0}, {eps, 1.0}};
  if (!std::isinf(su)) ups.push_back({qh - su * pl, su});
  for (auto& L : lows)
    for (auto& U : ups) {
      if (L.m == U.m) continue;
      cand.push_back((U.c - L.c) / (L.m - U.m));
    }
  for (double t1 : cand) {
    if (std::isnan(t1)) continue;
    t1 = std::min(b1, std::max(a1, t1));
    double lo = lower(t1), hi = upper(t1);
    if (lo <= hi + 1e-12) {
      if (out_t1) *out_t1 = t1;
      if (out_t2) *out_t2 = std::min(std::max(t1, lo), hi);
      return true;
    }
  }
  return false;
}

}  // namespace

struct PathMatcher::Query {
  double eps = 0.0;
  double t = 0.0;
  bool slope = false;
  double sl = 0.0, su = kInf;
  std::vector<double> dkx, dky;  // +inf in compactified mode
  double capx = 0.0, capy = 0.0;
};

struct PathMatcher::Grid {
  std::size_t cols = 0;
  std::vector<State> cells;
  State& at(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
  const State& at(std::size_t i, std::size_t j) const {
    return cells[i * cols + j];
  }
};

struct PathMatcher::CutInfo {
  std::size_t i = 0, j = 0;
  bool from_ex = true;
  double t1 = 0.0, t2 = 0.0;
  double entry_free = 0.0;  // q0 for Ex, p0 for Ey
};

PathMatcher::PathMatcher(const StepPath& x, const StepPath& y,
                         const StateSpace& space, bool compactified)
    : space_(space), compactified_(compactified) {
  auto build = [&](const StepPath& p, std::vector<double>& bounds,
                   std::vector<Point>& vals, double& xi_eff) {
    bounds = p.times;
    for (const auto& v : p.values) vals.push_back(Point::at(v));
    if (compactified) {
      if (std::isfinite(p.xi)) {
        bounds.push_back(p.xi);
        vals.push_back(Point::delta());
      }
      bounds.push_back(kInf);
      xi_eff = kInf;
    } else {
      bounds.push_back(p.xi);
      xi_eff = p.xi;
    }
  };
  build(x, bx_, vx_, xix_);
  build(y, by_, vy_, xiy_);
  mx_ = vx_.size();
  my_ = vy_.size();
  dd_.resize(mx_ * my_);
  for (std::size_t i = 0; i < mx_; ++i)
    for (std::size_t j = 0; j < my_; ++j)
      dd_[i * my_ + j] =
          compactified_
              ? space_.dist_compactified(vx_[i], vy_[j])
              : space_.dist(vx_[i].coords(), vy_[j].coords());
}

bool PathMatcher::feasible(Query& q, Grid* grid, CutInfo* cut) const {
  const double eps = q.eps;
  q.sl = q.slope ? std::exp(-eps) : 0.0;
  q.su = q.slope ? std::exp(eps) : kInf;
  const double sl = q.sl, su = q.su;

  Grid local_grid;
  Grid* g = grid;
  std::vector<State> row_cur, row_next;
  if (g) {
    g->cols = my_;
    g->cells.assign(mx_ * my_, State());
    g->at(0, 0).ex.add(0.0, 0.0, SRC_INIT);
  } else {
    row_cur.assign(my_, State());
    row_next.assign(my_, State());
    row_cur[0].ex.add(0.0, 0.0, SRC_INIT);
  }

  // cut feasibility for one entry component
  auto try_cut = [&](std::size_t i, std::size_t j, bool from_ex, double pl,
                     double ph, double ql, double qh) -> bool {
    const double t = q.t;
    const bool gate = dd_[i * my_ + j] <= eps;
    // (a) cut exactly at an entry point
    {
      bool okx, oky;
      double p0 = pl, q0 = ql;
      if (from_ex) {
        okx = q.dkx[i] <= eps || pl >= t - eps ||
              (std::isfinite(xix_) && pl == xix_);
        double lo = (q.dky[j] <= eps) ? ql : std::max(ql, t - eps);
        oky = lo <= qh;
        q0 = lo;
        if (!oky && std::isfinite(xiy_) && ql <= xiy_ && xiy_ <= qh) {
          oky = true;
          q0 = xiy_;
        }
      } else {
        oky = q.dky[j] <= eps || ql >= t - eps ||
              (std::isfinite(xiy_) && ql == xiy_);
        double lo = (q.dkx[i] <= eps) ? pl : std::max(pl, t - eps);
        okx = lo <= ph;
        p0 = lo;
        if (!okx && std::isfinite(xix_) && pl <= xix_ && xix_ <= ph) {
          okx = true;
          p0 = xix_;
        }
      }
      if (okx && oky) {
        if (cut) {
          cut->i = i;
          cut->j = j;
          cut->from_ex = from_ex;
          cut->t1 = p0;
          cut->t2 = q0;
          cut->entry_free = from_ex ? q0 : p0;
        }
        return true;
      }
    }
    if (!gate) return false;
    // (b) cut after a positive dwell in the cell
    const double e1 = std::min(bx_[i + 1], q.capx);
    const double e2 = std::min(by_[j + 1], q.capy);
    struct Opt {
      double lo, hi;
      bool is_point;
    };
    std::vector<Opt> xopts, yopts;
    {
      double xlo = (q.dkx[i] <= eps) ? pl : std::max(pl, q.t - eps);
      if (xlo <= e1) xopts.push_back({xlo, e1, false});
      if (std::isfinite(xix_) && i == mx_ - 1 && bx_[i + 1] == xix_ &&
          xix_ >= pl)
        xopts.push_back({xix_, xix_, true});
      double ylo = (q.dky[j] <= eps) ? ql : std::max(ql, q.t - eps);
      if (ylo <= e2) yopts.push_back({ylo, e2, false});
      if (std::isfinite(xiy_) && j == my_ - 1 && by_[j + 1] == xiy_ &&
          xiy_ >= ql)
        yopts.push_back({xiy_, xiy_, true});
    }
    for (auto& xo : xopts)
      for (auto& yo : yopts) {
        double t1, t2;
        if (solve_cut_box(xo.lo, xo.hi, yo.lo, yo.hi, ql, qh, pl, ph, sl, su,
                          eps, &t1, &t2)) {
          if (cut) {
            cut->i = i;
            cut->j = j;
            cut->from_ex = from_ex;
            cut->t1 = t1;
            cut->t2 = t2;
            // pick an entry coordinate compatible with (t1, t2)
            if (from_ex) {
              double blo = ql, bhi = qh;
              if (t1 > pl) {
                bhi = std::min(bhi, t2 - sl * (t1 - pl));
                if (!std::isinf(su)) blo = std::max(blo, t2 - su * (t1 - pl));
              } else {
                blo = bhi = t2;  // zero dwell: entry equals the cut
              }
              cut->entry_free =
                  std::min(std::max(t2 - (t1 - pl), blo), std::max(blo, bhi));
            } else {
              double blo = pl, bhi = ph;
              double dy = t2 - ql;
              if (dy > 0.0) {
                if (sl > 0.0) blo = std::max(blo, t1 - dy / sl);
                bhi = std::min(bhi, std::isinf(su) ? t1 : t1 - dy / su);
              } else {
                bhi = std::min(bhi, t1);
              }
              cut->entry_free =
                  std::min(std::max(t1 - dy, blo), std::max(blo, bhi));
            }
          }
          return true;
        }
      }
    return false;
  };

  bool row_alive = true;
  for (std::size_t i = 0; i < mx_ && row_alive; ++i) {
    row_alive = false;
    for (std::size_t j = 0; j < my_; ++j) {
      State& st = g ? g->at(i, j) : row_cur[j];
      st.ex.normalize();
      st.ey.normalize();
      if (st.empty()) continue;
      row_alive = true;
      for (auto& iv : st.ex.v)
        if (try_cut(i, j, true, bx_[i], bx_[i], iv.lo, iv.hi)) return true;
      for (auto& iv : st.ey.v)
        if (try_cut(i, j, false, iv.lo, iv.hi, by_[j], by_[j])) return true;
      if (dd_[i * my_ + j] > eps) continue;

      State* right = (j + 1 < my_) ? (g ? &g->at(i, j + 1) : &row_cur[j + 1])
                                   : nullptr;
      State* down =
          (i + 1 < mx_) ? (g ? &g->at(i + 1, j) : &row_next[j]) : nullptr;
      State* diag = (i + 1 < mx_ && j + 1 < my_)
                        ? (g ? &g->at(i + 1, j + 1) : &row_next[j + 1])
                        : nullptr;
      const double jx = (i + 1 < mx_) ? bx_[i + 1] : kInf;  // next x jump
      const double jy = (j + 1 < my_) ? by_[j + 1] : kInf;  // next y jump

      for (auto& iv : st.ex.v) {
        if (down) {
          const double da = jx - bx_[i];
          double lo = iv.lo + sl * da;
          double hi = std::isinf(su) ? kInf : iv.hi + su * da;
          down->ex.add(std::max({lo, by_[j], jx - eps}),
                       std::min({hi, jy, jx + eps}), SRC_T1X);
          if (diag && std::abs(jy - jx) <= eps && jy >= lo && jy <= hi)
            diag->ex.add(jy, jy, SRC_T3X);
        }
        if (right) {
          double num_lo = jy - iv.hi;  // >= 0
          double num_hi = jy - iv.lo;
          double lo = bx_[i] + (std::isinf(su) ? 0.0 : num_lo / su);
          double hi = (sl > 0.0) ? bx_[i] + num_hi / sl
                                 : (num_hi > 0.0 ? kInf : bx_[i]);
          right->ey.add(std::max({lo, bx_[i], jy - eps}),
                        std::min({hi, jx, jy + eps}), SRC_T2X);
        }
      }
      for (auto& iv : st.ey.v) {
        if (down) {
          double glo = jx - iv.hi;  // gap to the x jump, >= 0
          double ghi = jx - iv.lo;
          double lo = by_[j] + sl * glo;
          double hi = std::isinf(su) ? (ghi > 0.0 ? kInf : by_[j])
                                     : by_[j] + su * ghi;
          down->ex.add(std::max({lo, by_[j], jx - eps}),
                       std::min({hi, jy, jx + eps}), SRC_T1Y);
          if (diag && std::abs(jy - jx) <= eps) {
            double db = jy - by_[j];
            double plo = (sl > 0.0) ? jx - db / sl : -kInf;
            double phi = std::isinf(su) ? jx : jx - db / su;
            if (std::max(plo, iv.lo) <= std::min(phi, iv.hi))
              diag->ex.add(jy, jy, SRC_T3Y);
          }
        }
        if (right) {
          const double db = jy - by_[j];
          double lo = iv.lo + (std::isinf(su) ? 0.0 : db / su);
          double hi = (sl > 0.0) ? iv.hi + db / sl : kInf;
          right->ey.add(std::max({lo, bx_[i], jy - eps}),
                        std::min({hi, jx, jy + eps}), SRC_T2Y);
        }
      }
    }
    // transitions reach row i+1 only from row i, so a fully empty row ends
    // the sweep
    if (!g) {
      row_cur.swap(row_next);
      for (auto& s : row_next) s.clear();
    }
  }
  return false;
}

void PathMatcher::extract_certificate(const Query& q, const Grid& grid,
                                      const CutInfo& cut,
                                      MatchCertificate* cert) const {
  const double sl = q.sl, su = q.su;
  std::vector<std::pair<double, double>> pts;  // collected backwards
  if (cut.t1 > 0.0 || cut.t2 > 0.0) pts.emplace_back(cut.t1, cut.t2);

  std::size_t i = cut.i, j = cut.j;
  bool from_ex = cut.from_ex;
  double val = cut.entry_free;
  auto pick = [](double pref, double lo, double hi) {
    if (lo > hi) std::swap(lo, hi);  // fp guard
    return std::min(std::max(pref, lo), hi);
  };
  for (int guard = 0; guard < 1 << 22; ++guard) {
    const State& st = grid.at(i, j);
    const IvSet& set = from_ex ? st.ex : st.ey;
    const Iv* owner = nullptr;
    double slack = 1e-9;
    for (auto& iv : set.v)
      if (iv.lo - slack <= val && val <= iv.hi + slack) {
        owner = &iv;
        if (iv.lo <= val && val <= iv.hi) break;
      }
    check_internal(owner != nullptr, "certificate: lost the owning interval");
    pts.emplace_back(from_ex ? bx_[i] : val, from_ex ? val : by_[j]);
    if (owner->src == SRC_INIT) break;
    switch (owner->src) {
      case SRC_T1X: {
        double da = bx_[i] - bx_[i - 1];
        double lo = std::isinf(su) ? -kInf : val - su * da;
        double hi = val - sl * da;
        val = pick(val - da, lo, hi);
        i -= 1;
        from_ex = true;
        break;
      }
      case SRC_T1Y: {
        double dq = val - by_[j];
        double lo = (sl > 0.0) ? bx_[i] - dq / sl : -kInf;
        double hi = std::isinf(su) ? bx_[i] : bx_[i] - dq / su;
        if (dq <= 0.0) {
          lo = -kInf;
          hi = bx_[i];
        }
        val = pick(bx_[i] - dq, lo, hi);
        i -= 1;
        from_ex = false;
        break;
      }
      case SRC_T2X: {
        double dp = val - bx_[i];
        double lo = std::isinf(su) ? -kInf : by_[j] - su * dp;
        double hi = by_[j] - sl * dp;
        if (dp <= 0.0) {
          lo = -kInf;
          hi = by_[j];
        }
        val = pick(by_[j] - dp, lo, hi);
        j -= 1;
        from_ex = true;
        break;
      }
      case SRC_T2Y: {
        double db = by_[j] - by_[j - 1];
        double lo = val - ((sl > 0.0) ? db / sl : kInf);
        double hi = val - (std::isinf(su) ? 0.0 : db / su);
        val = pick(val - db, lo, hi);
        j -= 1;
        from_ex = false;
        break;
      }
      case SRC_T3X: {
        double da = bx_[i] - bx_[i - 1];
        double lo = std::isinf(su) ? -kInf : by_[j] - su * da;
        double hi = by_[j] - sl * da;
        val = pick(by_[j] - da, lo, hi);
        i -= 1;
        j -= 1;
        from_ex = true;
        break;
      }
      case SRC_T3Y: {
        double db = by_[j] - by_[j - 1];
        double lo = (sl > 0.0) ? bx_[i] - db / sl : -kInf;
        double hi = std::isinf(su) ? bx_[i] : bx_[i] - db / su;
        val = pick(bx_[i] - db, lo, hi);
        i -= 1;
        j -= 1;
        from_ex = false;
        break;
      }
      default:
        throw invariant_error("certificate: unknown interval source");
    }
    // clamp into the parent cell's coordinate range
    if (from_ex)
      val = std::min(std::max(val, by_[j]), std::min(by_[j + 1], 1e300));
    else
      val = std::min(std::max(val, bx_[i]), std::min(bx_[i + 1], 1e300));
  }
  std::reverse(pts.begin(), pts.end());
  std::vector<double> ku, kw;
  double pu = 0.0, pw = 0.0;
  for (auto& [u, w] : pts) {
    if (u > pu && w > pw) {
      ku.push_back(u);
      kw.push_back(w);
      pu = u;
      pw = w;
    }
  }
  cert->warp = TimeWarp::through(std::move(ku), std::move(kw));
  cert->cut_x = cut.t1;
  cert->cut_y = cut.t2;
  cert->epsilon = q.eps;
}

double PathMatcher::distance(double t, const CompactSet* K,
                             bool slope_constrained,
                             MatchCertificate* cert) const {
  check_internal(t >= 0.0, "distance: t must be >= 0");
  check_internal(compactified_ || K != nullptr,
                 "distance: K required for the localized metric");
  Query q;
  q.t = t;
  q.slope = slope_constrained;
  q.dkx.assign(mx_, kInf);
  q.dky.assign(my_, kInf);
  if (!compactified_) {
    for (std::size_t i = 0; i < mx_; ++i)
      q.dkx[i] = K->dist_to_complement(vx_[i].coords(), space_);
    for (std::size_t j = 0; j < my_; ++j)
      q.dky[j] = K->dist_to_complement(vy_[j].coords(), space_);
  }
  auto caps = [&](double eps) {
    q.capx = std::min(xix_, t + eps + 2.0);
    q.capy = std::min(xiy_, t + eps + 2.0);
    q.eps = eps;
  };
  double hi = std::max(std::min(q.dkx[0], t), std::min(q.dky[0], t));
  caps(0.0);
  if (feasible(q, nullptr, nullptr)) {
    hi = 0.0;
  } else {
    hi = hi * (1.0 + 1e-12) + 1e-15;
    caps(hi);
    for (int bump = 0; !feasible(q, nullptr, nullptr); ++bump) {
      check_internal(bump < 8, "distance: upper bound is not feasible");
      hi = hi * (1.0 + 1e-9) + 1e-12;
      caps(hi);
    }
    double lo = 0.0;
    while (hi - lo > kBisectTol) {
      double mid = 0.5 * (lo + hi);
      caps(mid);
      if (feasible(q, nullptr, nullptr))
        hi = mid;
      else
        lo = mid;
    }
  }
  if (cert) {
    Grid grid;
    CutInfo cut;
    caps(hi);
    bool ok = feasible(q, &grid, &cut);
    for (int bump = 0; !ok && bump < 8; ++bump) {
      hi = hi * (1.0 + 1e-9) + 1e-12;
      caps(hi);
      ok = feasible(q, &grid, &cut);
    }
    check_internal(ok, "distance: certificate pass lost feasibility");
    extract_certificate(q, grid, cut, cert);
  }
  return hi;
}

double rho_tilde(const StepPath& x, const StepPath& y, double t,
                 const CompactSet& K, const StateSpace& space) {
  return PathMatcher(x, y, space).distance(t, &K, false);
}

double rho(const StepPath& x, const StepPath& y, double t, const CompactSet& K,
           const StateSpace& space) {
  return PathMatcher(x, y, space).distance(t, &K, true);
}

double rho_with_warp(const StepPath& x, const StepPath& y, double t,
                     const CompactSet& K, const StateSpace& space,
                     MatchCertificate* cert) {
  return PathMatcher(x, y, space).distance(t, &K, true, cert);
}

double rho_global(const StepPath& x, const StepPath& y, double t,
                  const StateSpace& space, bool slope_constrained) {
  return PathMatcher(x, y, space, true).distance(t, nullptr,
                                                 slope_constrained);
}

IntervalEstimate local_metric(const StepPath& x, const StepPath& y,
                              const Exhaustion& exhaustion, int n_terms,
                              const StateSpace& space) {
  check_internal(n_terms >= 1, "local_metric: n_terms >= 1");
  PathMatcher matcher(x, y, space);
  double sum = 0.0;
  for (int n = 0; n < n_terms; ++n) {
    CompactSet k = exhaustion.at(n, space);
    double term = matcher.distance(static_cast<double>(n), &k, true);
    sum += std::ldexp(std::min(term, 1.0), -n);
  }
  return {sum, sum + std::ldexp(1.0, -(n_terms - 1))};
}

IntervalEstimate global_metric(const StepPath& x, const StepPath& y,
                               int n_terms, const StateSpace& space) {
  check_internal(n_terms >= 1, "global_metric: n_terms >= 1");
  PathMatcher matcher(x, y, space, true);
  double sum = 0.0;
  for (int n = 0; n < n_terms; ++n) {
    double term =
        matcher.distance(static_cast<double>(n), nullptr, true);
    sum += std::ldexp(std::min(term, 1.0), -n);
  }
  return {sum, sum + std::ldexp(1.0, -(n_terms - 1))};
}

}  // namespace skoloc
