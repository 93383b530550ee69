#include "clipforge/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clipforge {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - phi

double clamp_finite(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

bool better(double a, double b) {  // a strictly better than b, inf-tolerant
  if (std::isinf(a) && std::isinf(b)) return false;
  return a < b;
}

}  // namespace

BracketOutcome bracket_minimum(const Objective1D& f, double x0, double step, double lo,
                               double hi) {
  if (!(step > 0)) throw std::invalid_argument("bracket_minimum: step must be positive");
  if (!(lo <= x0 && x0 <= hi))
    throw std::invalid_argument("bracket_minimum: x0 outside bounds");

  BracketOutcome out;
  auto eval = [&](double x) {
    ++out.evaluations;
    return f(x);
  };

  double a = x0;
  double fa = eval(a);
  double b = clamp_finite(x0 + step, lo, hi);
  if (b == a) b = clamp_finite(x0 - step, lo, hi);
  if (b == a) throw std::invalid_argument("bracket_minimum: degenerate bounds");
  double fb = eval(b);
  if (better(fa, fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  // Expand downhill from b until the function turns back up or a bound stops us.
  double c = b, fc = fb;
  double expand = std::abs(b - a);
  const double dir = (b >= a) ? 1.0 : -1.0;
  for (int i = 0; i < 64; ++i) {
    expand *= 2.0;
    const double next = clamp_finite(b + dir * expand, lo, hi);
    if (next == c) break;  // pinned at the bound
    c = next;
    fc = eval(c);
    if (!better(fc, fb)) {
      out.bracketed = true;
      Bracket br{a, b, c, fa, fb, fc};
      if (br.a > br.c) {
        std::swap(br.a, br.c);
        std::swap(br.fa, br.fc);
      }
      out.bracket = br;
      return out;
    }
    a = b;
    fa = fb;
    b = c;
    fb = fc;
  }
  // Monotone over the probed range: report the best boundary point.
  out.bracketed = false;
  out.boundary_x = b;
  out.boundary_f = fb;
  return out;
}

SearchReport brent_min(const Objective1D& f, const Bracket& bracket, const MinimizeOptions& opt) {
  if (!(bracket.a < bracket.b && bracket.b < bracket.c))
    throw std::invalid_argument("brent_min: invalid bracket ordering");

  SearchReport rep;
  double a = bracket.a, b = bracket.c;
  double x = bracket.b, w = x, v = x;
  double fx = bracket.fb, fw = fx, fv = fx;
  double d = 0.0, e = 0.0;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if (iter > 0 && b - a < opt.x_tol) {
      rep.converged = true;
      break;
    }
    ++rep.iterations;
    const double xm = 0.5 * (a + b);
    // Step floor independent of x_tol: the iterate sequence is then a pure
    // function of the bracket, and tightening x_tol only extends it.
    const double tol1 = 1e-10 * (std::abs(x) + 1.0);
    const double tol2 = 2.0 * tol1;

    bool use_golden = true;
    if (std::abs(e) > tol1 && std::isfinite(fx) && std::isfinite(fw) && std::isfinite(fv)) {
      // Parabola through (x,fx) (w,fw) (v,fv).
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm > x ? tol1 : -tol1);
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x >= xm ? a - x : b - x);
      d = kGolden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = f(u);
    ++rep.evaluations;

    if (better(fu, fx)) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (better(fu, fw) || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (better(fu, fv) || v == x || v == w) {
        v = u; fv = fu;
      }
    }
    if (opt.should_stop && opt.should_stop()) {
      rep.halted = true;
      break;
    }
  }
  // max_iter = 0 aside, the loop body ran at least once.
  if (rep.iterations == 0 && opt.max_iter > 0) rep.iterations = 1;
  rep.argmin = {x};
  rep.min_value = fx;
  return rep;
}

namespace {

struct LineSearchResult {
  double t = 0;
  double f = 0;
  int evaluations = 0;
  bool halted = false;
};

// Minimize g(t) = f(x + t*dir) with t clamped so the point stays in the box.
LineSearchResult line_minimize(const ObjectiveND& f, const std::vector<double>& x,
                               const std::vector<double>& dir, double f0,
                               const MinimizeOptions& opt) {
  const size_t n = x.size();
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    if (dir[i] == 0.0) continue;
    const double lo_i = opt.lower.empty() ? -1e100 : opt.lower[i];
    const double hi_i = opt.upper.empty() ? 1e100 : opt.upper[i];
    const double t1 = (lo_i - x[i]) / dir[i];
    const double t2 = (hi_i - x[i]) / dir[i];
    t_lo = std::max(t_lo, std::min(t1, t2));
    t_hi = std::min(t_hi, std::max(t1, t2));
  }
  if (!(t_lo < t_hi)) return {0.0, f0, 0, false};

  LineSearchResult res;
  std::vector<double> p(n);
  auto g = [&](double t) {
    for (size_t i = 0; i < n; ++i) p[i] = x[i] + t * dir[i];
    ++res.evaluations;
    return f(p);
  };

  BracketOutcome br = bracket_minimum(g, 0.0, opt.line_step, t_lo, t_hi);
  // bracket_minimum re-evaluated g(0); keep counting honest but reuse f0.
  if (!br.bracketed) {
    res.t = br.boundary_x;
    res.f = br.boundary_f;
    return res;
  }
  MinimizeOptions line_opt;
  line_opt.x_tol = opt.x_tol;
  line_opt.max_iter = std::max(100, opt.max_iter);  // opt.max_iter caps outer sweeps only
  line_opt.should_stop = opt.should_stop;
  SearchReport inner = brent_min(g, br.bracket, line_opt);
  res.t = inner.argmin[0];
  res.f = inner.min_value;
  res.halted = inner.halted;
  if (!better(res.f, br.bracket.fb)) {
    res.t = br.bracket.b;
    res.f = br.bracket.fb;
  }
  return res;
}

}  // namespace

SearchReport powell_min(const ObjectiveND& f, std::vector<double> x0, const MinimizeOptions& opt) {
  const size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("powell_min: empty start point");

  SearchReport rep;
  auto eval = [&](const std::vector<double>& p) {
    ++rep.evaluations;
    return f(p);
  };

  std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
  auto reset_dirs = [&] {
    for (size_t i = 0; i < n; ++i) {
      std::fill(dirs[i].begin(), dirs[i].end(), 0.0);
      dirs[i][i] = 1.0;
    }
  };
  reset_dirs();

  std::vector<double> x = std::move(x0);
  double fx = eval(x);

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    ++rep.iterations;
    const std::vector<double> x_start = x;
    const double f_start = fx;
    double biggest_drop = 0.0;
    size_t drop_index = 0;
    bool halted = false;

    for (size_t i = 0; i < n; ++i) {
      const double f_before = fx;
      LineSearchResult ls = line_minimize(f, x, dirs[i], fx, opt);
      rep.evaluations += ls.evaluations;
      if (better(ls.f, fx)) {
        for (size_t k = 0; k < n; ++k) x[k] += ls.t * dirs[i][k];
        fx = ls.f;
      }
      if (f_before - fx > biggest_drop) {
        biggest_drop = f_before - fx;
        drop_index = i;
      }
      if (ls.halted || (opt.should_stop && opt.should_stop())) {
        halted = true;
        break;
      }
    }
    if (halted) {
      rep.halted = true;
      break;
    }

    double max_move = 0.0;
    for (size_t k = 0; k < n; ++k) max_move = std::max(max_move, std::abs(x[k] - x_start[k]));
    if (max_move <= opt.x_tol) {
      rep.converged = true;
      break;
    }

    if ((iter + 1) % (n + 1) == 0) {
      reset_dirs();
      continue;
    }

    // Powell's direction update: try the net displacement of the sweep.
    std::vector<double> net(n);
    std::vector<double> extrapolated(n);
    for (size_t k = 0; k < n; ++k) {
      net[k] = x[k] - x_start[k];
      extrapolated[k] = 2.0 * x[k] - x_start[k];
    }
    bool in_box = true;
    for (size_t k = 0; k < n && in_box; ++k) {
      if (!opt.lower.empty() && extrapolated[k] < opt.lower[k]) in_box = false;
      if (!opt.upper.empty() && extrapolated[k] > opt.upper[k]) in_box = false;
    }
    if (in_box) {
      const double f_extra = eval(extrapolated);
      if (better(f_extra, f_start)) {
        const double t1 = f_start - fx - biggest_drop;
        const double t2 = f_start - f_extra;
        const double crit = 2.0 * (f_start - 2.0 * fx + f_extra) * t1 * t1 -
                            biggest_drop * t2 * t2;
        if (crit < 0.0) {
          LineSearchResult ls = line_minimize(f, x, net, fx, opt);
          rep.evaluations += ls.evaluations;
          if (better(ls.f, fx)) {
            for (size_t k = 0; k < n; ++k) x[k] += ls.t * net[k];
            fx = ls.f;
          }
          dirs[drop_index] = dirs[n - 1];
          dirs[n - 1] = net;
        }
      }
    }
  }

  rep.argmin = x;
  rep.min_value = fx;
  if (rep.iterations == 0) rep.iterations = 1;
  return rep;
}

}  // namespace clipforge
