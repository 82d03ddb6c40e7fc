#include "reflines/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

namespace reflines {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Point {
  double alpha = 0;
  double f = 0;
  double slope = 0;  // directional derivative along the search direction
  std::vector<double> x;
  std::vector<double> g;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const std::vector<double>& x0, double f0,
             const std::vector<double>& g0, const std::vector<double>& dir,
             const LbfgsOptions& opt, int& evaluations)
      : f_(f), x0_(x0), dir_(dir), opt_(opt), evals_(evaluations) {
    origin_.alpha = 0;
    origin_.f = f0;
    origin_.slope = dot(g0, dir);
    origin_.x = x0;
    origin_.g = g0;
  }

  std::optional<Point> run(double alpha) {
    Point prev = origin_;
    for (int i = 0; budget_left(); ++i) {
      Point cur = eval(alpha);
      if (!std::isfinite(cur.f) || !armijo(cur) || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur);
      }
      if (curvature(cur)) return cur;
      if (cur.slope >= 0) return zoom(cur, prev);
      prev = std::move(cur);
      alpha *= 2;
    }
    return prev.alpha > 0 ? std::optional<Point>(std::move(prev)) : std::nullopt;
  }

 private:
  bool budget_left() const { return used_ < opt_.max_evaluations_per_search; }

  bool armijo(const Point& p) const {
    return p.f <= origin_.f + opt_.wolfe_c1 * p.alpha * origin_.slope;
  }
  bool curvature(const Point& p) const {
    return std::abs(p.slope) <= -opt_.wolfe_c2 * origin_.slope;
  }

  Point eval(double alpha) {
    Point p;
    p.alpha = alpha;
    p.x.resize(x0_.size());
    p.g.resize(x0_.size());
    for (std::size_t i = 0; i < x0_.size(); ++i) p.x[i] = x0_[i] + alpha * dir_[i];
    p.f = f_(p.x, p.g);
    p.slope = dot(p.g, dir_);
    ++evals_;
    ++used_;
    return p;
  }

  // Safeguarded cubic interpolation between the bracket ends.
  static double interpolate(const Point& lo, const Point& hi) {
    const double a = lo.alpha, b = hi.alpha;
    const double lower = std::min(a, b), upper = std::max(a, b);
    const double margin = 0.1 * (upper - lower);
    double t = 0.5 * (a + b);
    if (std::isfinite(lo.f) && std::isfinite(hi.f)) {
      const double d1 = lo.slope + hi.slope - 3 * (lo.f - hi.f) / (a - b);
      const double disc = d1 * d1 - lo.slope * hi.slope;
      if (disc >= 0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double denom = hi.slope - lo.slope + 2 * d2;
        if (denom != 0) {
          const double c = b - (b - a) * (hi.slope + d2 - d1) / denom;
          if (std::isfinite(c)) t = c;
        }
      }
    }
    return std::clamp(t, lower + margin, upper - margin);
  }

  std::optional<Point> zoom(Point lo, Point hi) {
    while (budget_left()) {
      const double alpha = interpolate(lo, hi);
      if (alpha == lo.alpha || alpha == hi.alpha) break;
      Point cur = eval(alpha);
      if (!std::isfinite(cur.f) || !armijo(cur) || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (curvature(cur)) return cur;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0) hi = lo;
        lo = std::move(cur);
      }
    }
    // lo always satisfies sufficient decrease when it is not the origin.
    return lo.alpha > 0 ? std::optional<Point>(std::move(lo)) : std::nullopt;
  }

  const Objective& f_;
  const std::vector<double>& x0_;
  const std::vector<double>& dir_;
  const LbfgsOptions& opt_;
  int& evals_;
  int used_ = 0;
  Point origin_;
};

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H g.
std::vector<double> direction(const std::deque<Correction>& mem,
                              const std::vector<double>& g) {
  std::vector<double> q = g;
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * dot(mem[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * mem[k].y[i];
  }
  if (!mem.empty()) {
    const auto& last = mem.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * dot(mem[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * mem[k].s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double>& x,
                           const LbfgsOptions& opt) {
  LbfgsResult res;
  std::vector<double> g(x.size());
  double fx = f(x, g);
  res.evaluations = 1;
  res.initial_value = fx;
  res.value = fx;
  if (!std::isfinite(fx)) {
    res.stop_reason = "non-finite objective at the starting point";
    return res;
  }

  std::deque<Correction> mem;
  std::vector<double> dir;
  bool steepest = true;

  while (res.iterations < opt.max_iterations) {
    const double gnorm = norm(g);
    if (gnorm == 0) {
      res.converged = true;
      res.stop_reason = "zero gradient";
      break;
    }
    if (steepest) {
      dir.resize(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) dir[i] = -g[i];
    } else {
      dir = direction(mem, g);
      if (dot(dir, g) >= 0) {
        mem.clear();
        steepest = true;
        continue;
      }
    }
    const double alpha0 = steepest ? 1.0 / gnorm : 1.0;

    LineSearch ls(f, x, fx, g, dir, opt, res.evaluations);
    auto pt = ls.run(alpha0);
    if (!pt) {
      if (!steepest) {
        mem.clear();
        steepest = true;
        continue;
      }
      res.stop_reason = "line search failed to decrease the objective";
      break;
    }

    Correction c;
    c.s.resize(x.size());
    c.y.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      c.s[i] = pt->x[i] - x[i];
      c.y[i] = pt->g[i] - g[i];
    }
    const double sy = dot(c.s, c.y);
    const double f_prev = fx;
    x = std::move(pt->x);
    g = std::move(pt->g);
    fx = pt->f;
    ++res.iterations;
    res.value_trace.push_back(fx);
    res.grad_norm_trace.push_back(norm(g));

    if (sy > 0) {
      c.rho = 1.0 / sy;
      mem.push_back(std::move(c));
      if (static_cast<int>(mem.size()) > opt.history) mem.pop_front();
      steepest = false;
    }

    const double scale = std::max({std::abs(f_prev), std::abs(fx), 1.0});
    if (std::abs(f_prev - fx) / scale < opt.tolerance) {
      res.converged = true;
      res.stop_reason = "relative objective change below tolerance";
      break;
    }
  }
  if (res.stop_reason.empty()) res.stop_reason = "maximum iterations reached";
  res.value = fx;
  return res;
}

}  // namespace reflines
