#include "dsmeta/roots.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "dsmeta/errors.hpp"

namespace dsmeta {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 500;

RootResult brent_zero(const ScalarFn& f, double a, double b, double fa, double fb, double tol,
                      int evals) {
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return {b, evals};

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
    ++evals;
  }
  throw ConvergenceError("find_root: iteration cap reached");
}

bool opposite(double x, double y) { return (x <= 0 && y >= 0) || (x >= 0 && y <= 0); }

}  // namespace

RootResult find_root(const ScalarFn& f, Bracket bracket, double tol) {
  if (!(bracket.lo < bracket.hi)) throw DomainError("find_root: bracket must satisfy lo < hi");
  const double flo = f(bracket.lo);
  const double fhi = f(bracket.hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    throw ConvergenceError("find_root: objective not finite at bracket ends");
  if (flo == 0.0) return {bracket.lo, 2};
  if (fhi == 0.0) return {bracket.hi, 2};
  if (!opposite(flo, fhi)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << bracket.lo << ", " << bracket.hi << "]";
    throw NoSignChange(msg.str());
  }
  return brent_zero(f, bracket.lo, bracket.hi, flo, fhi, tol, 2);
}

RootResult find_root_expanding(const ScalarFn& f, double lo, double hi, double hi_cap,
                               double tol) {
  if (!(lo < hi)) throw DomainError("find_root_expanding: need lo < hi");
  const double flo = f(lo);
  if (flo == 0.0) return {lo, 1};
  int evals = 1;
  double a = lo, fa = flo;
  while (true) {
    const double fhi = f(hi);
    ++evals;
    if (!std::isfinite(fhi)) throw ConvergenceError("find_root_expanding: objective not finite");
    if (fhi == 0.0) return {hi, evals};
    if (opposite(fa, fhi)) return brent_zero(f, a, hi, fa, fhi, tol, evals);
    if (hi >= hi_cap) {
      std::ostringstream msg;
      msg << "find_root_expanding: no sign change up to " << hi;
      throw NoSignChange(msg.str());
    }
    // Same sign as f(lo): the root lies beyond hi.
    a = hi;
    fa = fhi;
    hi = std::min(2.0 * hi, hi_cap);
  }
}

MaxResult maximize_1d(const ScalarFn& f, Bracket bracket, double tol) {
  if (!(bracket.lo < bracket.hi)) throw DomainError("maximize_1d: bracket must satisfy lo < hi");
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  double a = bracket.lo, b = bracket.hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = -f(x);
  double fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  int evals = 1;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = std::sqrt(kEps) * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm - x >= 0) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
    const double fu = -f(u);
    ++evals;
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  MaxResult best{x, -fx, evals};
  for (double end : {bracket.lo, bracket.hi}) {
    if (std::abs(best.argmax - end) <= 4.0 * (std::sqrt(kEps) * std::abs(end) + tol)) {
      const double fe = f(end);
      ++best.evaluations;
      if (fe >= best.max) {
        best.argmax = end;
        best.max = fe;
      }
    }
  }
  return best;
}

}  // namespace dsmeta
