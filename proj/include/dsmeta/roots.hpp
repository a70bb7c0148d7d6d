#pragma once

#include <functional>

namespace dsmeta {

struct Bracket {
  double lo;
  double hi;
};

struct RootResult {
  double x;
  int evaluations;
};

struct MaxResult {
  double argmax;
  double max;
  int evaluations;
};

using ScalarFn = std::function<double(double)>;

/// Brent-style bracketed root search (bisection, secant and inverse
/// quadratic steps). Returns once the bracket is narrower than `tol` or an
/// exact zero is hit. Throws NoSignChange when f(lo), f(hi) share a sign.
RootResult find_root(const ScalarFn& f, Bracket bracket, double tol = 1e-10);

/// Root of a function on [lo, ∞) whose sign at lo differs from its sign for
/// large arguments. The upper end starts at `hi` and doubles until a sign
/// change or until it passes `hi_cap`.
RootResult find_root_expanding(const ScalarFn& f, double lo, double hi, double hi_cap,
                               double tol = 1e-10);

/// Derivative-free maximization of a unimodal function (golden section with
/// parabolic steps). A maximum at either endpoint is returned exactly.
MaxResult maximize_1d(const ScalarFn& f, Bracket bracket, double tol = 1e-8);

}  // namespace dsmeta
