#include "coxcheck/multiplicative.hpp"

#include "coxcheck/errors.hpp"

#include <algorithm>
#include <cmath>

namespace coxcheck {

namespace {

constexpr std::size_t kMaxPowers = 10'000'000;

void require(bool ok, const std::string& which, const std::string& detail) {
  if (!ok) throw PreconditionError(which + ": " + detail);
}

void check_preconditions(const CombinationForm& f, const MultiplicativeOptions& o) {
  require(!f.is_tabular(), "catalog", "multiplicative representation needs a catalog form");
  MonotonicityOptions mo;
  mo.grid = o.precondition_grid;
  auto mono = check_monotonicity(f, mo);
  if (!mono.strict) {
    const auto& v = *mono.strict_violation;
    require(false, "Par4-strict",
            f.name() + " is not strictly increasing in argument " + std::to_string(v.coordinate + 1) + ": F at " +
                to_string(v.lo) + " and " + to_string(v.hi) + " with the other argument " + to_string(v.fixed) +
                " gives " + to_string(v.value_lo) + " and " + to_string(v.value_hi));
  }
  require(mono.weak, "Par4-strict", f.name() + " is not nondecreasing");
  require(mono.continuity != Continuity::violated, "Par4-strict", f.name() + " fails the continuity probe");
  auto eq1 = check_functional_equation(f, EquationId::associativity, o.precondition_grid + 1);
  require(to_long_double(eq1.residual) <= o.tolerance, "EQ1",
          "associativity residual " + to_string(eq1.residual) + " exceeds tolerance");
  Bounds unit_interval;
  for (const auto& x : uniform_grid(unit_interval, o.precondition_grid + 1)) {
    require(f(x, Rational(1)) == x && f(Rational(1), x) == x, "unit", "F(x,1) != x at x = " + to_string(x));
    require(f(x, Rational(0)) == Rational(0) && f(Rational(0), x) == Rational(0), "annihilator",
            "F(x,0) != 0 at x = " + to_string(x));
  }
  require(o.anchor > 0 && o.anchor < 1, "anchor", "anchor must lie strictly inside the interval");
}

}  // namespace

void MultiplicativeRep::extend_powers(long double x) const {
  while (powers_.back() >= x && powers_.back() > 0) {
    if (powers_.size() >= kMaxPowers) throw BisectionFailure("F-powers of the anchor do not reach the argument");
    long double next = form_.eval(anchor_, powers_.back());
    if (!(next < powers_.back())) throw BisectionFailure("F-powers of the anchor stopped decreasing");
    powers_.push_back(next);
  }
}

long double MultiplicativeRep::exponent_of(long double x) const {
  if (x >= 1.0L) return 0.0L;
  if (x <= 0.0L) return INFINITY;
  extend_powers(x);
  // largest k with powers_[k] >= x
  std::size_t k = 0;
  {
    auto it = std::upper_bound(powers_.begin(), powers_.end(), x, std::greater<long double>());
    k = static_cast<std::size_t>(it - powers_.begin()) - 1;
  }
  long double q = static_cast<long double>(k);
  long double current = powers_[k];
  long double step = 1.0L;
  std::size_t last = 0;
  for (int i = 1; i <= depth_ && static_cast<std::size_t>(i) < roots_.size(); ++i) {
    step /= 2;
    last = static_cast<std::size_t>(i);
    long double candidate = form_.eval(current, roots_[static_cast<std::size_t>(i)]);
    if (candidate >= x) {
      current = candidate;
      q += step;
    }
  }
  if (last > 0) {
    long double lower = form_.eval(current, roots_[last]);
    if (current > lower && x < current) q += step * std::min(1.0L, (current - x) / (current - lower));
  }
  return q;
}

long double MultiplicativeRep::operator()(long double x) const {
  if (x <= 0.0L) return 0.0L;
  return std::exp2(-exponent_of(x));
}

MultiplicativeRep multiplicative_rep(const CombinationForm& f, MultiplicativeOptions options) {
  check_preconditions(f, options);
  MultiplicativeRep rep;
  rep.form_ = f;
  rep.anchor_ = to_long_double(options.anchor);
  rep.tolerance_ = options.tolerance;
  rep.depth_ = options.depth;
  rep.powers_ = {1.0L, rep.anchor_};

  rep.roots_ = {rep.anchor_};
  for (int i = 1; i <= options.depth; ++i) {
    const long double target = rep.roots_.back();
    long double lo = target, hi = 1.0L;
    auto g = [&](long double s) { return f.eval(s, s) - target; };
    long double glo = g(lo), ghi = g(hi);
    if (glo > 0 || ghi < 0)
      throw BisectionFailure("diagonal F(t,t) does not reach " + std::to_string(static_cast<double>(target)));
    for (int it = 0; it < 200 && hi - lo > options.tolerance; ++it) {
      long double mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi) break;
      long double gm = g(mid);
      if (gm < 0) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
        ghi = gm;
      }
    }
    long double root = ghi == glo ? lo : lo + (hi - lo) * (-glo) / (ghi - glo);
    rep.roots_.push_back(std::clamp(root, lo, hi));
  }

  const std::size_t n = std::max<std::size_t>(options.residual_grid, 1);
  std::vector<long double> grid(n);
  for (std::size_t k = 1; k <= n; ++k) grid[k - 1] = static_cast<long double>(k) / static_cast<long double>(n);
  std::vector<long double> fg(n);
  for (std::size_t i = 0; i < n; ++i) fg[i] = rep(grid[i]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long double r = std::fabs(rep(f.eval(grid[i], grid[j])) - fg[i] * fg[j]);
      if (r > rep.residual_) {
        rep.residual_ = r;
        rep.witness_ = {grid[i], grid[j]};
      }
    }

  std::vector<long double> xs = rep.powers_;
  xs.insert(xs.end(), rep.roots_.begin(), rep.roots_.end());
  xs.insert(xs.end(), grid.begin(), grid.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (long double x : xs) rep.samples_.emplace_back(x, rep(x));
  return rep;
}

}  // namespace coxcheck
