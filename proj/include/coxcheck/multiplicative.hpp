#pragma once

#include "coxcheck/forms.hpp"

#include <string>
#include <utility>
#include <vector>

namespace coxcheck {

struct MultiplicativeOptions {
  Rational anchor{1, 2};
  /// Bisection stops once the bracket is at most this wide.
  long double tolerance = 1e-9L;
  /// Residual grid k/n for k = 1..n in each coordinate.
  std::size_t residual_grid = 50;
  /// Dyadic digits used when inverting the F-power map.
  int depth = 48;
  /// Grid for the monotonicity, associativity and unit preconditions.
  std::size_t precondition_grid = 20;
};

/// Strictly increasing f with C·f(F(x,y)) = f(x)·f(y), anchored by f(E) = 1 and f(c) = 1/2.
class MultiplicativeRep {
 public:
  long double operator()(long double x) const;
  /// Real F-power exponent q with x = F-power of the anchor to q, so f(x) = 2^-q.
  long double exponent_of(long double x) const;

  const CombinationForm& form() const { return form_; }
  long double anchor() const { return anchor_; }
  long double constant() const { return 1.0L; }
  /// F-powers c, F(c,c), ... computed so far, starting with the unit.
  const std::vector<long double>& powers() const { return powers_; }
  /// roots()[i] is the dyadic F-power of the anchor with exponent 2^-i.
  const std::vector<long double>& roots() const { return roots_; }
  /// (x, f(x)) for the powers, the roots and the residual grid, sorted by x.
  const std::vector<std::pair<long double, long double>>& samples() const { return samples_; }
  long double residual() const { return residual_; }
  std::pair<long double, long double> residual_witness() const { return witness_; }
  long double tolerance() const { return tolerance_; }

 private:
  friend MultiplicativeRep multiplicative_rep(const CombinationForm& f, MultiplicativeOptions options);
  void extend_powers(long double x) const;

  CombinationForm form_;
  long double anchor_ = 0.5L;
  long double tolerance_ = 0;
  int depth_ = 48;
  mutable std::vector<long double> powers_;
  std::vector<long double> roots_;
  std::vector<std::pair<long double, long double>> samples_;
  long double residual_ = 0;
  std::pair<long double, long double> witness_{};
};

/// Builds f by F-powers of the anchor and dyadic roots found by bisection on the diagonal.
/// Throws PreconditionError naming the failed precondition (catalog, Par4-strict, EQ1, unit,
/// annihilator, anchor) and BisectionFailure when the diagonal does not reach a target.
MultiplicativeRep multiplicative_rep(const CombinationForm& f, MultiplicativeOptions options = {});

class BisectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coxcheck
