#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "projrigid/expr.hpp"

namespace projrigid {

/// Axis-aligned sampling domain: a range per free variable plus pinned values
/// (parameters, frozen coordinates).
struct SampleBox {
  std::vector<std::pair<std::string, std::array<double, 2>>> ranges;
  std::map<std::string, double> fixed;

  SampleBox& range(const std::string& var, double lo, double hi) {
    ranges.push_back({var, {lo, hi}});
    return *this;
  }
  SampleBox& pin(const std::string& var, double value) {
    fixed[var] = value;
    return *this;
  }
};

struct Sampler {
  SampleBox box;
  int samples = 64;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;

  /// Deterministic pseudo-random points (seeded, portable bit mapping).
  std::vector<VarMap> points() const;
};

enum class ZeroStatus { ProvablyZero, NonzeroWitness, Undetermined };

const char* zero_status_name(ZeroStatus s);

struct ZeroResult {
  ZeroStatus status = ZeroStatus::Undetermined;
  VarMap witness;         // sample point for NonzeroWitness
  double value = 0.0;     // value at the witness
  double max_abs = 0.0;   // largest |value| over valid samples
  int valid_samples = 0;
  std::string note;

  bool proven_zero() const { return status == ZeroStatus::ProvablyZero; }
  bool nonzero() const { return status == ZeroStatus::NonzeroWitness; }
};

/// Symbolic-only zero proof. Tries structural simplification, then an exact
/// rational-function normal form: the expression is flattened to a single
/// fraction over an atom basis (variables and function calls), with the power
/// reductions sqrt(u)^2 -> u, cos(u)^2 -> 1 - sin(u)^2, cosh(u)^2 -> 1 + sinh(u)^2
/// and exp-product merging applied until stable. True only when the reduced
/// numerator is the zero polynomial. Never samples.
bool proves_zero(const Expr& e);

/// Tri-state zero test: symbolic proof, else seeded sampling against the
/// tolerance. All-invalid samples give Undetermined with a diagnostic note.
ZeroResult is_zero(const Expr& e, const Sampler& sampler);

/// Zero test over a set of expressions (e.g. tensor components): proven only
/// if every entry is proven; a witness from any entry makes the result
/// NonzeroWitness (the largest sampled magnitude wins).
ZeroResult is_zero_all(const std::vector<Expr>& entries, const Sampler& sampler);

/// Quotient-aware cleanup for display and extracted quantities: flattens the
/// expression to a single fraction and cancels when one side divides the
/// other exactly. Falls back to plain simplification whenever that does not
/// shrink the tree.
Expr rational_simplify(const Expr& e);

}  // namespace projrigid
