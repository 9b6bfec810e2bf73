#include "projrigid/zero.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace projrigid {

const char* zero_status_name(ZeroStatus s) {
  switch (s) {
    case ZeroStatus::ProvablyZero: return "ProvablyZero";
    case ZeroStatus::NonzeroWitness: return "NonzeroWitness";
    case ZeroStatus::Undetermined: return "Undetermined";
  }
  return "?";
}

std::vector<VarMap> Sampler::points() const {
  std::vector<VarMap> out;
  out.reserve(static_cast<std::size_t>(samples));
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  auto unit = [&rng]() {
    // portable uniform in [0,1): top 53 bits of the engine output
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (int i = 0; i < samples; ++i) {
    VarMap p;
    for (const auto& [var, range] : box.ranges)
      p[var] = range[0] + (range[1] - range[0]) * unit();
    for (const auto& [var, value] : box.fixed) p[var] = value;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact rational-function normal form over an atom basis.

namespace {

constexpr std::size_t kMaxPolyTerms = 60000;
constexpr std::size_t kMaxAtoms = 512;
constexpr long long kMaxPowExpand = 64;
constexpr std::size_t kMaxWork = 6000000;  // monomial products per normalization

thread_local std::size_t g_work = 0;

void charge_work(std::size_t ops) {
  g_work += ops;
  if (g_work > kMaxWork) throw ExprError("normal-form work budget exceeded");
}

struct Budget : ExprError {
  Budget() : ExprError("normal-form budget exceeded") {}
};

// Monomial: sorted (atom id, exponent>0) pairs.
using Monomial = std::vector<std::pair<int, int>>;
using Poly = std::map<Monomial, Rational>;

struct Fraction {
  Poly num, den;  // den is never the zero polynomial
};

struct Normalizer {
  std::vector<Expr> atoms;

  int intern(const Expr& canonical) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (struct_equal(atoms[i], canonical)) return static_cast<int>(i);
    if (atoms.size() >= kMaxAtoms) throw Budget();
    atoms.push_back(canonical);
    return static_cast<int>(atoms.size() - 1);
  }

  static Poly poly_const(const Rational& r) {
    Poly p;
    if (!r.is_zero()) p[{}] = r;
    return p;
  }

  static Poly poly_add(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [m, c] : b) {
      auto it = out.find(m);
      if (it == out.end()) {
        out.emplace(m, c);
      } else {
        it->second = it->second + c;
        if (it->second.is_zero()) out.erase(it);
      }
    }
    if (out.size() > kMaxPolyTerms) throw Budget();
    return out;
  }

  static Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        out.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        out.push_back(b[j++]);
      } else {
        int e = a[i].second + b[j].second;
        if (e != 0) out.push_back({a[i].first, e});
        ++i;
        ++j;
      }
    }
    return out;
  }

  static Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    charge_work(a.size() * b.size() + 1);
    for (const auto& [ma, ca] : a) {
      for (const auto& [mb, cb] : b) {
        Monomial m = mono_mul(ma, mb);
        Rational c = ca * cb;
        auto it = out.find(m);
        if (it == out.end()) {
          if (!c.is_zero()) out.emplace(std::move(m), c);
        } else {
          it->second = it->second + c;
          if (it->second.is_zero()) out.erase(it);
        }
        if (out.size() > kMaxPolyTerms) throw Budget();
      }
    }
    return out;
  }

  static Poly poly_pow(const Poly& a, long long k) {
    if (k < 0 || k > kMaxPowExpand) throw Budget();
    Poly acc = poly_const(Rational(1));
    Poly base = a;
    while (k) {
      if (k & 1) acc = poly_mul(acc, base);
      base = k > 1 ? poly_mul(base, base) : base;
      k >>= 1;
    }
    return acc;
  }

  static Fraction frac_add(const Fraction& a, const Fraction& b) {
    // shared-denominator shortcut keeps chained sums small
    if (a.den == b.den) return {poly_add(a.num, b.num), a.den};
    return {poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den)), poly_mul(a.den, b.den)};
  }

  static Fraction frac_mul(const Fraction& a, const Fraction& b) {
    return {poly_mul(a.num, b.num), poly_mul(a.den, b.den)};
  }

  static Fraction frac_pow(const Fraction& a, long long k) {
    if (k >= 0) return {poly_pow(a.num, k), poly_pow(a.den, k)};
    if (a.num.empty()) throw ExprError("symbolic division by zero in normal form");
    return {poly_pow(a.den, -k), poly_pow(a.num, -k)};
  }

  Fraction convert(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Number:
        return {poly_const(e.number_value()), poly_const(Rational(1))};
      case ExprKind::Var: {
        int id = intern(e);
        Poly p;
        p[{{id, 1}}] = Rational(1);
        return {p, poly_const(Rational(1))};
      }
      case ExprKind::Add: {
        Fraction acc{poly_const(Rational(0)), poly_const(Rational(1))};
        for (const Expr& k : e.children()) acc = frac_add(acc, convert(k));
        return acc;
      }
      case ExprKind::Mul: {
        Fraction acc{poly_const(Rational(1)), poly_const(Rational(1))};
        for (const Expr& k : e.children()) acc = frac_mul(acc, convert(k));
        return acc;
      }
      case ExprKind::Pow:
        return frac_pow(convert(e.base()), e.exponent());
      case ExprKind::Call: {
        Expr canon = Expr::call(e.func(), simplify(e.arg()));
        int id = intern(canon);
        Poly p;
        p[{{id, 1}}] = Rational(1);
        return {p, poly_const(Rational(1))};
      }
    }
    return {poly_const(Rational(0)), poly_const(Rational(1))};
  }

  // One reduction pass over the numerator polynomial. Returns the reduced
  // numerator (denominators introduced by reductions are dropped: they are
  // nonvanishing factors, irrelevant for the zero test).
  bool reduce_once(Poly& poly) {
    for (auto it = poly.begin(); it != poly.end(); ++it) {
      const Monomial& m = it->first;
      // find a reducible factor
      for (const auto& [id0, exp0] : m) {
        const int id = id0;
        const int exp = exp0;
        const Expr atom = atoms[static_cast<std::size_t>(id)];
        if (atom.kind() != ExprKind::Call) continue;
        Func f = atom.func();
        bool reducible =
            ((f == Func::Sqrt || f == Func::Cos || f == Func::Cosh) && exp >= 2) ||
            (f == Func::Exp && exp != 1);
        if (!reducible) continue;

        Rational coeff = it->second;
        Monomial rest;
        for (const auto& p : m)
          if (p.first != id) rest.push_back(p);
        poly.erase(it);

        Fraction replacement{poly_const(Rational(1)), poly_const(Rational(1))};
        int leftover = 0;
        if (f == Func::Sqrt || f == Func::Cos || f == Func::Cosh) {
          int q = exp / 2;
          leftover = exp % 2;
          Fraction body;
          if (f == Func::Sqrt) {
            body = convert(atom.arg());
          } else {
            // cos^2 -> 1 - sin^2 ; cosh^2 -> 1 + sinh^2
            Func dual = (f == Func::Cos) ? Func::Sin : Func::Sinh;
            int dual_id = intern(Expr::call(dual, simplify(atom.arg())));
            Poly dp;
            dp[{}] = Rational(1);
            Monomial dm{{dual_id, 2}};
            dp[dm] = (f == Func::Cos) ? Rational(-1) : Rational(1);
            body = {dp, poly_const(Rational(1))};
          }
          replacement = frac_pow(body, q);
        } else {  // Exp with exponent != 1
          Expr merged = simplify(Expr::mul({Expr::number(exp), atom.arg()}));
          if (!merged.is_zero_literal()) {
            int eid = intern(Expr::call(Func::Exp, merged));
            Poly ep;
            ep[{{eid, 1}}] = Rational(1);
            replacement = {ep, poly_const(Rational(1))};
          }
        }
        if (leftover > 0) {
          Poly lp;
          lp[{{id, leftover}}] = Rational(1);
          replacement = frac_mul(replacement, Fraction{lp, poly_const(Rational(1))});
        }
        Poly rest_poly;
        rest_poly[rest] = coeff;
        Poly contribution = poly_mul(rest_poly, replacement.num);
        // multiply the remaining polynomial by the replacement denominator to
        // stay fraction-free (a nonvanishing factor, harmless for zero testing)
        if (!(replacement.den.size() == 1 && replacement.den.count(Monomial{}) &&
              replacement.den.at({}).is_one())) {
          poly = poly_mul(poly, replacement.den);
        }
        poly = poly_add(poly, contribution);
        return true;
      }
    }
    return false;
  }

};

// Merging exp-atoms across monomial products: handled by a dedicated pass.
// Two distinct exp atoms in one monomial multiply into a single one.
bool merge_exp_pairs(Normalizer& nz, Poly& poly) {
  for (auto it = poly.begin(); it != poly.end(); ++it) {
    const Monomial& m = it->first;
    std::vector<std::pair<int, int>> exps;
    for (const auto& [id, exp] : m)
      if (nz.atoms[static_cast<std::size_t>(id)].kind() == ExprKind::Call &&
          nz.atoms[static_cast<std::size_t>(id)].func() == Func::Exp)
        exps.push_back({id, exp});
    if (exps.size() < 2) continue;
    Rational coeff = it->second;
    Monomial rest;
    for (const auto& p : m) {
      bool is_exp = false;
      for (const auto& q : exps)
        if (q.first == p.first) is_exp = true;
      if (!is_exp) rest.push_back(p);
    }
    poly.erase(it);
    std::vector<Expr> args;
    for (const auto& [id, exp] : exps)
      args.push_back(Expr::mul({Expr::number(exp), nz.atoms[static_cast<std::size_t>(id)].arg()}));
    Expr merged = simplify(Expr::add(std::move(args)));
    Monomial nm = rest;
    if (!merged.is_zero_literal()) {
      int eid = nz.intern(Expr::call(Func::Exp, merged));
      nm = Normalizer::mono_mul(nm, Monomial{{eid, 1}});
    }
    Poly add;
    add[nm] = coeff;
    poly = Normalizer::poly_add(poly, add);
    return true;
  }
  return false;
}

bool numerator_vanishes_full(const Expr& e) {
  g_work = 0;
  Normalizer nz;
  Fraction f = nz.convert(e);
  Poly n = f.num;
  int guard = 0;
  for (;;) {
    bool changed = false;
    while (nz.reduce_once(n)) {
      changed = true;
      if (++guard > 4096) throw Budget();
    }
    while (merge_exp_pairs(nz, n)) {
      changed = true;
      if (++guard > 4096) throw Budget();
    }
    if (!changed) break;
  }
  return n.empty();
}

}  // namespace

bool proves_zero(const Expr& e) {
  Expr s = simplify(e);
  if (s.is_zero_literal()) return true;
  if (s.tree_size() > 10000) return false;
  try {
    return numerator_vanishes_full(s);
  } catch (const ExprError&) {
    return false;
  }
}

ZeroResult is_zero(const Expr& e, const Sampler& sampler) {
  ZeroResult r;
  Expr s = simplify(e);
  if (s.is_zero_literal()) {
    r.status = ZeroStatus::ProvablyZero;
    r.note = "simplifies to 0";
    return r;
  }
  bool proven = false;
  try {
    if (s.tree_size() <= 10000) proven = numerator_vanishes_full(s);
  } catch (const ExprError&) {
    proven = false;
  }
  if (proven) {
    r.status = ZeroStatus::ProvablyZero;
    r.note = "rational normal form vanishes";
    return r;
  }
  int valid = 0;
  double max_abs = 0.0;
  VarMap best;
  for (const VarMap& p : sampler.points()) {
    double v;
    try {
      v = eval(s, p);
    } catch (const EvalError&) {
      continue;
    }
    ++valid;
    if (std::abs(v) > max_abs) {
      max_abs = std::abs(v);
      best = p;
    }
  }
  r.valid_samples = valid;
  r.max_abs = max_abs;
  if (valid == 0) {
    r.status = ZeroStatus::Undetermined;
    r.note = "all sample points hit domain errors";
    return r;
  }
  if (max_abs > sampler.tolerance) {
    r.status = ZeroStatus::NonzeroWitness;
    r.witness = best;
    r.value = max_abs;
    r.note = "sample exceeds tolerance";
    return r;
  }
  r.status = ZeroStatus::Undetermined;
  r.note = "not symbolically zero; " + std::to_string(valid) + " samples within tolerance";
  return r;
}

namespace {

// exact multivariate division in lexicographic order; empty optional when
// the division leaves a remainder
std::optional<Poly> poly_try_divide(const Poly& num, const Poly& den) {
  if (den.empty()) return std::nullopt;
  Poly rem = num, quot;
  // lead = last element in map order (lexicographically largest monomial)
  auto lead = [](const Poly& p) { return std::prev(p.end()); };
  auto dlead = lead(den);
  int guard = 0;
  while (!rem.empty()) {
    if (++guard > 4096) return std::nullopt;
    auto rlead = lead(rem);
    // quotient monomial: every divisor atom power must fit into the lead
    Monomial qm;
    {
      const Monomial &rm = rlead->first, &dm = dlead->first;
      std::size_t i = 0, j = 0;
      bool ok = true;
      while (j < dm.size()) {
        if (i >= rm.size() || rm[i].first > dm[j].first) {
          ok = false;
          break;
        }
        if (rm[i].first < dm[j].first) {
          qm.push_back(rm[i]);
          ++i;
          continue;
        }
        int e = rm[i].second - dm[j].second;
        if (e < 0) {
          ok = false;
          break;
        }
        if (e > 0) qm.push_back({rm[i].first, e});
        ++i;
        ++j;
      }
      if (!ok) return std::nullopt;
      for (; i < rm.size(); ++i) qm.push_back(rm[i]);
    }
    Rational qc = rlead->second / dlead->second;
    Poly term;
    term[qm] = qc;
    quot = Normalizer::poly_add(quot, term);
    rem = Normalizer::poly_add(rem, Normalizer::poly_mul(
                                        Poly{{qm, -qc}}, den));
  }
  return quot;
}

Expr poly_to_expr(const Poly& p, const std::vector<Expr>& atoms) {
  std::vector<Expr> terms;
  for (const auto& [mono, coeff] : p) {
    std::vector<Expr> factors{Expr::number(coeff)};
    for (const auto& [id, exp] : mono)
      factors.push_back(Expr::pow(atoms[static_cast<std::size_t>(id)], exp));
    terms.push_back(Expr::mul(std::move(factors)));
  }
  return simplify(Expr::add(std::move(terms)));
}

struct ContentSplit {
  Rational c{1};
  Monomial m;
  Poly primitive;
};

// pull out the rational content (signed by the leading term) and the common
// monomial factor
ContentSplit split_content(const Poly& p) {
  ContentSplit out;
  if (p.empty()) {
    out.c = Rational(0);
    return out;
  }
  long long g = 0, l = 1;
  for (const auto& [mono, coeff] : p) {
    long long num = coeff.num < 0 ? -coeff.num : coeff.num;
    g = std::gcd(g, num);
    l = l / std::gcd(l, coeff.den) * coeff.den;
  }
  out.c = Rational(g, l);
  if (std::prev(p.end())->second.num < 0) out.c = -out.c;
  // per-atom minimum exponent across every monomial
  std::map<int, int> common;
  bool first = true;
  for (const auto& [mono, coeff] : p) {
    if (first) {
      for (const auto& [id, exp] : mono) common[id] = exp;
      first = false;
      continue;
    }
    for (auto it = common.begin(); it != common.end();) {
      int found = 0;
      for (const auto& [id, exp] : mono)
        if (id == it->first) found = exp;
      if (found == 0) {
        it = common.erase(it);
      } else {
        it->second = std::min(it->second, found);
        ++it;
      }
    }
  }
  for (const auto& [id, exp] : common) out.m.push_back({id, exp});
  for (const auto& [mono, coeff] : p) {
    Monomial reduced;
    std::size_t ci = 0;
    for (const auto& [id, exp] : mono) {
      int drop = 0;
      while (ci < out.m.size() && out.m[ci].first < id) ++ci;
      if (ci < out.m.size() && out.m[ci].first == id) drop = out.m[ci].second;
      if (exp - drop > 0) reduced.push_back({id, exp - drop});
    }
    out.primitive[reduced] = coeff / out.c;
  }
  return out;
}

Expr monomial_to_expr(const Monomial& m, const std::vector<Expr>& atoms) {
  std::vector<Expr> factors{Expr::number(1)};
  for (const auto& [id, exp] : m)
    factors.push_back(Expr::pow(atoms[static_cast<std::size_t>(id)], exp));
  return Expr::mul(std::move(factors));
}

}  // namespace

Expr rational_simplify(const Expr& e) {
  Expr plain = simplify(e);
  if (plain.is_number() || plain.tree_size() < 4 || plain.tree_size() > 4000) return plain;
  try {
    g_work = 0;
    Normalizer nz;
    Fraction f = nz.convert(plain);
    ContentSplit num = split_content(f.num);
    ContentSplit den = split_content(f.den);
    if (den.c.is_zero()) return plain;
    if (num.c.is_zero()) return Expr::number(0);

    // cancel the common part of the monomial prefactors
    Monomial up, down;
    {
      std::size_t i = 0, j = 0;
      const Monomial &a = num.m, &b = den.m;
      while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
          up.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
          down.push_back(b[j++]);
        } else {
          int d = a[i].second - b[j].second;
          if (d > 0) up.push_back({a[i].first, d});
          if (d < 0) down.push_back({b[j].first, -d});
          ++i;
          ++j;
        }
      }
    }

    Expr prefactor = Expr::mul({Expr::number(num.c / den.c), monomial_to_expr(up, nz.atoms)});
    Expr down_expr = monomial_to_expr(down, nz.atoms);
    Expr candidate;
    if (auto q = poly_try_divide(num.primitive, den.primitive)) {
      candidate = simplify(prefactor * poly_to_expr(*q, nz.atoms) / down_expr);
    } else if (auto qq = poly_try_divide(den.primitive, num.primitive)) {
      candidate = simplify(prefactor / (down_expr * poly_to_expr(*qq, nz.atoms)));
    } else {
      candidate = simplify(prefactor * poly_to_expr(num.primitive, nz.atoms) /
                           (down_expr * poly_to_expr(den.primitive, nz.atoms)));
    }
    return candidate.tree_size() < plain.tree_size() ? candidate : plain;
  } catch (const ExprError&) {
    return plain;
  }
}

ZeroResult is_zero_all(const std::vector<Expr>& entries, const Sampler& sampler) {
  ZeroResult agg;
  agg.status = ZeroStatus::ProvablyZero;
  agg.note = "all entries simplify to 0";
  for (const Expr& e : entries) {
    ZeroResult r = is_zero(e, sampler);
    agg.max_abs = std::max(agg.max_abs, r.max_abs);
    agg.valid_samples += r.valid_samples;
    if (r.status == ZeroStatus::NonzeroWitness) {
      if (agg.status != ZeroStatus::NonzeroWitness || r.value > agg.value) {
        agg.witness = r.witness;
        agg.value = r.value;
        agg.note = r.note;
      }
      agg.status = ZeroStatus::NonzeroWitness;
    } else if (r.status == ZeroStatus::Undetermined &&
               agg.status == ZeroStatus::ProvablyZero) {
      agg.status = ZeroStatus::Undetermined;
      agg.note = r.note;
    }
  }
  return agg;
}

}  // namespace projrigid
