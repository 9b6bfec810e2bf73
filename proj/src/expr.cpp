#include "projrigid/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace projrigid {

namespace {

long long checked_mul(long long a, long long b) {
  __int128 p = static_cast<__int128>(a) * b;
  if (p > INT64_MAX || p < INT64_MIN) throw ExprError("rational overflow in multiply");
  return static_cast<long long>(p);
}

long long checked_add(long long a, long long b) {
  __int128 s = static_cast<__int128>(a) + b;
  if (s > INT64_MAX || s < INT64_MIN) throw ExprError("rational overflow in add");
  return static_cast<long long>(s);
}

}  // namespace

Rational::Rational(long long n, long long d) {
  if (d == 0) throw ExprError("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num = n;
  den = d;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(checked_add(checked_mul(a.num, b.den), checked_mul(b.num, a.den)),
                  checked_mul(a.den, b.den));
}
Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
Rational operator*(const Rational& a, const Rational& b) {
  return Rational(checked_mul(a.num, b.num), checked_mul(a.den, b.den));
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw ExprError("rational division by zero");
  return Rational(checked_mul(a.num, b.den), checked_mul(a.den, b.num));
}
bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

Rational Rational::pow(long long e) const {
  if (e == 0) return Rational(1);
  Rational base = *this;
  bool inv = e < 0;
  unsigned long long k = inv ? -(unsigned long long)e : (unsigned long long)e;
  if (inv) {
    if (base.num == 0) throw ExprError("zero to a negative power");
    base = Rational(base.den, base.num);
  }
  Rational acc(1);
  while (k) {
    if (k & 1) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  return acc;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Atan: return "atan";
  }
  return "?";
}

struct ExprNode {
  ExprKind kind;
  Rational value;             // Number
  std::string name;           // Var
  std::vector<Expr> kids;     // Add, Mul; [0] for Pow base and Call arg
  long long exponent = 0;     // Pow
  Func func = Func::Sin;      // Call
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

constexpr std::size_t kHashSeed = 0x9e3779b97f4a7c15ull;

std::size_t hash_mix(std::size_t h, std::size_t v) {
  h ^= v + kHashSeed + (h << 6) + (h >> 2);
  return h;
}

void finish_node(ExprNode& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 1099511628211ull;
  switch (n.kind) {
    case ExprKind::Number:
      h = hash_mix(h, static_cast<std::size_t>(n.value.num));
      h = hash_mix(h, static_cast<std::size_t>(n.value.den));
      break;
    case ExprKind::Var:
      h = hash_mix(h, std::hash<std::string>{}(n.name));
      break;
    case ExprKind::Pow:
      h = hash_mix(h, static_cast<std::size_t>(n.exponent));
      break;
    case ExprKind::Call:
      h = hash_mix(h, static_cast<std::size_t>(n.func));
      break;
    default:
      break;
  }
  std::size_t sz = 1;
  for (const Expr& k : n.kids) {
    h = hash_mix(h, k.hash());
    sz += k.tree_size();
  }
  n.hash = h;
  n.size = sz;
}

}  // namespace

Expr make_node(ExprNode&& node) {
  finish_node(node);
  return Expr(std::make_shared<const ExprNode>(std::move(node)));
}

Expr::Expr() { *this = Expr::number(0); }

Expr Expr::number(long long n, long long d) { return number(Rational(n, d)); }

Expr Expr::number(const Rational& r) {
  ExprNode n;
  n.kind = ExprKind::Number;
  n.value = r;
  return make_node(std::move(n));
}

Expr Expr::var(std::string name) {
  ExprNode n;
  n.kind = ExprKind::Var;
  n.name = std::move(name);
  return make_node(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  Rational constant(0);
  bool have_const = false;
  for (Expr& t : terms) {
    if (t.kind() == ExprKind::Add) {
      for (const Expr& k : t.children()) {
        if (k.is_number()) {
          constant = constant + k.number_value();
          have_const = true;
        } else {
          flat.push_back(k);
        }
      }
    } else if (t.is_number()) {
      constant = constant + t.number_value();
      have_const = true;
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (have_const && !constant.is_zero()) flat.insert(flat.begin(), Expr::number(constant));
  if (flat.empty()) return Expr::number(0);
  if (flat.size() == 1) return flat.front();
  ExprNode n;
  n.kind = ExprKind::Add;
  n.kids = std::move(flat);
  return make_node(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
  std::vector<Expr> pos, neg;
  Rational coeff(1);
  auto take = [&](const Expr& f) {
    if (f.is_number()) {
      coeff = coeff * f.number_value();
    } else if (f.kind() == ExprKind::Pow && f.exponent() < 0) {
      neg.push_back(f);
    } else {
      pos.push_back(f);
    }
  };
  for (Expr& t : factors) {
    if (t.kind() == ExprKind::Mul) {
      for (const Expr& k : t.children()) take(k);
    } else {
      take(t);
    }
  }
  if (coeff.is_zero()) return Expr::number(0);
  std::vector<Expr> flat;
  if (!coeff.is_one()) flat.push_back(Expr::number(coeff));
  flat.insert(flat.end(), pos.begin(), pos.end());
  flat.insert(flat.end(), neg.begin(), neg.end());
  if (flat.empty()) return Expr::number(1);
  if (flat.size() == 1) return flat.front();
  ExprNode n;
  n.kind = ExprKind::Mul;
  n.kids = std::move(flat);
  return make_node(std::move(n));
}

Expr Expr::pow(const Expr& base, long long exponent) {
  if (exponent == 0) return Expr::number(1);
  if (exponent == 1) return base;
  if (base.is_number()) return Expr::number(base.number_value().pow(exponent));
  if (base.kind() == ExprKind::Pow) {
    return Expr::pow(base.base(), checked_mul(base.exponent(), exponent));
  }
  ExprNode n;
  n.kind = ExprKind::Pow;
  n.kids = {base};
  n.exponent = exponent;
  return make_node(std::move(n));
}

Expr Expr::call(Func f, const Expr& arg) {
  ExprNode n;
  n.kind = ExprKind::Call;
  n.kids = {arg};
  n.func = f;
  return make_node(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::number_value() const { return node_->value; }
const std::string& Expr::var_name() const { return node_->name; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }
const Expr& Expr::base() const { return node_->kids[0]; }
long long Expr::exponent() const { return node_->exponent; }
Func Expr::func() const { return node_->func; }
const Expr& Expr::arg() const { return node_->kids[0]; }
bool Expr::is_zero_literal() const { return is_number() && node_->value.is_zero(); }
bool Expr::is_one_literal() const { return is_number() && node_->value.is_one(); }
std::size_t Expr::hash() const { return node_->hash; }
std::size_t Expr::tree_size() const { return node_->size; }

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, Expr::mul({Expr::number(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_number()) {
    if (b.number_value().is_zero()) throw ExprError("division by zero constant");
    return Expr::mul({a, Expr::number(Rational(1) / b.number_value())});
  }
  return Expr::mul({a, Expr::pow(b, -1)});
}
Expr Expr::operator-() const { return Expr::mul({Expr::number(-1), *this}); }

// ---------------------------------------------------------------------------
// Structural comparison

int compare(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case ExprKind::Number: {
      const Rational &x = a.number_value(), &y = b.number_value();
      if (x == y) return 0;
      return x < y ? -1 : 1;
    }
    case ExprKind::Var:
      return a.var_name().compare(b.var_name());
    case ExprKind::Pow: {
      int c = compare(a.base(), b.base());
      if (c != 0) return c;
      if (a.exponent() == b.exponent()) return 0;
      return a.exponent() < b.exponent() ? -1 : 1;
    }
    case ExprKind::Call: {
      if (a.func() != b.func()) return a.func() < b.func() ? -1 : 1;
      return compare(a.arg(), b.arg());
    }
    case ExprKind::Add:
    case ExprKind::Mul: {
      const auto &x = a.children(), &y = b.children();
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.size(); ++i) {
        int c = compare(x[i], y[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

bool struct_equal(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return true;
  if (a.hash() != b.hash() || a.tree_size() != b.tree_size()) return false;
  return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

struct Simplifier {
  // Values are (key, result): the key copy pins the node so recycled heap
  // addresses of dead temporaries can never alias a live memo entry.
  std::unordered_map<const ExprNode*, std::pair<Expr, Expr>> memo;

  Expr run(const Expr& e) {
    auto it = memo.find(e.raw());
    if (it != memo.end()) return it->second.second;
    Expr out = dispatch(e);
    memo.emplace(e.raw(), std::make_pair(e, out));
    return out;
  }

  Expr dispatch(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Number:
      case ExprKind::Var:
        return e;
      case ExprKind::Call:
        return simp_call(e);
      case ExprKind::Pow:
        return simp_pow(run(e.base()), e.exponent());
      case ExprKind::Mul:
        return simp_mul(e.children());
      case ExprKind::Add:
        return simp_add(e.children());
    }
    return e;
  }

  Expr simp_call(const Expr& e) {
    Expr a = run(e.arg());
    Func f = e.func();
    if (a.is_number()) {
      const Rational& r = a.number_value();
      if (r.is_zero()) {
        switch (f) {
          case Func::Sin:
          case Func::Sinh:
          case Func::Sqrt:
          case Func::Atan: return Expr::number(0);
          case Func::Cos:
          case Func::Cosh:
          case Func::Exp: return Expr::number(1);
          case Func::Log: break;  // domain error at eval time, keep symbolic
        }
      }
      if (r.is_one() && f == Func::Log) return Expr::number(0);
      if (r.is_one() && f == Func::Sqrt) return Expr::number(1);
      if (f == Func::Sqrt && r.num > 0) {
        // exact square roots of perfect-square rationals
        long long sn = std::llround(std::sqrt(static_cast<double>(r.num)));
        long long sd = std::llround(std::sqrt(static_cast<double>(r.den)));
        if (sn * sn == r.num && sd * sd == r.den) return Expr::number(sn, sd);
      }
    }
    return Expr::call(f, a);
  }

  // Rational content (with the sign of the leading term) of a simplified sum,
  // and the primitive remainder. Keeps products canonical: 2x+2 and -( -2x-2 )
  // meet in the same form.
  static std::pair<Rational, Expr> add_content(const Expr& sum) {
    long long g = 0, l = 1;
    for (const Expr& t : sum.children()) {
      Rational c = coeff_core(t).first;
      long long n = c.num < 0 ? -c.num : c.num;
      g = std::gcd(g, n);
      l = l / std::gcd(l, c.den) * c.den;
    }
    if (g == 0) return {Rational(1), sum};
    Rational content(g, l);
    if (coeff_core(sum.children().front()).first.num < 0) content = -content;
    if (content.is_one()) return {content, sum};
    std::vector<Expr> ts;
    for (const Expr& t : sum.children()) {
      auto [c, core] = coeff_core(t);
      ts.push_back(Expr::mul({Expr::number(c / content), core}));
    }
    return {content, Expr::add(std::move(ts))};
  }

  Expr simp_pow(const Expr& base, long long k) {
    if (base.kind() == ExprKind::Mul) {
      std::vector<Expr> fs;
      for (const Expr& f : base.children()) fs.push_back(simp_pow(f, k));
      return simp_mul(fs);
    }
    if (base.kind() == ExprKind::Add) {
      auto [c, prim] = add_content(base);
      if (!c.is_one())
        return simp_mul({Expr::number(c.pow(k)), Expr::pow(prim, k)});
    }
    return Expr::pow(base, k);  // builder folds numbers/nested powers
  }

  Expr simp_mul(const std::vector<Expr>& raw_factors) {
    Rational coeff(1);
    std::vector<std::pair<Expr, long long>> bases;  // base -> accumulated exponent
    bool redo = false;
    auto fold = [&](const Expr& f, long long mult) {
      Expr b = f;
      long long k = mult;
      if (b.kind() == ExprKind::Pow) {
        k = checked_mul(b.exponent(), mult);
        b = b.base();
      }
      if (b.kind() == ExprKind::Add) {
        auto [c, prim] = add_content(b);
        if (!c.is_one()) {
          coeff = coeff * c.pow(k);
          b = prim;
        }
      }
      for (auto& [eb, ek] : bases) {
        if (struct_equal(eb, b)) {
          ek = checked_add(ek, k);
          return;
        }
      }
      bases.emplace_back(b, k);
    };
    for (const Expr& f0 : raw_factors) {
      Expr f = run(f0);
      if (f.is_number()) {
        coeff = coeff * f.number_value();
      } else if (f.kind() == ExprKind::Mul) {
        for (const Expr& k : f.children()) {
          if (k.is_number()) coeff = coeff * k.number_value();
          else fold(k, 1);
        }
      } else {
        fold(f, 1);
      }
    }
    if (coeff.is_zero()) return Expr::number(0);
    // merge exponential factors: exp(u)^a * exp(v)^b -> exp(a*u + b*v)
    {
      std::vector<Expr> exp_args;
      std::size_t n_exp = 0;
      bool nontrivial = false;
      for (auto& [b, k] : bases) {
        if (b.kind() == ExprKind::Call && b.func() == Func::Exp && k != 0) {
          ++n_exp;
          if (k != 1) nontrivial = true;
          exp_args.push_back(Expr::mul({Expr::number(k), b.arg()}));
        }
      }
      if (n_exp > 1 || nontrivial) {
        Expr merged = run(Expr::add(std::move(exp_args)));
        std::erase_if(bases, [](const auto& bk) {
          return bk.first.kind() == ExprKind::Call && bk.first.func() == Func::Exp;
        });
        if (!merged.is_zero_literal()) bases.emplace_back(Expr::call(Func::Exp, merged), 1);
      }
    }
    std::vector<Expr> out;
    for (auto& [b, k] : bases) {
      if (k == 0) continue;
      Expr p = Expr::pow(b, k);
      if (p.is_number()) {
        coeff = coeff * p.number_value();
        continue;
      }
      if (p.kind() == ExprKind::Mul) { redo = true; }
      out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const Expr& x, const Expr& y) { return compare(x, y) < 0; });
    // distribute a bare numeric coefficient over a sum so terms can collect
    if (out.size() == 1 && out[0].kind() == ExprKind::Add && !coeff.is_one()) {
      std::vector<Expr> ts;
      for (const Expr& t : out[0].children()) ts.push_back(Expr::mul({Expr::number(coeff), t}));
      return run(Expr::add(std::move(ts)));
    }
    if (!coeff.is_one() || out.empty()) out.insert(out.begin(), Expr::number(coeff));
    Expr res = Expr::mul(out);
    if (redo) return run(res);
    return res;
  }

  // Split a simplified term into (rational coefficient, core).
  static std::pair<Rational, Expr> coeff_core(const Expr& t) {
    if (t.is_number()) return {t.number_value(), Expr::number(1)};
    if (t.kind() == ExprKind::Mul && t.children().front().is_number()) {
      const auto& kids = t.children();
      std::vector<Expr> rest(kids.begin() + 1, kids.end());
      return {kids.front().number_value(), Expr::mul(std::move(rest))};
    }
    return {Rational(1), t};
  }

  Expr simp_add(const std::vector<Expr>& raw_terms) {
    Rational constant(0);
    std::vector<std::pair<Expr, Rational>> terms;  // core -> coefficient
    auto fold = [&](const Expr& t) {
      auto [c, core] = coeff_core(t);
      if (core.is_one_literal()) {
        constant = constant + c;
        return;
      }
      for (auto& [ec, ek] : terms) {
        if (struct_equal(ec, core)) {
          ek = ek + c;
          return;
        }
      }
      terms.emplace_back(core, c);
    };
    for (const Expr& t0 : raw_terms) {
      Expr t = run(t0);
      if (t.kind() == ExprKind::Add) {
        for (const Expr& k : t.children()) fold(k);
      } else {
        fold(t);
      }
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
    std::vector<Expr> out;
    if (!constant.is_zero()) out.push_back(Expr::number(constant));
    for (auto& [core, c] : terms) {
      if (c.is_zero()) continue;
      if (c.is_one()) out.push_back(core);
      else out.push_back(Expr::mul({Expr::number(c), core}));
    }
    return Expr::add(std::move(out));
  }
};

}  // namespace

Expr simplify(const Expr& e) {
  Simplifier s;
  return s.run(e);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

struct Differ {
  const std::string& var;
  std::unordered_map<const ExprNode*, std::pair<Expr, Expr>> memo;

  explicit Differ(const std::string& v) : var(v) {}

  Expr run(const Expr& e) {
    auto it = memo.find(e.raw());
    if (it != memo.end()) return it->second.second;
    Expr out = dispatch(e);
    memo.emplace(e.raw(), std::make_pair(e, out));
    return out;
  }

  Expr dispatch(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Number:
        return Expr::number(0);
      case ExprKind::Var:
        return Expr::number(e.var_name() == var ? 1 : 0);
      case ExprKind::Add: {
        std::vector<Expr> ts;
        for (const Expr& k : e.children()) ts.push_back(run(k));
        return Expr::add(std::move(ts));
      }
      case ExprKind::Mul: {
        const auto& fs = e.children();
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < fs.size(); ++i) {
          Expr di = run(fs[i]);
          if (di.is_zero_literal()) continue;
          std::vector<Expr> prod{di};
          for (std::size_t j = 0; j < fs.size(); ++j)
            if (j != i) prod.push_back(fs[j]);
          terms.push_back(Expr::mul(std::move(prod)));
        }
        return Expr::add(std::move(terms));
      }
      case ExprKind::Pow: {
        Expr db = run(e.base());
        if (db.is_zero_literal()) return Expr::number(0);
        return Expr::mul({Expr::number(e.exponent()), Expr::pow(e.base(), e.exponent() - 1), db});
      }
      case ExprKind::Call: {
        Expr u = e.arg();
        Expr du = run(u);
        if (du.is_zero_literal()) return Expr::number(0);
        switch (e.func()) {
          case Func::Sin: return Expr::call(Func::Cos, u) * du;
          case Func::Cos: return Expr::number(-1) * Expr::call(Func::Sin, u) * du;
          case Func::Sinh: return Expr::call(Func::Cosh, u) * du;
          case Func::Cosh: return Expr::call(Func::Sinh, u) * du;
          case Func::Exp: return Expr::call(Func::Exp, u) * du;
          case Func::Log: return du / u;
          case Func::Sqrt: return du / (Expr::number(2) * Expr::call(Func::Sqrt, u));
          case Func::Atan: return du / (Expr::number(1) + u * u);
        }
        return Expr::number(0);
      }
    }
    return Expr::number(0);
  }
};

}  // namespace

Expr diff(const Expr& e, const std::string& var) {
  Differ d(var);
  return simplify(d.run(e));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Evaluator {
  const VarMap& vars;
  std::unordered_map<const ExprNode*, std::pair<Expr, double>> memo;

  explicit Evaluator(const VarMap& v) : vars(v) {}

  double run(const Expr& e) {
    auto it = memo.find(e.raw());
    if (it != memo.end()) return it->second.second;
    double out = dispatch(e);
    if (!std::isfinite(out)) throw EvalError("non-finite value in evaluation");
    memo.emplace(e.raw(), std::make_pair(e, out));
    return out;
  }

  double dispatch(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Number:
        return e.number_value().value();
      case ExprKind::Var: {
        auto it = vars.find(e.var_name());
        if (it == vars.end()) throw EvalError("unbound variable '" + e.var_name() + "'");
        return it->second;
      }
      case ExprKind::Add: {
        double s = 0;
        for (const Expr& k : e.children()) s += run(k);
        return s;
      }
      case ExprKind::Mul: {
        double p = 1;
        for (const Expr& k : e.children()) p *= run(k);
        return p;
      }
      case ExprKind::Pow: {
        double b = run(e.base());
        long long k = e.exponent();
        if (b == 0.0 && k < 0) throw EvalError("division by zero");
        return std::pow(b, static_cast<double>(k));
      }
      case ExprKind::Call: {
        double u = run(e.arg());
        switch (e.func()) {
          case Func::Sin: return std::sin(u);
          case Func::Cos: return std::cos(u);
          case Func::Sinh: return std::sinh(u);
          case Func::Cosh: return std::cosh(u);
          case Func::Exp: return std::exp(u);
          case Func::Log:
            if (u <= 0.0) throw EvalError("log of a non-positive value");
            return std::log(u);
          case Func::Sqrt:
            if (u < 0.0) throw EvalError("sqrt of a negative value");
            return std::sqrt(u);
          case Func::Atan: return std::atan(u);
        }
        return 0;
      }
    }
    return 0;
  }
};

}  // namespace

double eval(const Expr& e, const VarMap& vars) {
  Evaluator ev(vars);
  return ev.run(e);
}

// ---------------------------------------------------------------------------
// Substitution and variable collection

namespace {

Expr subst_rec(const Expr& e, const std::map<std::string, Expr>& repl,
               std::unordered_map<const ExprNode*, std::pair<Expr, Expr>>& memo) {
  auto it = memo.find(e.raw());
  if (it != memo.end()) return it->second.second;
  Expr out;
  switch (e.kind()) {
    case ExprKind::Number:
      out = e;
      break;
    case ExprKind::Var: {
      auto r = repl.find(e.var_name());
      out = (r == repl.end()) ? e : r->second;
      break;
    }
    case ExprKind::Add: {
      std::vector<Expr> ks;
      for (const Expr& k : e.children()) ks.push_back(subst_rec(k, repl, memo));
      out = Expr::add(std::move(ks));
      break;
    }
    case ExprKind::Mul: {
      std::vector<Expr> ks;
      for (const Expr& k : e.children()) ks.push_back(subst_rec(k, repl, memo));
      out = Expr::mul(std::move(ks));
      break;
    }
    case ExprKind::Pow:
      out = Expr::pow(subst_rec(e.base(), repl, memo), e.exponent());
      break;
    case ExprKind::Call:
      out = Expr::call(e.func(), subst_rec(e.arg(), repl, memo));
      break;
  }
  memo.emplace(e.raw(), std::make_pair(e, out));
  return out;
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  std::unordered_map<const ExprNode*, std::pair<Expr, Expr>> memo;
  return subst_rec(e, repl, memo);
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case ExprKind::Var:
      out.insert(e.var_name());
      break;
    case ExprKind::Number:
      break;
    default:
      for (const Expr& k : e.children()) collect_vars(k, out);
  }
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> s;
  collect_vars(e, s);
  return s;
}

// ---------------------------------------------------------------------------
// Printing
//
// The printer targets the invariant parse(to_string(e)) == e. Products render
// negative powers as trailing divisions; the parse-time flattening puts those
// factors back in the same position.

namespace {

enum Prec { kPrecAdd = 0, kPrecMul = 1, kPrecUnary = 2, kPrecPow = 3, kPrecAtom = 4 };

void print_rec(std::ostream& os, const Expr& e, int parent_prec);

void print_number(std::ostream& os, const Rational& r, int parent_prec) {
  bool need_paren = (r.num < 0 && parent_prec >= kPrecMul) || (r.den != 1 && parent_prec >= kPrecMul);
  if (need_paren) os << '(';
  os << r.str();
  if (need_paren) os << ')';
}

void print_mul(std::ostream& os, const std::vector<Expr>& fs, int parent_prec) {
  bool paren = parent_prec > kPrecMul;
  if (paren) os << '(';
  // a leading negative constant renders as a sign
  Rational coeff(1);
  bool have_coeff = false;
  if (!fs.empty() && fs.front().is_number()) {
    coeff = fs.front().number_value();
    have_coeff = true;
    if (coeff.num < 0) {
      os << '-';
      coeff = -coeff;
    }
  }
  bool first = true;
  if (have_coeff && !(coeff.is_one() && fs.size() > 1)) {
    print_number(os, coeff, kPrecMul);
    first = false;
  }
  // positive-exponent part
  for (const Expr& f : fs) {
    if (f.is_number()) continue;
    if (f.kind() == ExprKind::Pow && f.exponent() < 0) continue;
    if (!first) os << '*';
    print_rec(os, f, kPrecMul + (first ? 0 : 1));
    first = false;
  }
  if (first) os << '1';
  for (const Expr& f : fs) {
    if (!(f.kind() == ExprKind::Pow && f.exponent() < 0)) continue;
    os << '/';
    if (f.exponent() == -1) {
      print_rec(os, f.base(), kPrecPow);
    } else {
      print_rec(os, f.base(), kPrecPow);
      os << '^' << -f.exponent();
    }
  }
  if (paren) os << ')';
}

void print_rec(std::ostream& os, const Expr& e, int parent_prec) {
  switch (e.kind()) {
    case ExprKind::Number:
      print_number(os, e.number_value(), parent_prec);
      return;
    case ExprKind::Var:
      os << e.var_name();
      return;
    case ExprKind::Call:
      os << func_name(e.func()) << '(';
      print_rec(os, e.arg(), kPrecAdd);
      os << ')';
      return;
    case ExprKind::Pow: {
      if (e.exponent() < 0) {
        // standalone reciprocal: render via division
        bool paren = parent_prec > kPrecMul;
        if (paren) os << '(';
        os << "1/";
        print_rec(os, e.base(), kPrecPow);
        if (e.exponent() != -1) os << '^' << -e.exponent();
        if (paren) os << ')';
        return;
      }
      print_rec(os, e.base(), kPrecPow);
      os << '^' << e.exponent();
      return;
    }
    case ExprKind::Mul:
      print_mul(os, e.children(), parent_prec);
      return;
    case ExprKind::Add: {
      bool paren = parent_prec > kPrecAdd;
      if (paren) os << '(';
      const auto& ts = e.children();
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const Expr& t = ts[i];
        bool neg = false;
        Expr body = t;
        if (t.is_number() && t.number_value().num < 0) {
          neg = true;
          body = Expr::number(-t.number_value());
        } else if (t.kind() == ExprKind::Mul && t.children().front().is_number() &&
                   t.children().front().number_value().num < 0) {
          neg = true;
          std::vector<Expr> rest = t.children();
          Rational c = -rest.front().number_value();
          if (c.is_one() && rest.size() > 1) {
            rest.erase(rest.begin());
          } else {
            rest.front() = Expr::number(c);
          }
          body = Expr::mul(std::move(rest));
        }
        if (i == 0) {
          if (neg) os << '-';
        } else {
          os << (neg ? " - " : " + ");
        }
        print_rec(os, body, kPrecMul);
      }
      if (paren) os << ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print_rec(os, e, kPrecAdd);
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Type { Number, Ident, Op, LParen, RParen, End } type;
  std::string text;
  Rational value;
  std::size_t offset;
};

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;

  Token next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    std::size_t start = pos;
    if (pos >= src.size()) return {Token::End, "", Rational(0), start};
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t i = pos;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      long long ip = 0, scale = 1, frac = 0;
      try {
        ip = std::stoll(std::string(src.substr(pos, i - pos)));
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range", start);
      }
      if (i < src.size() && src[i] == '.') {
        ++i;
        std::size_t fs = i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        if (i == fs) throw ParseError("digits expected after decimal point", i);
        for (std::size_t k = fs; k < i; ++k) {
          frac = checked_add(checked_mul(frac, 10), src[k] - '0');
          scale = checked_mul(scale, 10);
        }
      }
      pos = i;
      Rational v = Rational(ip) + Rational(frac, scale);
      return {Token::Number, std::string(src.substr(start, i - start)), v, start};
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t i = pos;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      std::string name(src.substr(pos, i - pos));
      pos = i;
      return {Token::Ident, name, Rational(0), start};
    }
    if (c == '(') {
      ++pos;
      return {Token::LParen, "(", Rational(0), start};
    }
    if (c == ')') {
      ++pos;
      return {Token::RParen, ")", Rational(0), start};
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      ++pos;
      return {Token::Op, std::string(1, c), Rational(0), start};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
};

struct Parser {
  Lexer lex;
  Token tok;
  const std::set<std::string>* allowed;

  Parser(std::string_view text, const std::set<std::string>* allowed_vars)
      : lex{text}, allowed(allowed_vars) {
    tok = lex.next();
  }

  void advance() { tok = lex.next(); }

  bool is_op(const char* o) const { return tok.type == Token::Op && tok.text == o; }

  Expr parse() {
    Expr e = parse_sum();
    if (tok.type != Token::End) throw ParseError("unexpected trailing input", tok.offset);
    return e;
  }

  Expr parse_sum() {
    std::vector<Expr> terms;
    terms.push_back(parse_product());
    while (is_op("+") || is_op("-")) {
      bool minus = tok.text == "-";
      advance();
      Expr t = parse_product();
      terms.push_back(minus ? Expr::mul({Expr::number(-1), t}) : t);
    }
    return Expr::add(std::move(terms));
  }

  Expr parse_product() {
    std::vector<Expr> factors;
    factors.push_back(parse_unary());
    while (is_op("*") || is_op("/")) {
      bool div = tok.text == "/";
      advance();
      Expr f = parse_unary();
      if (div) {
        if (f.is_number()) {
          if (f.number_value().is_zero()) throw ParseError("division by zero constant", tok.offset);
          factors.push_back(Expr::number(Rational(1) / f.number_value()));
        } else {
          factors.push_back(Expr::pow(f, -1));
        }
      } else {
        factors.push_back(f);
      }
    }
    return Expr::mul(std::move(factors));
  }

  Expr parse_unary() {
    if (is_op("-")) {
      advance();
      Expr e = parse_unary();
      return Expr::mul({Expr::number(-1), e});
    }
    if (is_op("+")) {
      advance();
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (is_op("^")) {
      std::size_t off = tok.offset;
      advance();
      long long k = parse_int_exponent(off);
      base = Expr::pow(base, k);
    }
    return base;
  }

  long long parse_int_exponent(std::size_t op_off) {
    bool neg = false;
    bool paren = false;
    if (tok.type == Token::LParen) {
      paren = true;
      advance();
    }
    if (is_op("-")) {
      neg = true;
      advance();
    }
    if (tok.type != Token::Number || !tok.value.is_integer())
      throw ParseError("integer exponent required after '^'", tok.type == Token::End ? op_off : tok.offset);
    long long k = tok.value.num;
    advance();
    if (paren) {
      if (tok.type != Token::RParen) throw ParseError("expected ')'", tok.offset);
      advance();
    }
    return neg ? -k : k;
  }

  Expr parse_primary() {
    switch (tok.type) {
      case Token::Number: {
        Expr e = Expr::number(tok.value);
        advance();
        return e;
      }
      case Token::Ident: {
        std::string name = tok.text;
        std::size_t off = tok.offset;
        advance();
        if (tok.type == Token::LParen) {
          static const std::map<std::string, Func> funcs = {
              {"sin", Func::Sin},   {"cos", Func::Cos},  {"sinh", Func::Sinh},
              {"cosh", Func::Cosh}, {"exp", Func::Exp},  {"log", Func::Log},
              {"sqrt", Func::Sqrt}, {"atan", Func::Atan}};
          auto it = funcs.find(name);
          if (it == funcs.end()) throw ParseError("unknown function '" + name + "'", off);
          advance();
          Expr a = parse_sum();
          if (tok.type != Token::RParen) throw ParseError("expected ')'", tok.offset);
          advance();
          return Expr::call(it->second, a);
        }
        if (allowed && !allowed->count(name))
          throw ParseError("unknown identifier '" + name + "'", off);
        return Expr::var(name);
      }
      case Token::LParen: {
        advance();
        Expr e = parse_sum();
        if (tok.type != Token::RParen) throw ParseError("expected ')'", tok.offset);
        advance();
        return e;
      }
      default:
        throw ParseError("expected a number, identifier or '('", tok.offset);
    }
  }
};

}  // namespace

Expr parse_expr(std::string_view text) {
  Parser p(text, nullptr);
  return p.parse();
}

Expr parse_expr(std::string_view text, const std::set<std::string>& allowed_vars) {
  Parser p(text, &allowed_vars);
  return p.parse();
}

}  // namespace projrigid
