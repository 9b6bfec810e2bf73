#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "projrigid/expr.hpp"

using namespace projrigid;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

// small random expression generator for property tests
struct Gen {
  std::mt19937_64 rng;
  std::vector<std::string> vars;

  explicit Gen(std::uint64_t seed) : rng(seed), vars{"x", "y"} {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  Expr expr(int depth) {
    if (depth <= 0) {
      switch (pick(3)) {
        case 0: return Expr::number(pick(7) - 3);
        case 1: return Expr::var(vars[static_cast<std::size_t>(pick(2))]);
        default: return Expr::number(pick(5) + 1, pick(3) + 1);
      }
    }
    switch (pick(6)) {
      case 0: return expr(depth - 1) + expr(depth - 1);
      case 1: return expr(depth - 1) - expr(depth - 1);
      case 2: return expr(depth - 1) * expr(depth - 1);
      case 3: return Expr::pow(expr(depth - 1), pick(3) + 1);
      case 4: {
        Func fs[] = {Func::Sin, Func::Cos, Func::Sinh, Func::Exp};
        return Expr::call(fs[pick(4)], expr(depth - 1));
      }
      default: {
        Expr d = expr(depth - 1);
        // keep denominators away from zero on the sample box
        return expr(depth - 1) / (Expr::number(3) + d * d);
      }
    }
  }
};

}  // namespace

TEST_CASE("parse shapes") {
  Expr e = P("1-r");
  REQUIRE(e.kind() == ExprKind::Add);
  REQUIRE(e.children().size() == 2);
  CHECK(e.children()[0].is_one_literal());
  const Expr& neg = e.children()[1];
  REQUIRE(neg.kind() == ExprKind::Mul);
  CHECK(neg.children()[0].number_value().num == -1);
  CHECK(neg.children()[1].var_name() == "r");

  Expr q = P("-1/(1-r)");
  REQUIRE(q.kind() == ExprKind::Mul);
  CHECK(q.children().front().number_value().num == -1);
  const Expr& inv = q.children().back();
  REQUIRE(inv.kind() == ExprKind::Pow);
  CHECK(inv.exponent() == -1);
  CHECK(struct_equal(inv.base(), P("1-r")));

  Expr m = P("x0/(g*x0+1)");
  REQUIRE(m.kind() == ExprKind::Mul);
  CHECK(m.children()[0].var_name() == "x0");
  CHECK(m.children()[1].kind() == ExprKind::Pow);
  CHECK(struct_equal(m.children()[1].base(), P("g*x0+1")));

  CHECK(P("2.5").number_value() == Rational(5, 2));
  CHECK(P("x^2").kind() == ExprKind::Pow);
  CHECK(P("x^(-2)").exponent() == -2);
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(P("1+*2"), ParseError);
  try {
    P("1+*2");
  } catch (const ParseError& err) {
    CHECK(err.offset == 2);
  }
  CHECK_THROWS_AS(P("foo(x)"), ParseError);  // unknown function
  try {
    P("2*foo(x)");
  } catch (const ParseError& err) {
    CHECK(err.offset == 2);
  }
  CHECK_THROWS_AS(P("x^y"), ParseError);  // integer exponent required
  CHECK_THROWS_AS(parse_expr("a+b", std::set<std::string>{"a"}), ParseError);
  CHECK_NOTHROW(parse_expr("a+sin(a)", std::set<std::string>{"a"}));
}

TEST_CASE("print/parse round trip") {
  const char* cases[] = {
      "1-r", "-1/(1-r)", "x0/(g*x0+1)", "sin(x)*cos(y)", "x^2 - 2*x + 1",
      "1/(1+g*x)^2", "-x", "2.5*x", "x/y/2", "sqrt(1+x^2)", "atan(y/x)",
      "exp(-t)*sinh(t)", "(x+y)^3/(x-y)",
  };
  for (const char* c : cases) {
    Expr e = P(c);
    CHECK(struct_equal(parse_expr(to_string(e)), e));
    Expr s = simplify(e);
    CHECK(struct_equal(parse_expr(to_string(s)), s));
  }

  Gen g(12345);
  for (int i = 0; i < 200; ++i) {
    Expr e = g.expr(3);
    CAPTURE(to_string(e));
    CHECK(struct_equal(parse_expr(to_string(e)), e));
    Expr s = simplify(e);
    CHECK(struct_equal(parse_expr(to_string(s)), s));
  }
}

TEST_CASE("simplify is idempotent") {
  Gen g(777);
  for (int i = 0; i < 300; ++i) {
    Expr e = g.expr(3);
    Expr s1 = simplify(e);
    Expr s2 = simplify(s1);
    CAPTURE(to_string(e));
    CHECK(struct_equal(s1, s2));
  }
}

TEST_CASE("simplify basics") {
  CHECK(simplify(P("r - r")).is_zero_literal());
  CHECK(simplify(P("x*1 + 0*y")).var_name() == "x");
  CHECK(struct_equal(simplify(P("x*x*x")), P("x^3")));
  CHECK(struct_equal(simplify(P("(1-r)/(1-r)")), P("1")));
  CHECK(simplify(P("exp(y)*exp(-y)")).is_one_literal());
  CHECK(struct_equal(simplify(P("exp(x)*exp(x)")), simplify(P("exp(2*x)"))));
  CHECK(simplify(P("sqrt(4)")).number_value() == Rational(2));
  CHECK(struct_equal(simplify(P("2*x + 3*x")), P("5*x")));
}

TEST_CASE("diff examples") {
  CHECK(struct_equal(diff(P("1-r"), "r"), Expr::number(-1)));

  // d/dx [-g/(1+g*x)] = g^2/(1+g*x)^2
  Expr d = diff(P("-g/(1+g*x)"), "x");
  Expr expect = simplify(P("g^2/(1+g*x)^2"));
  CHECK(struct_equal(simplify(d - expect), Expr::number(0)));

  Expr dt = diff(P("(1-r)*cos(t)"), "t");
  CHECK(struct_equal(simplify(dt - simplify(P("-(1-r)*sin(t)"))), Expr::number(0)));

  CHECK(diff(P("7"), "x").is_zero_literal());
  CHECK(diff(P("y"), "x").is_zero_literal());
}

TEST_CASE("diff linearity is structural") {
  Gen g(4242);
  for (int i = 0; i < 50; ++i) {
    Expr e1 = g.expr(2), e2 = g.expr(2);
    Expr a = Expr::number(3, 2);
    Expr lhs = diff(simplify(a * e1 + e2), "x");
    Expr rhs = simplify(a * diff(e1, "x") + diff(e2, "x"));
    CAPTURE(to_string(e1));
    CAPTURE(to_string(e2));
    CHECK(struct_equal(simplify(lhs - rhs), Expr::number(0)));
  }
}

TEST_CASE("eval examples") {
  CHECK(eval(P("1-r"), {{"r", 0.0}}) == doctest::Approx(1.0));
  CHECK(eval(P("x0/(g*x0+1)"), {{"x0", 1.0}, {"g", 0.0}}) == doctest::Approx(1.0));

  // second r-derivative of the fractional-linear map at 0 is -2g
  Expr phi = P("x0/(g*x0+1)");
  Expr d2 = diff(diff(phi, "x0"), "x0");
  for (double gv : {0.0, 0.3, 1.7}) {
    CHECK(eval(d2, {{"x0", 0.0}, {"g", gv}}) == doctest::Approx(-2.0 * gv).epsilon(1e-12));
  }

  CHECK_THROWS_AS(eval(P("1/x"), {{"x", 0.0}}), EvalError);
  CHECK_THROWS_AS(eval(P("log(x)"), {{"x", -1.0}}), EvalError);
  CHECK_THROWS_AS(eval(P("sqrt(x)"), {{"x", -1.0}}), EvalError);
  CHECK_THROWS_AS(eval(P("x+y"), {{"x", 0.0}}), EvalError);
}

TEST_CASE("derivatives match central differences") {
  Gen g(999);
  std::mt19937_64 rng(31337);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  int checked = 0;
  while (checked < 100) {
    Expr e = g.expr(3);
    Expr de = diff(e, "x");
    double x = -1.0 + 2.0 * unit();
    double y = -1.0 + 2.0 * unit();
    const double h = 1e-5;
    double fp, fm, dv;
    try {
      fp = eval(e, {{"x", x + h}, {"y", y}});
      fm = eval(e, {{"x", x - h}, {"y", y}});
      dv = eval(de, {{"x", x}, {"y", y}});
    } catch (const EvalError&) {
      continue;
    }
    double central = (fp - fm) / (2 * h);
    if (std::abs(central) > 1e6) continue;  // wildly steep draws drown the h^2 term
    ++checked;
    CAPTURE(to_string(e));
    CAPTURE(x);
    CAPTURE(y);
    CHECK(std::abs(dv - central) <= 2e-6 * (1.0 + std::abs(dv)) + 1e-4 * std::abs(fp - fm));
  }
}

TEST_CASE("substitute") {
  Expr e = P("x^2 + y");
  Expr r = substitute(e, {{"x", P("1+t")}});
  CHECK(struct_equal(simplify(r - P("(1+t)^2 + y")), Expr::number(0)));
  auto vars = free_vars(r);
  CHECK(vars.count("t") == 1);
  CHECK(vars.count("x") == 0);
}
