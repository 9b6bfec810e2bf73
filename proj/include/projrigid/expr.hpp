#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace projrigid {

/// Exact rational number on 64-bit storage, always normalized (den > 0, gcd = 1).
/// Arithmetic that would leave the representable range throws ExprError; callers
/// that can fall back to numeric sampling catch it.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d);

  bool is_zero() const { return num == 0; }
  bool is_one() const { return num == 1 && den == 1; }
  bool is_integer() const { return den == 1; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num, den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b);
  Rational pow(long long e) const;
  std::string str() const;
};

class ExprError : public std::runtime_error {
 public:
  explicit ExprError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public ExprError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ExprError(what + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}
  std::size_t offset;
};

class EvalError : public ExprError {
 public:
  explicit EvalError(const std::string& what) : ExprError(what) {}
};

enum class Func { Sin, Cos, Sinh, Cosh, Exp, Log, Sqrt, Atan };

const char* func_name(Func f);

enum class ExprKind { Number, Var, Add, Mul, Pow, Call };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

/// Immutable symbolic expression. Value-semantic handle to a shared tree.
///
/// Node inventory: exact rational constants, named variables, n-ary sums and
/// products, integer powers, and unary function calls. Quotients are carried
/// as products with negative powers; subtraction as a (-1) coefficient.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr number(long long n, long long d = 1);
  static Expr number(const Rational& r);
  static Expr var(std::string name);
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr pow(const Expr& base, long long exponent);
  static Expr call(Func f, const Expr& arg);

  ExprKind kind() const;
  const Rational& number_value() const;      // kind == Number
  const std::string& var_name() const;       // kind == Var
  const std::vector<Expr>& children() const; // Add, Mul
  const Expr& base() const;                  // Pow
  long long exponent() const;                // Pow
  Func func() const;                         // Call
  const Expr& arg() const;                   // Call

  bool is_number() const { return kind() == ExprKind::Number; }
  bool is_zero_literal() const;
  bool is_one_literal() const;

  std::size_t hash() const;
  std::size_t tree_size() const;

  const ExprNode* raw() const { return node_.get(); }

  // Arithmetic builders (no simplification beyond parse-level flattening).
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;

 private:
  explicit Expr(NodePtr n) : node_(std::move(n)) {}
  NodePtr node_;
  friend Expr make_node(ExprNode&& node);
};

inline Expr operator+(const Expr& a, long long b) { return a + Expr::number(b); }
inline Expr operator+(long long a, const Expr& b) { return Expr::number(a) + b; }
inline Expr operator-(const Expr& a, long long b) { return a - Expr::number(b); }
inline Expr operator-(long long a, const Expr& b) { return Expr::number(a) - b; }
inline Expr operator*(const Expr& a, long long b) { return a * Expr::number(b); }
inline Expr operator*(long long a, const Expr& b) { return Expr::number(a) * b; }
inline Expr operator/(const Expr& a, long long b) { return a / Expr::number(b); }
inline Expr operator/(long long a, const Expr& b) { return Expr::number(a) / b; }

/// Total structural order; 0 iff structurally equal.
int compare(const Expr& a, const Expr& b);
bool struct_equal(const Expr& a, const Expr& b);

/// Canonical form: flattened and sorted sums/products, folded constants,
/// collected identical terms and powers of identical bases. Idempotent.
Expr simplify(const Expr& e);

/// Exact partial derivative with respect to a variable name (simplified).
Expr diff(const Expr& e, const std::string& var);

using VarMap = std::unordered_map<std::string, double>;

/// Numeric evaluation. Throws EvalError on missing variables and domain
/// faults (zero denominator, log of a non-positive value, sqrt of a
/// negative value, non-finite result).
double eval(const Expr& e, const VarMap& vars);

/// Simultaneous substitution of variables by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl);

/// Collect free variable names.
void collect_vars(const Expr& e, std::set<std::string>& out);
std::set<std::string> free_vars(const Expr& e);

/// Faithful printer: parse(to_string(e)) is structurally equal to e.
std::string to_string(const Expr& e);

/// Parse the expression grammar: identifiers [A-Za-z][A-Za-z0-9_]*, integer
/// and decimal literals, + - * / ^ with standard precedence, parentheses,
/// unary function calls. '^' requires an integer (possibly parenthesized,
/// possibly negative) exponent.
Expr parse_expr(std::string_view text);

/// Same, but every variable must be a member of `allowed`; otherwise an
/// unknown-identifier ParseError with the byte offset is thrown.
Expr parse_expr(std::string_view text, const std::set<std::string>& allowed_vars);

}  // namespace projrigid
