#pragma once

// Scalar expressions over the three chart coordinates: immutable shared
// trees with parsing, pointwise evaluation, exact symbolic differentiation,
// and conservative simplification. Trees are DAGs (subtrees are shared), so
// evaluation and differentiation memoize on node identity.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace contact3 {

inline constexpr int kDim = 3;
using Point = std::array<double, kDim>;
using CoordNames = std::array<std::string, kDim>;

inline const CoordNames kDefaultCoords{{"x", "y", "z"}};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier };

  ParseError(Kind kind, std::size_t position, const std::string& message)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}

  Kind kind() const { return kind_; }
  // 1-based character index into the source text.
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& reason, const std::string& subexpression)
      : std::runtime_error(reason + " in '" + subexpression + "'"),
        reason_(reason),
        subexpression_(subexpression) {}

  const std::string& reason() const { return reason_; }
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string reason_;
  std::string subexpression_;
};

enum class ExprKind : std::uint8_t {
  Constant,
  Coord,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // integer exponent only
  Ln,
  Exp,
  Sqrt,
  Sin,
  Cos,
};

class Expr {
 public:
  struct Node {
    ExprKind kind;
    double value = 0.0;  // Constant payload
    int aux = 0;         // Coord index or Pow exponent
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

  // Default: the constant 0.
  Expr() : n_(zero_node()) {}
  // Implicit so numeric literals participate in expression algebra.
  Expr(double v) : n_(make_node(ExprKind::Constant, v, 0, nullptr, nullptr)) {}

  static Expr constant(double v) { return Expr(v); }

  static Expr coord(int index) {
    if (index < 0 || index >= kDim) throw std::out_of_range("coordinate index");
    return Expr(make_node(ExprKind::Coord, 0.0, index, nullptr, nullptr));
  }

  // Exact tree constructors; no folding. The algebraic operators below fold.
  static Expr make_unary(ExprKind k, const Expr& a) {
    return Expr(make_node(k, 0.0, 0, a.n_, nullptr));
  }
  static Expr make_binary(ExprKind k, const Expr& a, const Expr& b) {
    return Expr(make_node(k, 0.0, 0, a.n_, b.n_));
  }
  static Expr make_pow(const Expr& base, int exponent) {
    return Expr(make_node(ExprKind::Pow, 0.0, exponent, base.n_, nullptr));
  }

  ExprKind kind() const { return n_->kind; }
  double constant_value() const { return n_->value; }
  int coord_index() const { return n_->aux; }
  int exponent() const { return n_->aux; }
  Expr child_a() const { return Expr(n_->a); }
  Expr child_b() const { return Expr(n_->b); }
  const Node* node() const { return n_.get(); }
  std::shared_ptr<const Node> share() const { return n_; }

  bool is_constant(double v) const {
    return n_->kind == ExprKind::Constant && n_->value == v;
  }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  static std::shared_ptr<const Node> make_node(ExprKind k, double v, int aux,
                                               std::shared_ptr<const Node> a,
                                               std::shared_ptr<const Node> b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->value = v;
    n->aux = aux;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  static const std::shared_ptr<const Node>& zero_node() {
    static const std::shared_ptr<const Node> z =
        make_node(ExprKind::Constant, 0.0, 0, nullptr, nullptr);
    return z;
  }

  std::shared_ptr<const Node> n_;
};

namespace detail {

inline bool is_unary(ExprKind k) {
  switch (k) {
    case ExprKind::Neg:
    case ExprKind::Ln:
    case ExprKind::Exp:
    case ExprKind::Sqrt:
    case ExprKind::Sin:
    case ExprKind::Cos:
      return true;
    default:
      return false;
  }
}

// Exact products only; |n| is small in practice.
inline double pow_by_squaring(double base, long long n) {
  if (n < 0) return 1.0 / pow_by_squaring(base, -n);
  double acc = 1.0;
  double b = base;
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Algebraic constructors. These fold constant subexpressions and drop
// arithmetic identities but never reassociate, so evaluation order (and hence
// floating point results) of the remaining tree is preserved.

inline Expr operator-(const Expr& x) {
  if (x.kind() == ExprKind::Constant) return Expr::constant(-x.constant_value());
  if (x.kind() == ExprKind::Neg) return x.child_a();
  return Expr::make_unary(ExprKind::Neg, x);
}

inline Expr operator+(const Expr& x, const Expr& y) {
  if (x.is_constant(0.0)) return y;
  if (y.is_constant(0.0)) return x;
  if (x.kind() == ExprKind::Constant && y.kind() == ExprKind::Constant) {
    double v = x.constant_value() + y.constant_value();
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::make_binary(ExprKind::Add, x, y);
}

inline Expr operator-(const Expr& x, const Expr& y) {
  if (y.is_constant(0.0)) return x;
  if (x.is_constant(0.0)) return -y;
  if (x.kind() == ExprKind::Constant && y.kind() == ExprKind::Constant) {
    double v = x.constant_value() - y.constant_value();
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::make_binary(ExprKind::Sub, x, y);
}

inline Expr operator*(const Expr& x, const Expr& y) {
  if (x.is_constant(0.0) || y.is_constant(0.0)) return Expr::constant(0.0);
  if (x.is_constant(1.0)) return y;
  if (y.is_constant(1.0)) return x;
  if (x.kind() == ExprKind::Constant && y.kind() == ExprKind::Constant) {
    double v = x.constant_value() * y.constant_value();
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::make_binary(ExprKind::Mul, x, y);
}

inline Expr operator/(const Expr& x, const Expr& y) {
  if (y.is_constant(1.0)) return x;
  if (x.is_constant(0.0) && y.kind() != ExprKind::Constant) return Expr::constant(0.0);
  if (x.kind() == ExprKind::Constant && y.kind() == ExprKind::Constant &&
      y.constant_value() != 0.0) {
    double v = x.constant_value() / y.constant_value();
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::make_binary(ExprKind::Div, x, y);
}

inline Expr pow_int(const Expr& base, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  if (base.kind() == ExprKind::Constant) {
    double b = base.constant_value();
    if (b != 0.0 || exponent > 0) {
      double v = detail::pow_by_squaring(b, exponent);
      if (std::isfinite(v)) return Expr::constant(v);
    }
  }
  return Expr::make_pow(base, exponent);
}

inline Expr ln(const Expr& x) {
  if (x.kind() == ExprKind::Constant && x.constant_value() > 0.0) {
    double v = std::log(x.constant_value());
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::make_unary(ExprKind::Ln, x);
}

inline Expr exp(const Expr& x) {
  if (x.kind() == ExprKind::Constant) {
    double v = std::exp(x.constant_value());
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::make_unary(ExprKind::Exp, x);
}

inline Expr sqrt(const Expr& x) {
  if (x.kind() == ExprKind::Constant && x.constant_value() >= 0.0) {
    return Expr::constant(std::sqrt(x.constant_value()));
  }
  return Expr::make_unary(ExprKind::Sqrt, x);
}

inline Expr sin(const Expr& x) {
  if (x.kind() == ExprKind::Constant) return Expr::constant(std::sin(x.constant_value()));
  return Expr::make_unary(ExprKind::Sin, x);
}

inline Expr cos(const Expr& x) {
  if (x.kind() == ExprKind::Constant) return Expr::constant(std::cos(x.constant_value()));
  return Expr::make_unary(ExprKind::Cos, x);
}

// ---------------------------------------------------------------------------
// Rendering. Output re-parses to a structurally identical tree.

namespace detail {

inline std::string format_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// Precedence levels: additive 1, multiplicative 2, unary minus 3, power 4,
// atoms 5. A negative constant renders as "-c" and is treated like a Neg.
inline int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::Pow:
      return 4;
    case ExprKind::Constant:
      return std::signbit(e.constant_value()) ? 3 : 5;
    default:
      return 5;
  }
}

inline void render(const Expr& e, const CoordNames& coords, std::string& out);

inline void render_child(const Expr& child, const CoordNames& coords, int min_prec,
                         std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    render(child, coords, out);
    out += ')';
  } else {
    render(child, coords, out);
  }
}

inline void render(const Expr& e, const CoordNames& coords, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Constant: {
      double v = e.constant_value();
      if (std::signbit(v)) {
        out += '-';
        out += format_double(-v);
      } else {
        out += format_double(v);
      }
      return;
    }
    case ExprKind::Coord:
      out += coords[static_cast<std::size_t>(e.coord_index())];
      return;
    case ExprKind::Neg:
      out += '-';
      render_child(e.child_a(), coords, 3, out);
      return;
    case ExprKind::Add:
      render_child(e.child_a(), coords, 1, out);
      out += '+';
      render_child(e.child_b(), coords, 2, out);
      return;
    case ExprKind::Sub:
      render_child(e.child_a(), coords, 1, out);
      out += '-';
      render_child(e.child_b(), coords, 2, out);
      return;
    case ExprKind::Mul:
      render_child(e.child_a(), coords, 2, out);
      out += '*';
      render_child(e.child_b(), coords, 3, out);
      return;
    case ExprKind::Div:
      render_child(e.child_a(), coords, 2, out);
      out += '/';
      render_child(e.child_b(), coords, 3, out);
      return;
    case ExprKind::Pow:
      render_child(e.child_a(), coords, 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case ExprKind::Ln:
    case ExprKind::Exp:
    case ExprKind::Sqrt:
    case ExprKind::Sin:
    case ExprKind::Cos: {
      switch (e.kind()) {
        case ExprKind::Ln: out += "ln"; break;
        case ExprKind::Exp: out += "exp"; break;
        case ExprKind::Sqrt: out += "sqrt"; break;
        case ExprKind::Sin: out += "sin"; break;
        case ExprKind::Cos: out += "cos"; break;
        default: break;
      }
      out += '(';
      render(e.child_a(), coords, out);
      out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string to_string(const Expr& e, const CoordNames& coords = kDefaultCoords) {
  std::string out;
  detail::render(e, coords, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation. One context per point; results memoized on node identity so
// shared subtrees are computed once.

class EvalContext {
 public:
  explicit EvalContext(const Point& p, const CoordNames& coords = kDefaultCoords)
      : p_(p), coords_(coords) {
    memo_.reserve(256);
  }

  const Point& point() const { return p_; }

  double eval(const Expr& e) { return eval_node(e); }

 private:
  double eval_node(const Expr& e) {
    auto it = memo_.find(e.node());
    if (it != memo_.end()) return it->second;
    double r = compute(e);
    if (!std::isfinite(r)) fail("non-finite result", e);
    memo_.emplace(e.node(), r);
    retained_.push_back(e.share());  // keep addresses stable while memoized
    return r;
  }

  double compute(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Constant:
        return e.constant_value();
      case ExprKind::Coord:
        return p_[static_cast<std::size_t>(e.coord_index())];
      case ExprKind::Neg:
        return -eval_node(e.child_a());
      case ExprKind::Add:
        return eval_node(e.child_a()) + eval_node(e.child_b());
      case ExprKind::Sub:
        return eval_node(e.child_a()) - eval_node(e.child_b());
      case ExprKind::Mul:
        return eval_node(e.child_a()) * eval_node(e.child_b());
      case ExprKind::Div: {
        double num = eval_node(e.child_a());
        double den = eval_node(e.child_b());
        if (den == 0.0) fail("division by zero", e);
        return num / den;
      }
      case ExprKind::Pow: {
        double b = eval_node(e.child_a());
        int n = e.exponent();
        if (b == 0.0 && n < 0) fail("zero raised to a negative power", e);
        return detail::pow_by_squaring(b, n);
      }
      case ExprKind::Ln: {
        double v = eval_node(e.child_a());
        if (v <= 0.0) fail("logarithm of a non-positive value", e);
        return std::log(v);
      }
      case ExprKind::Exp:
        return std::exp(eval_node(e.child_a()));
      case ExprKind::Sqrt: {
        double v = eval_node(e.child_a());
        if (v < 0.0) fail("square root of a negative value", e);
        return std::sqrt(v);
      }
      case ExprKind::Sin:
        return std::sin(eval_node(e.child_a()));
      case ExprKind::Cos:
        return std::cos(eval_node(e.child_a()));
    }
    fail("unknown node", e);
    return 0.0;
  }

  [[noreturn]] void fail(const std::string& reason, const Expr& e) const {
    std::string sub = to_string(e, coords_);
    if (sub.size() > 96) sub = sub.substr(0, 93) + "...";
    throw EvalError(reason, sub);
  }

  Point p_;
  CoordNames coords_;
  std::unordered_map<const Expr::Node*, double> memo_;
  std::vector<std::shared_ptr<const Expr::Node>> retained_;
};

inline double eval(const Expr& e, const Point& p,
                   const CoordNames& coords = kDefaultCoords) {
  EvalContext ctx(p, coords);
  return ctx.eval(e);
}

// ---------------------------------------------------------------------------
// Differentiation. Exact, rule-based; memoized per (node, coordinate) so a
// cache shared across a whole tensor assembly keeps the output DAG compact.

class DiffCache {
 public:
  Expr diff(const Expr& e, int coord) {
    Key key{e.node(), coord};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Expr d = compute(e, coord);
    memo_.emplace(key, d);
    retained_.push_back(e.share());  // keep addresses stable while memoized
    return d;
  }

 private:
  struct Key {
    const Expr::Node* node;
    int coord;
    bool operator==(const Key& o) const { return node == o.node && coord == o.coord; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<const void*>()(k.node) * 31u + static_cast<std::size_t>(k.coord);
    }
  };

  Expr compute(const Expr& e, int c) {
    switch (e.kind()) {
      case ExprKind::Constant:
        return Expr::constant(0.0);
      case ExprKind::Coord:
        return Expr::constant(e.coord_index() == c ? 1.0 : 0.0);
      case ExprKind::Neg:
        return -diff(e.child_a(), c);
      case ExprKind::Add:
        return diff(e.child_a(), c) + diff(e.child_b(), c);
      case ExprKind::Sub:
        return diff(e.child_a(), c) - diff(e.child_b(), c);
      case ExprKind::Mul:
        return diff(e.child_a(), c) * e.child_b() + e.child_a() * diff(e.child_b(), c);
      case ExprKind::Div: {
        Expr a = e.child_a();
        Expr b = e.child_b();
        return (diff(a, c) * b - a * diff(b, c)) / pow_int(b, 2);
      }
      case ExprKind::Pow: {
        Expr base = e.child_a();
        int n = e.exponent();
        return Expr::constant(static_cast<double>(n)) * pow_int(base, n - 1) *
               diff(base, c);
      }
      case ExprKind::Ln:
        return diff(e.child_a(), c) / e.child_a();
      case ExprKind::Exp:
        return diff(e.child_a(), c) * e;
      case ExprKind::Sqrt:
        return diff(e.child_a(), c) / (Expr::constant(2.0) * e);
      case ExprKind::Sin:
        return diff(e.child_a(), c) * cos(e.child_a());
      case ExprKind::Cos:
        return -(diff(e.child_a(), c) * sin(e.child_a()));
    }
    return Expr::constant(0.0);
  }

  std::unordered_map<Key, Expr, KeyHash> memo_;
  std::vector<std::shared_ptr<const Expr::Node>> retained_;
};

inline Expr diff(const Expr& e, int coord) {
  DiffCache cache;
  return cache.diff(e, coord);
}

// ---------------------------------------------------------------------------
// Simplification. Rebuilds through the folding constructors; value-preserving
// on the common domain. A Simplifier shared across several expressions keeps
// subtree sharing intact.

class Simplifier {
 public:
  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.node());
    if (it != memo_.end()) return it->second;
    Expr r = rebuild(e);
    memo_.emplace(e.node(), r);
    retained_.push_back(e.share());  // keep addresses stable while memoized
    return r;
  }

 private:
  Expr rebuild(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Constant:
      case ExprKind::Coord:
        return e;
      case ExprKind::Neg:
        return -(*this)(e.child_a());
      case ExprKind::Add:
        return (*this)(e.child_a()) + (*this)(e.child_b());
      case ExprKind::Sub:
        return (*this)(e.child_a()) - (*this)(e.child_b());
      case ExprKind::Mul:
        return (*this)(e.child_a()) * (*this)(e.child_b());
      case ExprKind::Div:
        return (*this)(e.child_a()) / (*this)(e.child_b());
      case ExprKind::Pow:
        return pow_int((*this)(e.child_a()), e.exponent());
      case ExprKind::Ln:
        return ln((*this)(e.child_a()));
      case ExprKind::Exp:
        return exp((*this)(e.child_a()));
      case ExprKind::Sqrt:
        return sqrt((*this)(e.child_a()));
      case ExprKind::Sin:
        return sin((*this)(e.child_a()));
      case ExprKind::Cos:
        return cos((*this)(e.child_a()));
    }
    return e;
  }

  std::unordered_map<const Expr::Node*, Expr> memo_;
  std::vector<std::shared_ptr<const Expr::Node>> retained_;
};

inline Expr simplify(const Expr& e) {
  Simplifier s;
  return s(e);
}

inline bool structurally_equal(const Expr& x, const Expr& y) {
  if (x.node() == y.node()) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case ExprKind::Constant:
      return x.constant_value() == y.constant_value();
    case ExprKind::Coord:
      return x.coord_index() == y.coord_index();
    case ExprKind::Pow:
      return x.exponent() == y.exponent() &&
             structurally_equal(x.child_a(), y.child_a());
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
      return structurally_equal(x.child_a(), y.child_a()) &&
             structurally_equal(x.child_b(), y.child_b());
    default:
      return structurally_equal(x.child_a(), y.child_a());
  }
}

inline bool depends_on(const Expr& e, int coord) {
  std::unordered_set<const Expr::Node*> seen;
  std::vector<const Expr::Node*> stack{e.node()};
  while (!stack.empty()) {
    const Expr::Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->kind == ExprKind::Coord && n->aux == coord) return true;
    if (n->a) stack.push_back(n->a.get());
    if (n->b) stack.push_back(n->b.get());
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parsing. Grammar (whitespace insignificant):
//
//   expression := term (('+' | '-') term)*
//   term       := unary (('*' | '/') unary)*
//   unary      := '-' unary | power
//   power      := atom ('^' unary)?          right-associative
//   atom       := number | coordinate | function '(' expression ')'
//               | '(' expression ')'
//   function   := 'ln' | 'exp' | 'sqrt' | 'sin' | 'cos'
//
// '^' binds tighter than unary minus; the exponent must fold to a constant.
// Integer exponents become Pow nodes, anything else rewrites to
// exp(k*ln(base)). A unary minus in front of a numeric literal folds into
// the literal; no other folding happens at parse time.

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const CoordNames& coords)
      : text_(text), coords_(coords) {}

  Expr run() {
    Expr e = expression();
    skip_ws();
    if (pos_ < text_.size()) syntax("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void syntax(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, pos_ + 1, msg);
  }
  [[noreturn]] void syntax_at(std::size_t pos, const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, pos + 1, msg);
  }
  [[noreturn]] void unknown_at(std::size_t pos, const std::string& msg) const {
    throw ParseError(ParseError::Kind::UnknownIdentifier, pos + 1, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
            text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      skip_ws();
      if (consume('+')) {
        e = Expr::make_binary(ExprKind::Add, e, term());
      } else if (consume('-')) {
        e = Expr::make_binary(ExprKind::Sub, e, term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        e = Expr::make_binary(ExprKind::Mul, e, unary());
      } else if (consume('/')) {
        e = Expr::make_binary(ExprKind::Div, e, unary());
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    skip_ws();
    if (consume('-')) {
      Expr e = unary();
      if (e.kind() == ExprKind::Constant) return Expr::constant(-e.constant_value());
      return Expr::make_unary(ExprKind::Neg, e);
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    skip_ws();
    if (!consume('^')) return base;
    skip_ws();
    std::size_t expo_pos = pos_;
    Expr raw = unary();
    Expr folded = simplify(raw);
    if (folded.kind() != ExprKind::Constant) {
      syntax_at(expo_pos, "exponent must be a constant");
    }
    double v = folded.constant_value();
    double rounded = std::nearbyint(v);
    if (v == rounded && std::abs(v) <= 1e9) {
      return Expr::make_pow(base, static_cast<int>(rounded));
    }
    return Expr::make_unary(
        ExprKind::Exp,
        Expr::make_binary(ExprKind::Mul, Expr::constant(v),
                          Expr::make_unary(ExprKind::Ln, base)));
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) syntax("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      skip_ws();
      if (!consume(')')) syntax("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    syntax("unexpected character");
  }

  Expr number() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t mark = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      } else {
        pos_ = mark;  // not an exponent suffix
      }
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec == std::errc::result_out_of_range || !std::isfinite(v)) {
      syntax_at(start, "number literal out of range");
    }
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      syntax_at(start, "malformed number");
    }
    return Expr::constant(v);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    skip_ws();
    if (peek() == '(') {
      ExprKind k;
      if (name == "ln") k = ExprKind::Ln;
      else if (name == "exp") k = ExprKind::Exp;
      else if (name == "sqrt") k = ExprKind::Sqrt;
      else if (name == "sin") k = ExprKind::Sin;
      else if (name == "cos") k = ExprKind::Cos;
      else unknown_at(start, "unknown function '" + name + "'");
      ++pos_;  // '('
      Expr arg = expression();
      skip_ws();
      if (!consume(')')) syntax("expected ')'");
      return Expr::make_unary(k, arg);
    }
    for (int i = 0; i < kDim; ++i) {
      if (coords_[static_cast<std::size_t>(i)] == name) return Expr::coord(i);
    }
    unknown_at(start, "unknown identifier '" + name + "'");
  }

  std::string_view text_;
  const CoordNames& coords_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text, const CoordNames& coords = kDefaultCoords) {
  detail::Parser p(text, coords);
  return p.run();
}

}  // namespace contact3
