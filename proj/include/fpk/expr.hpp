#ifndef FPK_EXPR_HPP
#define FPK_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpk/chart.hpp"
#include "fpk/errors.hpp"

namespace fpk {

enum class ExprKind {
    Constant,
    Coordinate,
    Neg,
    Sin,
    Cos,
    Exp,
    Add,
    Sub,
    Mul,
    Div,
    Pow, // non-negative integer exponent
};

/// Evaluation guard: divisors with |value| below this threshold raise DivisionNearZero.
inline constexpr double kDivisionGuard = 1e-12;

/// Immutable scalar-field expression over named chart coordinates.
///
/// Expr is a value type over a shared tree; copies are cheap and all values are
/// safe to share across threads after construction. Construction applies local
/// constant folding (and the zero/one annihilator folds it implies) but no
/// algebraic simplification; equality of expressions is meant to be decided by
/// numeric sampling, not by normal forms.
class Expr {
public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    /// The zero constant.
    Expr();
    /// A real constant (implicit: lets Expr matrices interoperate with numeric code).
    Expr(double value);

    static Expr constant(double value);
    static Expr coordinate(std::string name);

    ExprKind kind() const;
    double constant_value() const;            // Constant only
    const std::string& coordinate_name() const; // Coordinate only
    int exponent() const;                     // Pow only
    const Expr first_child() const;           // unary arg / binary lhs / Pow base
    const Expr second_child() const;          // binary rhs

    bool is_constant() const { return kind() == ExprKind::Constant; }
    bool is_zero() const;
    bool is_one() const;

    /// Structural tree equality (shared subtrees compare by identity first).
    bool same_tree(const Expr& other) const;
    bool operator==(const Expr& other) const { return same_tree(other); }
    bool operator!=(const Expr& other) const { return !same_tree(other); }

    const NodePtr& node() const { return node_; }
    explicit Expr(NodePtr node) : node_(std::move(node)) {}

private:
    NodePtr node_;
};

// Smart constructors. All apply local constant folding.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr pow(const Expr& base, int exponent);

/// Parse `text` against the published grammar; identifiers must name chart coordinates.
/// Throws SyntaxError (with position) or UnknownCoordinate.
Expr parse_expr(const std::string& text, const Chart& chart);

/// Exact partial derivative with respect to the named coordinate.
Expr differentiate(const Expr& e, std::string_view coordinate);

/// Evaluate at a point covering every coordinate the expression references.
/// Throws DivisionNearZero when a divisor magnitude drops below kDivisionGuard,
/// and UnknownCoordinate when the point does not cover a referenced name.
double evaluate(const Expr& e, const Point& p);

/// Canonical text form; parse_expr of the result reproduces the same tree.
std::string to_string(const Expr& e);

/// Number of distinct nodes in the underlying DAG (diagnostic).
std::size_t dag_size(const Expr& e);

namespace detail {

/// Reusable evaluation scratch: memoizes shared subtrees per point, so DAG-shaped
/// expressions (nested solves share factors) evaluate in linear time. Rebinding
/// between points keeps bucket allocations.
class EvalScratch {
public:
    void bind(const Point& p);
    double eval(const Expr& e);

private:
    std::vector<std::pair<std::string, double>> coords_;
    std::unordered_map<const Expr::Node*, double> memo_;
    double eval_node(const Expr::Node* n);
};

} // namespace detail

} // namespace fpk




#endif
