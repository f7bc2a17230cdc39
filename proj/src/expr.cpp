#include "fpk/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_set>

namespace fpk {

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(std::vector<std::string> coordinates, std::vector<Interval> box, std::uint64_t seed)
    : coordinates_(std::move(coordinates)), box_(std::move(box)), seed_(seed) {
    if (coordinates_.empty())
        throw DimensionMismatch("chart dimension must be >= 1");
    if (box_.size() != coordinates_.size())
        throw DimensionMismatch("chart box must list one interval per coordinate");
    std::unordered_set<std::string> seen;
    for (const auto& name : coordinates_)
        if (!seen.insert(name).second)
            throw DimensionMismatch("duplicate coordinate name '" + name + "'");
    for (std::size_t i = 0; i < box_.size(); ++i)
        if (!(box_[i].hi > box_[i].lo))
            throw DimensionMismatch("sampling interval for '" + coordinates_[i] +
                                    "' must have positive length");
}

int Chart::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < coordinates_.size(); ++i)
        if (coordinates_[i] == name) return static_cast<int>(i);
    return -1;
}

Point Chart::midpoint() const {
    Point p;
    for (int i = 0; i < dimension(); ++i)
        p[coordinates_[i]] = 0.5 * (box_[i].lo + box_[i].hi);
    return p;
}

bool Chart::operator==(const Chart& other) const {
    return coordinates_ == other.coordinates_ && box_ == other.box_ && seed_ == other.seed_;
}

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<Interval> box,
                    std::uint64_t seed) {
    return std::make_shared<const Chart>(std::move(coordinates), std::move(box), seed);
}

ChartPtr make_chart(std::vector<std::string> coordinates, Interval common_box,
                    std::uint64_t seed) {
    std::vector<Interval> box(coordinates.size(), common_box);
    return make_chart(std::move(coordinates), std::move(box), seed);
}

ChartPtr extend_chart(const Chart& base, int extra, const std::string& prefix,
                      const std::vector<Interval>& extra_box) {
    if (extra < 0 || static_cast<std::size_t>(extra) != extra_box.size())
        throw DimensionMismatch("extend_chart: one interval per new coordinate required");
    std::vector<std::string> names = base.coordinates();
    std::vector<Interval> box = base.box();
    for (int i = 0; i < extra; ++i) {
        std::string name = prefix + std::to_string(i + 1);
        if (base.index_of(name) >= 0)
            throw DimensionMismatch("extend_chart: coordinate '" + name +
                                    "' collides with the base chart");
        names.push_back(std::move(name));
        box.push_back(extra_box[i]);
    }
    return make_chart(std::move(names), std::move(box), base.seed());
}

// ---------------------------------------------------------------------------
// Expr nodes

struct Expr::Node {
    ExprKind kind;
    double value = 0.0;   // Constant
    std::string name;     // Coordinate
    int exponent = 0;     // Pow
    NodePtr a, b;
};

namespace {

Expr::NodePtr make_const(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = ExprKind::Constant;
    n->value = v;
    return n;
}

const Expr::NodePtr& zero_node() {
    static const Expr::NodePtr z = make_const(0.0);
    return z;
}

const Expr::NodePtr& one_node() {
    static const Expr::NodePtr o = make_const(1.0);
    return o;
}

bool node_is_const(const Expr::NodePtr& n, double v) {
    return n->kind == ExprKind::Constant && n->value == v;
}

Expr::NodePtr make_unary(ExprKind k, Expr::NodePtr a) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    return n;
}

Expr::NodePtr make_binary(ExprKind k, Expr::NodePtr a, Expr::NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

} // namespace

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(double value) : node_(value == 0.0 ? zero_node()
                                : value == 1.0 ? one_node()
                                               : make_const(value)) {}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::coordinate(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Coordinate;
    n->name = std::move(name);
    return Expr(NodePtr(std::move(n)));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
const std::string& Expr::coordinate_name() const { return node_->name; }
int Expr::exponent() const { return node_->exponent; }
const Expr Expr::first_child() const { return Expr(node_->a); }
const Expr Expr::second_child() const { return Expr(node_->b); }
bool Expr::is_zero() const { return node_is_const(node_, 0.0); }
bool Expr::is_one() const { return node_is_const(node_, 1.0); }

bool Expr::same_tree(const Expr& other) const {
    struct Rec {
        static bool eq(const Node* x, const Node* y) {
            if (x == y) return true;
            if (x->kind != y->kind) return false;
            switch (x->kind) {
                case ExprKind::Constant: return x->value == y->value;
                case ExprKind::Coordinate: return x->name == y->name;
                case ExprKind::Pow:
                    return x->exponent == y->exponent && eq(x->a.get(), y->a.get());
                case ExprKind::Neg:
                case ExprKind::Sin:
                case ExprKind::Cos:
                case ExprKind::Exp: return eq(x->a.get(), y->a.get());
                default:
                    return eq(x->a.get(), y->a.get()) && eq(x->b.get(), y->b.get());
            }
        }
    };
    return Rec::eq(node_.get(), other.node_.get());
}

// ---------------------------------------------------------------------------
// Smart constructors (local constant folding only)

namespace {

// Splits e into c * x with c the leading constant factor (1 when absent).
std::pair<double, Expr> constant_prefactor(const Expr& e) {
    if (e.kind() == ExprKind::Neg) return {-1.0, e.first_child()};
    if (e.kind() == ExprKind::Mul && e.first_child().is_constant())
        return {e.first_child().constant_value(), e.second_child()};
    return {1.0, e};
}

// a + sign*b as (ca + sign*cb) x when both sides are multiples of one tree x.
bool combine_like(const Expr& a, const Expr& b, double sign, Expr& out) {
    auto [ca, xa] = constant_prefactor(a);
    auto [cb, xb] = constant_prefactor(b);
    if (!xa.same_tree(xb)) return false;
    double c = ca + sign * cb;
    if (!std::isfinite(c)) return false;
    out = Expr(c) * xa;
    return true;
}

} // namespace

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant()) {
        double v = a.constant_value() + b.constant_value();
        if (std::isfinite(v)) return Expr(v);
    }
    if (Expr combined; combine_like(a, b, 1.0, combined)) return combined;
    return Expr(make_binary(ExprKind::Add, a.node(), b.node()));
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    if (a.is_constant() && b.is_constant()) {
        double v = a.constant_value() - b.constant_value();
        if (std::isfinite(v)) return Expr(v);
    }
    if (Expr combined; combine_like(a, b, -1.0, combined)) return combined;
    return Expr(make_binary(ExprKind::Sub, a.node(), b.node()));
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr(0.0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (a.is_constant() && b.is_constant()) {
        double v = a.constant_value() * b.constant_value();
        if (std::isfinite(v)) return Expr(v);
    }
    if (b.is_constant()) return b * a;
    if (a.is_constant()) {
        if (b.kind() == ExprKind::Neg) return Expr(-a.constant_value()) * b.first_child();
        if (b.kind() == ExprKind::Mul && b.first_child().is_constant()) {
            double v = a.constant_value() * b.first_child().constant_value();
            if (std::isfinite(v)) return Expr(v) * b.second_child();
        }
    }
    return Expr(make_binary(ExprKind::Mul, a.node(), b.node()));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_zero()) return Expr(0.0);
    if (b.is_one()) return a;
    if (b.is_constant() && std::abs(b.constant_value()) >= kDivisionGuard) {
        double inv = 1.0 / b.constant_value();
        if (std::isfinite(inv)) return Expr(inv) * a;
    }
    return Expr(make_binary(ExprKind::Div, a.node(), b.node()));
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr(-a.constant_value());
    if (a.kind() == ExprKind::Neg) return a.first_child();
    if (a.kind() == ExprKind::Mul && a.first_child().is_constant())
        return Expr(-a.first_child().constant_value()) * a.second_child();
    return Expr(make_unary(ExprKind::Neg, a.node()));
}

Expr& operator+=(Expr& a, const Expr& b) { a = a + b; return a; }
Expr& operator-=(Expr& a, const Expr& b) { a = a - b; return a; }
Expr& operator*=(Expr& a, const Expr& b) { a = a * b; return a; }

Expr sin(const Expr& a) {
    if (a.is_constant()) return Expr(std::sin(a.constant_value()));
    return Expr(make_unary(ExprKind::Sin, a.node()));
}

Expr cos(const Expr& a) {
    if (a.is_constant()) return Expr(std::cos(a.constant_value()));
    return Expr(make_unary(ExprKind::Cos, a.node()));
}

Expr exp(const Expr& a) {
    if (a.is_constant()) {
        double v = std::exp(a.constant_value());
        if (std::isfinite(v)) return Expr(v);
    }
    return Expr(make_unary(ExprKind::Exp, a.node()));
}

Expr pow(const Expr& base, int exponent) {
    if (exponent < 0) throw Error("pow: negative exponent (use explicit division)");
    if (exponent == 0) return Expr(1.0);
    if (exponent == 1) return base;
    if (base.is_zero()) return Expr(0.0);
    if (base.is_one()) return Expr(1.0);
    if (base.is_constant()) {
        double v = std::pow(base.constant_value(), exponent);
        if (std::isfinite(v)) return Expr(v);
    }
    auto n = std::make_shared<Expr::Node>();
    n->kind = ExprKind::Pow;
    n->exponent = exponent;
    n->a = base.node();
    return Expr(Expr::NodePtr(std::move(n)));
}

// ---------------------------------------------------------------------------
// Differentiation (memoized over the DAG so sharing is preserved)

namespace {

Expr diff_node(const Expr::Node* n, std::string_view coord,
               std::unordered_map<const Expr::Node*, Expr>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;

    Expr result;
    switch (n->kind) {
        case ExprKind::Constant: result = Expr(0.0); break;
        case ExprKind::Coordinate: result = Expr(n->name == coord ? 1.0 : 0.0); break;
        case ExprKind::Neg: result = -diff_node(n->a.get(), coord, memo); break;
        case ExprKind::Sin:
            result = cos(Expr(n->a)) * diff_node(n->a.get(), coord, memo);
            break;
        case ExprKind::Cos:
            result = -(sin(Expr(n->a)) * diff_node(n->a.get(), coord, memo));
            break;
        case ExprKind::Exp:
            result = exp(Expr(n->a)) * diff_node(n->a.get(), coord, memo);
            break;
        case ExprKind::Add:
            result = diff_node(n->a.get(), coord, memo) + diff_node(n->b.get(), coord, memo);
            break;
        case ExprKind::Sub:
            result = diff_node(n->a.get(), coord, memo) - diff_node(n->b.get(), coord, memo);
            break;
        case ExprKind::Mul: {
            Expr da = diff_node(n->a.get(), coord, memo);
            Expr db = diff_node(n->b.get(), coord, memo);
            result = da * Expr(n->b) + Expr(n->a) * db;
            break;
        }
        case ExprKind::Div: {
            Expr da = diff_node(n->a.get(), coord, memo);
            Expr db = diff_node(n->b.get(), coord, memo);
            result = (da * Expr(n->b) - Expr(n->a) * db) / pow(Expr(n->b), 2);
            break;
        }
        case ExprKind::Pow: {
            Expr da = diff_node(n->a.get(), coord, memo);
            result = Expr(static_cast<double>(n->exponent)) * pow(Expr(n->a), n->exponent - 1) * da;
            break;
        }
    }
    memo.emplace(n, result);
    return result;
}

} // namespace

Expr differentiate(const Expr& e, std::string_view coordinate) {
    std::unordered_map<const Expr::Node*, Expr> memo;
    return diff_node(e.node().get(), coordinate, memo);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

void EvalScratch::bind(const Point& p) {
    coords_.clear();
    for (const auto& [name, value] : p) coords_.emplace_back(name, value);
    memo_.clear();
}

double EvalScratch::eval_node(const Expr::Node* n) {
    switch (n->kind) {
        case ExprKind::Constant: return n->value;
        case ExprKind::Coordinate: {
            for (const auto& [name, value] : coords_)
                if (name == n->name) return value;
            throw UnknownCoordinate(n->name);
        }
        default: break;
    }
    if (auto it = memo_.find(n); it != memo_.end()) return it->second;
    double r = 0.0;
    switch (n->kind) {
        case ExprKind::Neg: r = -eval_node(n->a.get()); break;
        case ExprKind::Sin: r = std::sin(eval_node(n->a.get())); break;
        case ExprKind::Cos: r = std::cos(eval_node(n->a.get())); break;
        case ExprKind::Exp: r = std::exp(eval_node(n->a.get())); break;
        case ExprKind::Add: r = eval_node(n->a.get()) + eval_node(n->b.get()); break;
        case ExprKind::Sub: r = eval_node(n->a.get()) - eval_node(n->b.get()); break;
        case ExprKind::Mul: r = eval_node(n->a.get()) * eval_node(n->b.get()); break;
        case ExprKind::Div: {
            double num = eval_node(n->a.get());
            double den = eval_node(n->b.get());
            if (std::abs(den) < kDivisionGuard) {
                std::string what = to_string(Expr(n->b));
                if (what.size() > 120) what = what.substr(0, 117) + "...";
                throw DivisionNearZero(what);
            }
            r = num / den;
            break;
        }
        case ExprKind::Pow: {
            double base = eval_node(n->a.get());
            r = 1.0;
            for (int i = 0; i < n->exponent; ++i) r *= base;
            break;
        }
        default: break;
    }
    memo_.emplace(n, r);
    return r;
}

double EvalScratch::eval(const Expr& e) { return eval_node(e.node().get()); }

} // namespace detail

double evaluate(const Expr& e, const Point& p) {
    detail::EvalScratch scratch;
    scratch.bind(p);
    return scratch.eval(e);
}

std::size_t dag_size(const Expr& e) {
    std::unordered_set<const Expr::Node*> seen;
    struct Rec {
        static void walk(const Expr::Node* n, std::unordered_set<const Expr::Node*>& seen) {
            if (!seen.insert(n).second) return;
            if (n->a) walk(n->a.get(), seen);
            if (n->b) walk(n->b.get(), seen);
        }
    };
    Rec::walk(e.node().get(), seen);
    return seen.size();
}

// ---------------------------------------------------------------------------
// Printing. Parenthesization is chosen so parse_expr(to_string(e)) rebuilds the
// identical tree (document emit/load reaches a fixed point after one cycle).

namespace {

// Precedence levels: Add/Sub 1, Mul/Div/Neg 2, Pow 3, atoms 4.
int node_precedence(const Expr::Node* n) {
    switch (n->kind) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div:
        case ExprKind::Neg: return 2;
        case ExprKind::Pow: return 3;
        default: return 4;
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void print_node(const Expr::Node* n, int min_prec, std::string& out) {
    const int prec = node_precedence(n);
    const bool parens = prec < min_prec ||
                        (n->kind == ExprKind::Constant && n->value < 0 && min_prec > 1);
    if (parens) out += '(';
    switch (n->kind) {
        case ExprKind::Constant: out += format_double(n->value); break;
        case ExprKind::Coordinate: out += n->name; break;
        case ExprKind::Neg:
            out += '-';
            print_node(n->a.get(), 2, out);
            break;
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
            out += n->kind == ExprKind::Sin ? "sin" : n->kind == ExprKind::Cos ? "cos" : "exp";
            out += '(';
            print_node(n->a.get(), 0, out);
            out += ')';
            break;
        case ExprKind::Add:
            print_node(n->a.get(), 1, out);
            out += " + ";
            print_node(n->b.get(), 2, out);
            break;
        case ExprKind::Sub:
            print_node(n->a.get(), 1, out);
            out += " - ";
            print_node(n->b.get(), 2, out);
            break;
        case ExprKind::Mul:
            print_node(n->a.get(), 2, out);
            out += '*';
            print_node(n->b.get(), 3, out);
            break;
        case ExprKind::Div:
            print_node(n->a.get(), 2, out);
            out += '/';
            print_node(n->b.get(), 3, out);
            break;
        case ExprKind::Pow:
            print_node(n->a.get(), 4, out);
            out += '^';
            out += std::to_string(n->exponent);
            break;
    }
    if (parens) out += ')';
}

} // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print_node(e.node().get(), 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over the grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' nonneg-integer)?
//   base   := number | identifier | '(' expr ')' | ('sin'|'cos'|'exp') '(' expr ')'

namespace {

class Parser {
public:
    Parser(const std::string& text, const Chart& chart) : text_(text), chart_(chart) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError(pos_, "unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    const std::string& text_;
    const Chart& chart_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek_char(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool consume_char(char c) {
        if (peek_char(c)) { ++pos_; return true; }
        return false;
    }

    Expr parse_sum() {
        Expr e = parse_term();
        for (;;) {
            if (consume_char('+')) e = e + parse_term();
            else if (consume_char('-')) e = e - parse_term();
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (consume_char('*')) e = e * parse_factor();
            else if (consume_char('/')) e = e / parse_factor();
            else return e;
        }
    }

    Expr parse_factor() {
        if (consume_char('-')) return -parse_factor();
        Expr base = parse_base();
        if (consume_char('^')) {
            skip_ws();
            std::size_t start = pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw SyntaxError(pos_, "exponent must be a non-negative integer");
            long exponent = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                exponent = exponent * 10 + (text_[pos_] - '0');
                if (exponent > 1000000) throw SyntaxError(start, "exponent too large");
                ++pos_;
            }
            return pow(base, static_cast<int>(exponent));
        }
        return base;
    }

    Expr parse_base() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!consume_char(')')) throw SyntaxError(pos_, "expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError(pos_, "unexpected character '" + std::string(1, c) + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            bool any = false;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                any = true;
            }
            return any;
        };
        bool int_part = digits();
        bool frac_part = false;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            frac_part = digits();
        }
        if (!int_part && !frac_part) throw SyntaxError(start, "malformed number");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (!digits()) throw SyntaxError(pos_, "malformed exponent");
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc())
            throw SyntaxError(start, "malformed number");
        return Expr(value);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (name == "sin" || name == "cos" || name == "exp") {
            if (!consume_char('(')) throw SyntaxError(pos_, "expected '(' after '" + name + "'");
            Expr arg = parse_sum();
            if (!consume_char(')')) throw SyntaxError(pos_, "expected ')'");
            return name == "sin" ? sin(arg) : name == "cos" ? cos(arg) : exp(arg);
        }
        if (chart_.index_of(name) < 0) throw UnknownCoordinate(name, start);
        return Expr::coordinate(std::move(name));
    }
};

} // namespace

Expr parse_expr(const std::string& text, const Chart& chart) {
    return Parser(text, chart).parse();
}

} // namespace fpk
