#include "contacton/expr.hpp"

#include "contacton/common.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace contacton {

struct Expression::Node {
    enum Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind = Num;
    double value = 0.0;
    int var = -1;
    double (*fn)(double) = nullptr;
    std::shared_ptr<const Node> a, b;

    double eval(const double* v) const {
        switch (kind) {
            case Num: return value;
            case Var: return v[var];
            case Neg: return -a->eval(v);
            case Add: return a->eval(v) + b->eval(v);
            case Sub: return a->eval(v) - b->eval(v);
            case Mul: return a->eval(v) * b->eval(v);
            case Div: return a->eval(v) / b->eval(v);
            case Pow: return std::pow(a->eval(v), b->eval(v));
            case Call: return fn(a->eval(v));
        }
        return 0.0;
    }

    bool depends(int v) const {
        if (kind == Var) return var == v;
        return (a && a->depends(v)) || (b && b->depends(v));
    }

    bool constant() const {
        switch (kind) {
            case Num: return true;
            case Var: return false;
            case Neg:
            case Call: return a->constant();
            default: return a->constant() && b->constant();
        }
    }
};

namespace {

using NodeP = std::shared_ptr<const Expression::Node>;

class Parser {
public:
    Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

    NodeP parse() {
        NodeP n = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected trailing input");
        return n;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw Error("expression '" + s_ + "': " + what + " at offset " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    static NodeP make(Expression::Node::Kind k, NodeP a = nullptr, NodeP b = nullptr) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodeP expr() {
        NodeP n = term();
        for (;;) {
            if (eat('+')) n = make(Expression::Node::Add, n, term());
            else if (eat('-')) n = make(Expression::Node::Sub, n, term());
            else return n;
        }
    }
    NodeP term() {
        NodeP n = unary();
        for (;;) {
            if (eat('*')) n = make(Expression::Node::Mul, n, unary());
            else if (eat('/')) n = make(Expression::Node::Div, n, unary());
            else return n;
        }
    }
    NodeP unary() {
        if (eat('-')) return make(Expression::Node::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodeP power() {
        NodeP base = primary();
        if (eat('^')) return make(Expression::Node::Pow, base, unary());
        return base;
    }
    NodeP primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            NodeP n = expr();
            if (!eat(')')) fail("missing ')'");
            return n;
        }
        const char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(i_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            i_ += used;
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Num;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            const std::string id = s_.substr(start, i_ - start);
            if (eat('(')) {
                NodeP arg = expr();
                if (!eat(')')) fail("missing ')' after argument");
                auto n = std::make_shared<Expression::Node>();
                n->kind = Expression::Node::Call;
                n->a = arg;
                n->fn = function(id);
                return n;
            }
            auto n = std::make_shared<Expression::Node>();
            for (std::size_t k = 0; k < vars_.size(); ++k)
                if (vars_[k] == id) {
                    n->kind = Expression::Node::Var;
                    n->var = static_cast<int>(k);
                    return n;
                }
            n->kind = Expression::Node::Num;
            if (id == "pi") n->value = std::numbers::pi;
            else if (id == "e") n->value = std::numbers::e;
            else fail("unknown identifier '" + id + "'");
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    double (*function(const std::string& id) const)(double) {
        if (id == "sin") return [](double x) { return std::sin(x); };
        if (id == "cos") return [](double x) { return std::cos(x); };
        if (id == "tan") return [](double x) { return std::tan(x); };
        if (id == "exp") return [](double x) { return std::exp(x); };
        if (id == "log") return [](double x) { return std::log(x); };
        if (id == "sqrt") return [](double x) { return std::sqrt(x); };
        if (id == "abs") return [](double x) { return std::abs(x); };
        if (id == "sinh") return [](double x) { return std::sinh(x); };
        if (id == "cosh") return [](double x) { return std::cosh(x); };
        if (id == "tanh") return [](double x) { return std::tanh(x); };
        fail("unknown function '" + id + "'");
    }
};

}  // namespace

Expression::Expression(const std::string& source, const std::vector<std::string>& variables)
    : source_(source), root_(Parser(source, variables).parse()) {}

double Expression::eval(const double* values) const {
    if (!root_) throw Error("evaluating an empty expression");
    return root_->eval(values);
}

bool Expression::is_constant() const { return !root_ || root_->constant(); }

bool Expression::depends_on(int variable) const { return root_ && root_->depends(variable); }

}  // namespace contacton
