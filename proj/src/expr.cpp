#include "nondivfem/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace ndfem {

struct Expr::Node {
    enum class Kind { number, var_x1, var_x2, var_alpha, add, sub, mul, div, pow, neg,
                      fn_sin, fn_cos, fn_sqrt };
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != text_.size())
            throw Error("expr: unexpected input at position " + std::to_string(pos_));
        return e;
    }

  private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expression() {
        NodePtr e = term();
        for (;;) {
            if (eat('+'))
                e = make(Node::Kind::add, e, term());
            else if (eat('-'))
                e = make(Node::Kind::sub, e, term());
            else
                return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (eat('*'))
                e = make(Node::Kind::mul, e, unary());
            else if (eat('/'))
                e = make(Node::Kind::div, e, unary());
            else
                return e;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make(Node::Kind::neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return make(Node::Kind::pow, base, unary());  // right-assoc
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (eat('(')) {
            NodePtr e = expression();
            if (!eat(')')) throw Error("expr: missing ')'");
            return e;
        }
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw Error("expr: unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        std::size_t end;
        const double v = std::stod(text_.substr(pos_), &end);
        pos_ += end;
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "x1") return make(Node::Kind::var_x1);
        if (name == "x2") return make(Node::Kind::var_x2);
        if (name == "alpha") return make(Node::Kind::var_alpha);
        if (name == "pi") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::number;
            n->value = M_PI;
            return n;
        }
        if (name == "sin" || name == "cos" || name == "sqrt") {
            if (!eat('(')) throw Error("expr: expected '(' after " + name);
            NodePtr arg = expression();
            if (!eat(')')) throw Error("expr: missing ')' after " + name + " argument");
            const Node::Kind k = name == "sin"   ? Node::Kind::fn_sin
                                 : name == "cos" ? Node::Kind::fn_cos
                                                 : Node::Kind::fn_sqrt;
            return make(k, arg);
        }
        throw Error("expr: unknown identifier '" + name + "'");
    }
};

double eval_node(const Node& n, double x1, double x2, double alpha) {
    switch (n.kind) {
        case Node::Kind::number: return n.value;
        case Node::Kind::var_x1: return x1;
        case Node::Kind::var_x2: return x2;
        case Node::Kind::var_alpha: return alpha;
        case Node::Kind::add: return eval_node(*n.lhs, x1, x2, alpha) + eval_node(*n.rhs, x1, x2, alpha);
        case Node::Kind::sub: return eval_node(*n.lhs, x1, x2, alpha) - eval_node(*n.rhs, x1, x2, alpha);
        case Node::Kind::mul: return eval_node(*n.lhs, x1, x2, alpha) * eval_node(*n.rhs, x1, x2, alpha);
        case Node::Kind::div: return eval_node(*n.lhs, x1, x2, alpha) / eval_node(*n.rhs, x1, x2, alpha);
        case Node::Kind::pow:
            return std::pow(eval_node(*n.lhs, x1, x2, alpha), eval_node(*n.rhs, x1, x2, alpha));
        case Node::Kind::neg: return -eval_node(*n.lhs, x1, x2, alpha);
        case Node::Kind::fn_sin: return std::sin(eval_node(*n.lhs, x1, x2, alpha));
        case Node::Kind::fn_cos: return std::cos(eval_node(*n.lhs, x1, x2, alpha));
        case Node::Kind::fn_sqrt: return std::sqrt(eval_node(*n.lhs, x1, x2, alpha));
    }
    throw Error("expr: corrupt node");
}

bool node_uses_alpha(const Node& n) {
    if (n.kind == Node::Kind::var_alpha) return true;
    if (n.lhs && node_uses_alpha(*n.lhs)) return true;
    if (n.rhs && node_uses_alpha(*n.rhs)) return true;
    return false;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.root_ = Parser(text).run();
    return e;
}

double Expr::eval(double x1, double x2, double alpha) const {
    if (!root_) throw Error("expr: empty expression");
    return eval_node(*root_, x1, x2, alpha);
}

bool Expr::uses_alpha() const { return root_ && node_uses_alpha(*root_); }

}  // namespace ndfem
