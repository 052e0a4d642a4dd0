#include "lts/map_expr.hpp"

#include <cctype>
#include <vector>

#include "lts/errors.hpp"

namespace lts {

struct MapExpr::Node {
    enum class Op { num, var, add, sub, mul, div, neg, pow, fn } op;
    std::string fn;
    std::string re = "0", im = "0";  // literal text, kept for the extended-precision path
    std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodeP = std::shared_ptr<const MapExpr::Node>;
using Op = MapExpr::Node::Op;

NodeP make(Op op, std::vector<NodeP> kids = {}, std::string fn = {}) {
    auto n = std::make_shared<MapExpr::Node>();
    n->op = op;
    n->kids = std::move(kids);
    n->fn = std::move(fn);
    return n;
}

class MapParser {
public:
    explicit MapParser(const std::string& s) : s_(s) {}
    NodeP run() {
        NodeP r = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return r;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& msg) {
        fail(ErrorKind::parse, "column " + std::to_string(pos_ + 1) + ": " + msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    NodeP expr() {
        NodeP a = term();
        for (;;) {
            if (eat('+')) a = make(Op::add, {a, term()});
            else if (eat('-')) a = make(Op::sub, {a, term()});
            else return a;
        }
    }
    NodeP term() {
        NodeP a = unary();
        for (;;) {
            if (eat('*')) a = make(Op::mul, {a, unary()});
            else if (eat('/')) a = make(Op::div, {a, unary()});
            else return a;
        }
    }
    NodeP unary() {
        if (eat('-')) return make(Op::neg, {unary()});
        if (eat('+')) return unary();
        NodeP b = primary();
        if (eat('^')) return make(Op::pow, {b, unary()});
        return b;
    }
    NodeP primary() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (eat('(')) {
            NodeP r = expr();
            if (!eat(')')) error("expected ')'");
            return r;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string w = s_.substr(start, pos_ - start);
        if (w == "zeta" || w == "z") return make(Op::var);
        if (w == "i") {
            auto n = std::make_shared<MapExpr::Node>();
            n->op = Op::num;
            n->im = "1";
            return n;
        }
        if (w == "exp" || w == "log" || w == "sqrt" || w == "sin" || w == "cos") {
            if (!eat('(')) error("expected '(' after " + w);
            NodeP a = expr();
            if (!eat(')')) error("expected ')'");
            return make(Op::fn, {a}, w);
        }
        pos_ = start;
        error(w.empty() ? "unexpected '" + std::string(1, c) + "'" : "unknown name '" + w + "'");
    }
    NodeP number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ + 1 < s_.size() &&
            (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '-' || s_[pos_ + 1] == '+')) {
            pos_ += 2;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        std::string t = s_.substr(start, pos_ - start);
        if (t == ".") error("bad number");
        auto n = std::make_shared<MapExpr::Node>();
        n->op = Op::num;
        if (pos_ < s_.size() && s_[pos_] == 'i' &&
            !(pos_ + 1 < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_ + 1])))) {
            ++pos_;
            n->im = t;
        } else {
            n->re = t;
        }
        return n;
    }
};

template <class C>
C literal(const MapExpr::Node& n);
template <>
cd literal<cd>(const MapExpr::Node& n) { return {std::stod(n.re), std::stod(n.im)}; }
template <>
cx_hp literal<cx_hp>(const MapExpr::Node& n) {
    using R = boost::multiprecision::cpp_bin_float_100;
    return cx_hp(R(n.re), R(n.im));
}

template <class C>
C eval(const MapExpr::Node& n, const C& z) {
    switch (n.op) {
    case Op::num: return literal<C>(n);
    case Op::var: return z;
    case Op::add: return C(eval(*n.kids[0], z) + eval(*n.kids[1], z));
    case Op::sub: return C(eval(*n.kids[0], z) - eval(*n.kids[1], z));
    case Op::mul: return C(eval(*n.kids[0], z) * eval(*n.kids[1], z));
    case Op::div: return C(eval(*n.kids[0], z) / eval(*n.kids[1], z));
    case Op::neg: return C(-eval(*n.kids[0], z));
    case Op::pow: {
        C b = eval(*n.kids[0], z);
        const auto& e = *n.kids[1];
        // small integer powers by multiplication
        if (e.op == Op::num && e.im == "0" && e.re.find_first_not_of("0123456789") == std::string::npos &&
            e.re.size() < 3) {
            int k = std::stoi(e.re);
            C r(1);
            for (int i = 0; i < k; ++i) r *= b;
            return r;
        }
        return C(pow(b, eval(e, z)));
    }
    case Op::fn: {
        C a = eval(*n.kids[0], z);
        if (n.fn == "exp") return C(exp(a));
        if (n.fn == "log") return C(log(a));
        if (n.fn == "sqrt") return C(sqrt(a));
        if (n.fn == "sin") return C(sin(a));
        return C(cos(a));
    }
    }
    return z;
}

} // namespace

MapExpr MapExpr::parse(const std::string& text) {
    MapExpr m;
    m.root_ = MapParser(text).run();
    m.text_ = text;
    return m;
}

cd MapExpr::operator()(cd z) const { return eval(*root_, z); }
cx_hp MapExpr::operator()(const cx_hp& z) const { return eval(*root_, z); }

CMap MapExpr::as_map() const {
    auto r = root_;
    return [r](cd z) { return eval(*r, z); };
}

CMapHP MapExpr::as_map_hp() const {
    auto r = root_;
    return [r](cx_hp z) { return eval(*r, z); };
}

} // namespace lts
