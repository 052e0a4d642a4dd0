#include "lts/parse.hpp"

#include <cctype>

namespace lts {

namespace {

class Parser {
public:
    Parser(const std::string& s, const TruncationGrid& g, Mode m) : s_(s), g_(g), mode_(m) {}

    TransSeries run() {
        TransSeries r = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        if (mode_ == Mode::floating) r = r.to_float();
        return r;
    }

private:
    const std::string& s_;
    TruncationGrid g_;
    Mode mode_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& msg) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
            if (s_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail(ErrorKind::parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) error(std::string("expected '") + c + "'");
    }
    TransSeries constant(const Coeff& c) const { return TransSeries::constant(g_, c); }

    TransSeries expr() {
        TransSeries r = term();
        for (;;) {
            if (eat('+')) r = add(r, term());
            else if (eat('-')) r = sub(r, term());
            else return r;
        }
    }
    TransSeries term() {
        TransSeries r = unary();
        for (;;) {
            if (eat('*')) {
                r = mul(r, unary());
            } else if (eat('/')) {
                std::size_t at = pos_;
                TransSeries d = unary();
                if (d.is_zero()) {
                    pos_ = at;
                    error("division by zero");
                }
                r = div(r, d);
            } else {
                return r;
            }
        }
    }
    TransSeries unary() {
        if (eat('-')) return neg(unary());
        if (eat('+')) return unary();
        return factor();
    }
    Q exponent() {
        skip();
        bool paren = eat('(');
        bool negative = eat('-');
        std::int64_t n = integer();
        std::int64_t d = 1;
        if (eat('/')) d = integer();
        if (d == 0) error("zero denominator in exponent");
        if (paren) expect(')');
        Q q(n, d);
        return negative ? -q : q;
    }
    std::int64_t integer() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) error("expected an integer");
        try {
            return std::stoll(s_.substr(start, pos_ - start));
        } catch (const std::out_of_range&) {
            pos_ = start;
            error("integer too large");
        }
    }
    TransSeries factor() {
        std::size_t at = pos_;
        auto [b, mono] = base();
        skip();
        if (!eat('^')) return b;
        Q e = exponent();
        try {
            if (mono) {
                auto [k, c] = leading_term(b);
                LKey l;
                for (int m = 0; m < kMaxDepth; ++m) {
                    Q v = Q(k.l.e[m]) * e;
                    if (!v.is_integer()) error("non-integer exponent of a logarithm");
                    l.e[m] = std::int32_t(v.num());
                }
                return TransSeries::monomial(g_, Coeff(1), {k.z * e, l});
            }
            return pow_q(b, e);
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::parse) throw;
            pos_ = at;
            error(err.what());
        }
    }
    // base value, and whether it is a bare monomial z or l_m
    std::pair<TransSeries, bool> base() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return {number(), false};
        if (c == '(') {
            ++pos_;
            TransSeries r = expr();
            expect(')');
            return {r, false};
        }
        if (s_.compare(pos_, 4, "log(") == 0) {
            pos_ += 4;
            std::size_t at = pos_;
            TransSeries a = expr();
            expect(')');
            try {
                return {log_series(a), false};
            } catch (const Error& err) {
                pos_ = at;
                error(err.what());
            }
        }
        if (s_.compare(pos_, 4, "exp(") == 0) {
            pos_ += 4;
            std::size_t at = pos_;
            TransSeries a = expr();
            expect(')');
            try {
                return {exp_series(a), false};
            } catch (const Error& err) {
                pos_ = at;
                error(err.what());
            }
        }
        if (c == 'z') {
            ++pos_;
            return {TransSeries::identity(g_), true};
        }
        if (c == 'i') {
            ++pos_;
            return {constant(Coeff(0, 1)), false};
        }
        if (c == 'l') {
            ++pos_;
            std::size_t at = pos_;
            std::int64_t m = integer();
            if (m < 1 || m > g_.depth) {
                pos_ = at;
                fail(ErrorKind::depth_overflow, "l" + std::to_string(m) + " exceeds depth " + std::to_string(g_.depth));
            }
            return {TransSeries::ell(g_, int(m)), true};
        }
        error("unexpected '" + std::string(1, c) + "'");
    }
    TransSeries number() {
        std::size_t start = pos_;
        bool decimal = false;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' || s_[pos_] == 'e' ||
                ((s_[pos_] == '-' || s_[pos_] == '+') && decimal && s_[pos_ - 1] == 'e'))) {
            if (s_[pos_] == '.' || s_[pos_] == 'e') decimal = true;
            ++pos_;
        }
        std::string text = s_.substr(start, pos_ - start);
        bool imaginary = pos_ < s_.size() && s_[pos_] == 'i';
        if (imaginary) ++pos_;
        Coeff c;
        if (decimal) {
            double v;
            try {
                v = std::stod(text);
            } catch (const std::exception&) {
                pos_ = start;
                error("bad number '" + text + "'");
            }
            c = imaginary ? Coeff::from_float({0, v}) : Coeff::from_float(v);
        } else {
            mpq_class q(text);
            c = imaginary ? Coeff(mpq_class(0), q) : Coeff(q);
        }
        return constant(c);
    }
};

} // namespace

TransSeries parse_series(const std::string& text, const TruncationGrid& grid, Mode mode) {
    grid.validate();
    return Parser(text, grid, mode).run();
}

} // namespace lts
