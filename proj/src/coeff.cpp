#include "lts/coeff.hpp"
#include "lts/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lts {

namespace {

int mono_cmp(const LogMono& a, const LogMono& b) {
    if (a == b) return 0;
    return a < b ? -1 : 1;
}

LogMono mono_mul(const LogMono& a, const LogMono& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    LogMono r;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) r.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first) r.push_back(b[j++]);
        else {
            std::int32_t e = a[i].second + b[j].second;
            if (e) r.push_back({a[i].first, e});
            ++i;
            ++j;
        }
    }
    return r;
}

void cr_mul(const CRat& a, const CRat& b, CRat& out) {
    if (a.is_real() && b.is_real()) {
        out.re = a.re * b.re;
        out.im = 0;
        return;
    }
    out.re = a.re * b.re - a.im * b.im;
    out.im = a.re * b.im + a.im * b.re;
}

double log_prime(std::uint32_t p) { return std::log(double(p)); }

// insert/accumulate into a sorted term vector
void accumulate(std::vector<Coeff::Term>& v, LogMono&& m, CRat&& c) {
    auto it = std::lower_bound(v.begin(), v.end(), m,
        [](const Coeff::Term& t, const LogMono& key) { return mono_cmp(t.mono, key) < 0; });
    if (it != v.end() && it->mono == m) {
        it->c.re += c.re;
        it->c.im += c.im;
        if (it->c.is_zero()) v.erase(it);
    } else if (!c.is_zero()) {
        v.insert(it, Coeff::Term{std::move(m), std::move(c)});
    }
}

} // namespace

std::string rat_str(const mpq_class& q) { return q.get_str(); }

mpq_class parse_rat(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) fail(ErrorKind::parse, "bad rational '" + s + "'");
    q.canonicalize();
    return q;
}

bool rational_root(const mpq_class& q, long num, long den, mpq_class& out) {
    // q^(num/den): take the den-th root of numerator and denominator
    if (den <= 0) return false;
    mpq_class base = q;
    if (sgn(base) == 0) {
        if (num <= 0) return false;
        out = 0;
        return true;
    }
    if (sgn(base) < 0 && den % 2 == 0) return false;
    mpz_class n = abs(base.get_num()), d = base.get_den();
    mpz_class rn, rd;
    if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), den)) return false;
    if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), den)) return false;
    mpq_class root(rn, rd);
    if (sgn(base) < 0) root = -root;
    mpq_class r = 1;
    long e = num < 0 ? -num : num;
    for (long i = 0; i < e; ++i) r *= root;
    if (num < 0) r = 1 / r;
    out = r;
    out.canonicalize();
    return true;
}

Coeff Coeff::from_float(std::complex<double> v) {
    Coeff c;
    c.float_ = true;
    c.fv_ = v;
    return c;
}

Coeff Coeff::log_symbol(std::uint32_t prime) {
    Coeff c;
    c.poly_.push_back({{{prime, 1}}, {mpq_class(1), mpq_class(0)}});
    return c;
}

Coeff Coeff::log_rational(const mpq_class& q) {
    if (sgn(q) <= 0) fail(ErrorKind::mode, "log of non-positive rational has no exact form");
    Coeff out;
    auto add_factor = [&](mpz_class n, int sign) {
        for (std::uint32_t p = 2; n > 1; ++p) {
            if (mpz_class(p) * p > n) {
                if (!n.fits_ulong_p() || n.get_ui() > 0xffffffffUL)
                    fail(ErrorKind::mode, "prime factor too large for a log symbol");
                out += Coeff(long(sign)) * log_symbol(std::uint32_t(n.get_ui()));
                break;
            }
            long e = 0;
            while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
                n /= p;
                ++e;
            }
            if (e) out += Coeff(long(sign * e)) * log_symbol(p);
        }
    };
    add_factor(q.get_num(), 1);
    add_factor(q.get_den(), -1);
    return out;
}

bool Coeff::is_constant() const {
    if (float_) return false;
    return poly_.empty() || (poly_.size() == 1 && poly_[0].mono.empty());
}

bool Coeff::is_rational() const { return is_constant() && (poly_.empty() || poly_[0].c.is_real()); }

bool Coeff::is_real() const {
    if (float_) return fv_.imag() == 0.0;
    for (auto& t : poly_)
        if (!t.c.is_real()) return false;
    return true;
}

bool Coeff::is_one() const {
    return is_rational() && !poly_.empty() && poly_[0].c.re == 1;
}

mpq_class Coeff::rational() const {
    if (!is_rational()) fail(ErrorKind::mode, "coefficient is not an exact rational");
    return poly_.empty() ? mpq_class(0) : poly_[0].c.re;
}

CRat Coeff::constant() const {
    if (!is_constant()) fail(ErrorKind::mode, "coefficient is not symbol-free exact");
    return poly_.empty() ? CRat{0, 0} : poly_[0].c;
}

std::complex<double> Coeff::value() const {
    if (float_) return fv_;
    std::complex<double> s(0, 0);
    for (auto& t : poly_) {
        double m = 1;
        for (auto& [p, e] : t.mono) m *= std::pow(log_prime(p), e);
        s += std::complex<double>(t.c.re.get_d(), t.c.im.get_d()) * m;
    }
    return s;
}

Coeff Coeff::conj() const {
    if (float_) return from_float(std::conj(fv_));
    Coeff r = *this;
    for (auto& t : r.poly_) t.c.im = -t.c.im;
    return r;
}

Coeff Coeff::operator-() const {
    if (float_) return from_float(-fv_);
    Coeff r = *this;
    for (auto& t : r.poly_) {
        t.c.re = -t.c.re;
        t.c.im = -t.c.im;
    }
    return r;
}

Coeff& Coeff::operator+=(const Coeff& b) {
    if (float_ || b.float_) {
        *this = from_float(value() + b.value());
        return *this;
    }
    if (poly_.empty()) { poly_ = b.poly_; return *this; }
    if (b.poly_.size() == 1 && poly_.size() == 1 && poly_[0].mono == b.poly_[0].mono) {
        poly_[0].c.re += b.poly_[0].c.re;
        poly_[0].c.im += b.poly_[0].c.im;
        if (poly_[0].c.is_zero()) poly_.clear();
        return *this;
    }
    for (auto& t : b.poly_) {
        LogMono m = t.mono;
        CRat c = t.c;
        accumulate(poly_, std::move(m), std::move(c));
    }
    return *this;
}

Coeff operator+(const Coeff& a, const Coeff& b) {
    Coeff r = a;
    r += b;
    return r;
}

Coeff operator-(const Coeff& a, const Coeff& b) { return a + (-b); }

Coeff operator*(const Coeff& a, const Coeff& b) {
    if (a.float_ || b.float_) return Coeff::from_float(a.value() * b.value());
    Coeff r;
    if (a.poly_.empty() || b.poly_.empty()) return r;
    if (a.poly_.size() == 1 && b.poly_.size() == 1) {
        Coeff::Term t;
        t.mono = mono_mul(a.poly_[0].mono, b.poly_[0].mono);
        cr_mul(a.poly_[0].c, b.poly_[0].c, t.c);
        r.poly_.push_back(std::move(t));
        return r;
    }
    for (auto& x : a.poly_)
        for (auto& y : b.poly_) {
            CRat c;
            cr_mul(x.c, y.c, c);
            accumulate(r.poly_, mono_mul(x.mono, y.mono), std::move(c));
        }
    return r;
}

Coeff Coeff::inverse() const {
    if (float_) return from_float(std::complex<double>(1, 0) / fv_);
    if (poly_.empty()) fail(ErrorKind::domain, "division by zero coefficient");
    if (!is_constant()) fail(ErrorKind::mode, "cannot invert a coefficient containing log symbols exactly");
    const CRat& c = poly_[0].c;
    if (c.is_real()) return Coeff(mpq_class(1 / c.re));
    mpq_class n = c.re * c.re + c.im * c.im;
    return Coeff(mpq_class(c.re / n), mpq_class(-c.im / n));
}

bool operator==(const Coeff& a, const Coeff& b) {
    if (a.float_ != b.float_) return false;
    if (a.float_) return a.fv_ == b.fv_;
    if (a.poly_.size() != b.poly_.size()) return false;
    for (std::size_t i = 0; i < a.poly_.size(); ++i) {
        if (a.poly_[i].mono != b.poly_[i].mono) return false;
        if (a.poly_[i].c.re != b.poly_[i].c.re || a.poly_[i].c.im != b.poly_[i].c.im) return false;
    }
    return true;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string crat_str(const CRat& c) {
    if (c.is_real()) return rat_str(c.re);
    if (sgn(c.re) == 0) return "(" + rat_str(c.im) + "i)";
    std::string im = rat_str(c.im);
    return "(" + rat_str(c.re) + (sgn(c.im) > 0 ? "+" : "") + im + "i)";
}

} // namespace

std::string Coeff::str() const {
    if (float_) {
        if (fv_.imag() == 0) return fmt_double(fv_.real());
        return "(" + fmt_double(fv_.real()) + (fv_.imag() >= 0 ? "+" : "") + fmt_double(fv_.imag()) + "i)";
    }
    if (poly_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < poly_.size(); ++i) {
        const auto& t = poly_[i];
        std::string part = crat_str(t.c);
        bool bare = !t.mono.empty() && (part == "1" || part == "-1");
        if (bare) part.pop_back();
        for (auto& [p, e] : t.mono) {
            if (!part.empty() && part != "-") part += "*";
            part += "log(" + std::to_string(p) + ")";
            if (e != 1) part += "^" + std::to_string(e);
        }
        if (i && part[0] != '-') s += "+";
        s += part;
    }
    if (poly_.size() > 1) s = "(" + s + ")";
    return s;
}

std::string Coeff::re_str() const {
    if (float_) return fmt_double(fv_.real());
    for (auto& t : poly_)
        if (t.mono.empty()) return rat_str(t.c.re);
    return "0";
}

std::string Coeff::im_str() const {
    if (float_) return fmt_double(fv_.imag());
    for (auto& t : poly_)
        if (t.mono.empty()) return rat_str(t.c.im);
    return "0";
}

} // namespace lts
