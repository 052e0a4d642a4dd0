#ifndef LTS_COEFF_HPP
#define LTS_COEFF_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>
#include <gmpxx.h>

namespace lts {

// Product of formal symbols log p (p prime) with integer powers, sorted by p.
using LogMono = std::vector<std::pair<std::uint32_t, std::int32_t>>;

struct CRat {
    mpq_class re, im;
    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
};

// Exact coefficients live in Q(i)[log 2, log 3, log 5, ...]: logs of positive
// rationals appear once l_m (m >= 2) is composed with z^alpha, so plain Q(i)
// is not closed under the operations we need. Float coefficients are complex
// doubles with no exactness claim.
class Coeff {
public:
    struct Term {
        LogMono mono;
        CRat c;
    };

    Coeff() = default;
    Coeff(long v) { if (v) poly_.push_back({{}, {mpq_class(v), 0}}); }
    Coeff(const mpq_class& v) { if (sgn(v)) poly_.push_back({{}, {v, 0}}); }
    Coeff(const mpq_class& re, const mpq_class& im) {
        if (sgn(re) || sgn(im)) poly_.push_back({{}, {re, im}});
    }
    static Coeff from_float(std::complex<double> v);
    static Coeff rat(long n, long d) {
        mpq_class q(n, d);
        q.canonicalize();
        return Coeff(q);
    }
    // log q for rational q > 0, expanded over primes
    static Coeff log_rational(const mpq_class& q);
    static Coeff log_symbol(std::uint32_t prime);

    bool is_exact() const { return !float_; }
    bool is_zero() const { return float_ ? fv_ == std::complex<double>(0, 0) : poly_.empty(); }
    // exact and free of log symbols
    bool is_constant() const;
    bool is_rational() const;
    bool is_real() const;
    bool is_one() const;
    mpq_class rational() const;  // requires is_rational()
    CRat constant() const;       // requires is_constant()
    const std::vector<Term>& terms() const { return poly_; }

    std::complex<double> value() const;
    Coeff to_float() const { return from_float(value()); }
    Coeff conj() const;
    double abs_value() const { return std::abs(value()); }

    Coeff operator-() const;
    friend Coeff operator+(const Coeff& a, const Coeff& b);
    friend Coeff operator-(const Coeff& a, const Coeff& b);
    friend Coeff operator*(const Coeff& a, const Coeff& b);
    Coeff& operator+=(const Coeff& b);
    Coeff& operator-=(const Coeff& b) { return *this += -b; }
    Coeff& operator*=(const Coeff& b) { return *this = *this * b; }
    // exact inverse requires a symbol-free value
    Coeff inverse() const;
    friend Coeff operator/(const Coeff& a, const Coeff& b) { return a * b.inverse(); }

    // exact equality in exact mode; bitwise for float
    friend bool operator==(const Coeff& a, const Coeff& b);

    // "p/q", "(a+bi)", "3/2*log2", ...
    std::string str() const;
    // rational strings of the symbol-free part; float values in decimal
    std::string re_str() const;
    std::string im_str() const;

private:
    bool float_ = false;
    std::complex<double> fv_{};
    std::vector<Term> poly_;
};

std::string rat_str(const mpq_class& q);
mpq_class parse_rat(const std::string& s);
// exact rational power q^(num/den), if it is rational
bool rational_root(const mpq_class& q, long num, long den, mpq_class& out);

} // namespace lts

#endif
