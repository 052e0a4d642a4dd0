#include "lts/qexp.hpp"

#include <numeric>

namespace lts {

namespace {

std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw std::overflow_error("exponent rational overflow");
    return std::int64_t(v);
}

Q make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("zero denominator in exponent");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    return Q(narrow(n), narrow(d));
}

} // namespace

Q::Q(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("zero denominator in exponent");
    if (d < 0) { n = -n; d = -d; }
    std::int64_t g = std::gcd(n, d);
    if (g > 1) { n /= g; d /= g; }
    n_ = n;
    d_ = d;
}

Q operator+(const Q& a, const Q& b) {
    if (a.d_ == b.d_) return make(__int128(a.n_) + b.n_, a.d_);
    return make(__int128(a.n_) * b.d_ + __int128(b.n_) * a.d_, __int128(a.d_) * b.d_);
}
Q operator-(const Q& a, const Q& b) { return a + (-b); }
Q operator*(const Q& a, const Q& b) {
    return make(__int128(a.n_) * b.n_, __int128(a.d_) * b.d_);
}
Q operator/(const Q& a, const Q& b) {
    return make(__int128(a.n_) * b.d_, __int128(a.d_) * b.n_);
}

std::strong_ordering operator<=>(const Q& a, const Q& b) {
    __int128 l = __int128(a.n_) * b.d_, r = __int128(b.n_) * a.d_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

mpq_class Q::to_mpq() const {
    mpq_class q(mpz_class(std::to_string(n_)), mpz_class(std::to_string(d_)));
    q.canonicalize();
    return q;
}

std::string Q::str() const {
    if (d_ == 1) return std::to_string(n_);
    return std::to_string(n_) + "/" + std::to_string(d_);
}

Q Q::parse(const std::string& s) {
    auto p = s.find('/');
    if (p == std::string::npos) return Q(std::stoll(s));
    return Q(std::stoll(s.substr(0, p)), std::stoll(s.substr(p + 1)));
}

Q Q::from_mpq(const mpq_class& q) {
    if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p())
        throw std::overflow_error("exponent rational too large");
    return Q(q.get_num().get_si(), q.get_den().get_si());
}

std::int64_t Q::floor_div(const Q& a, const Q& b) {
    __int128 n = __int128(a.n_) * b.d_, d = __int128(a.d_) * b.n_;
    if (d < 0) { n = -n; d = -d; }
    __int128 q = n / d;
    if ((n % d != 0) && (n < 0)) --q;
    return narrow(q);
}

} // namespace lts
