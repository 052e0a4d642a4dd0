#ifndef LTS_QEXP_HPP
#define LTS_QEXP_HPP

#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>
#include <gmpxx.h>

namespace lts {

// Small exact rational used for exponents of z. Exponents stay tiny in
// practice; every operation checks for int64 overflow.
class Q {
public:
    Q() = default;
    Q(std::int64_t n) : n_(n), d_(1) {}
    Q(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return n_; }
    std::int64_t den() const { return d_; }
    double to_double() const { return double(n_) / double(d_); }
    mpq_class to_mpq() const;
    bool is_integer() const { return d_ == 1; }
    int sign() const { return (n_ > 0) - (n_ < 0); }

    friend Q operator+(const Q& a, const Q& b);
    friend Q operator-(const Q& a, const Q& b);
    friend Q operator*(const Q& a, const Q& b);
    friend Q operator/(const Q& a, const Q& b);
    Q operator-() const { return Q(-n_, d_); }
    Q& operator+=(const Q& o) { return *this = *this + o; }
    Q& operator-=(const Q& o) { return *this = *this - o; }

    friend bool operator==(const Q& a, const Q& b) { return a.n_ == b.n_ && a.d_ == b.d_; }
    friend std::strong_ordering operator<=>(const Q& a, const Q& b);

    // "p/q" or "p"
    std::string str() const;
    static Q parse(const std::string& s);
    static Q from_mpq(const mpq_class& q);

    // floor of the quotient a/b for b > 0
    static std::int64_t floor_div(const Q& a, const Q& b);

private:
    std::int64_t n_ = 0;
    std::int64_t d_ = 1;
};

struct QHash {
    std::size_t operator()(const Q& q) const {
        return std::hash<std::int64_t>()(q.num()) * 31u + std::hash<std::int64_t>()(q.den());
    }
};

} // namespace lts

#endif
