#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qid {

using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const BigInt& n) { return n.convert_to<double>(); }

inline BigInt big_gcd(BigInt a, BigInt b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        BigInt t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline BigInt big_lcm(const BigInt& a, const BigInt& b) {
    if (a == 0 || b == 0) return 0;
    BigInt l = (a / big_gcd(a, b)) * b;
    return l < 0 ? -l : l;
}

inline BigInt big_factorial(int n) {
    BigInt f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline BigInt big_pow(BigInt base, int exp) {
    BigInt r = 1;
    while (exp > 0) {
        if (exp & 1) r *= base;
        base *= base;
        exp >>= 1;
    }
    return r;
}

// Exact rational over cpp_int, always normalized with a positive
// denominator. (boost::rational's scalar comparison path is broken with
// multiprecision integers in the Boost shipped here, hence our own type.)
class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(long long n) : num_(n), den_(1) {}          // NOLINT: implicit by design
    Rat(BigInt n) : num_(std::move(n)), den_(1) {}  // NOLINT
    Rat(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
    Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

    const BigInt& numerator() const { return num_; }
    const BigInt& denominator() const { return den_; }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return Rat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return Rat(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.num_ * b.num_, a.den_ * b.den_); }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return Rat(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rat operator-() const {
        Rat r = *this;
        r.num_ = -r.num_;
        return r;
    }
    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) { return a.num_ * b.den_ < b.num_ * a.den_; }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

private:
    void normalize() {
        if (den_ == 0) throw std::domain_error("rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        BigInt g = big_gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_, den_;
};

inline Rat abs(const Rat& r) { return r < Rat(0) ? -r : r; }

inline double to_double(const Rat& r) {
    double nd = to_double(r.numerator());
    double dd = to_double(r.denominator());
    if (std::isfinite(nd) && std::isfinite(dd) && dd != 0.0) return nd / dd;
    BigInt q = (r.numerator() << 64) / r.denominator();
    return q.convert_to<double>() / 18446744073709551616.0;
}

// Rational gcd: the largest rational dividing both with integer quotients.
inline Rat rat_gcd(const Rat& x, const Rat& y) {
    if (x == Rat(0)) return abs(y);
    if (y == Rat(0)) return abs(x);
    BigInt den = big_lcm(x.denominator(), y.denominator());
    BigInt nx = x.numerator() * (den / x.denominator());
    BigInt ny = y.numerator() * (den / y.denominator());
    return Rat(big_gcd(nx, ny), den);
}

// Parses "3", "-0.25", "2/3", "1e-3" into an exact rational.
inline Rat parse_rational(const std::string& s) {
    auto bad = [&]() -> Rat { throw std::invalid_argument("cannot parse rational: '" + s + "'"); };
    if (s.empty()) return bad();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rat num = parse_rational(s.substr(0, slash));
        Rat den = parse_rational(s.substr(slash + 1));
        if (den == Rat(0)) return bad();
        return num / den;
    }
    size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = (s[i] == '-');
        ++i;
    }
    BigInt mant = 0;
    long scale = 0;  // decimal digits after the point
    bool any = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_dot) return bad();
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            mant = mant * 10 + (c - '0');
            if (seen_dot) ++scale;
            any = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            return bad();
        }
    }
    long expo = 0;
    if (i < s.size()) {
        try {
            expo = std::stol(s.substr(i + 1));
        } catch (...) {
            return bad();
        }
        if (std::abs(expo) > 1000) return bad();
    }
    if (!any) return bad();
    Rat r(mant, 1);
    long net = expo - scale;
    if (net > 0)
        r *= Rat(big_pow(10, static_cast<int>(net)), 1);
    else if (net < 0)
        r /= Rat(big_pow(10, static_cast<int>(-net)), 1);
    return neg ? -r : r;
}

// Doubles are dyadic rationals; conversion is exact.
inline Rat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    if (x == 0.0) return Rat(0);
    int e = 0;
    double m = std::frexp(x, &e);  // x = m * 2^e, |m| in [0.5, 1)
    long long mant = static_cast<long long>(std::ldexp(m, 53));
    e -= 53;
    Rat r(BigInt(mant), BigInt(1));
    if (e > 0)
        r *= Rat(big_pow(2, e), 1);
    else if (e < 0)
        r /= Rat(big_pow(2, -e), 1);
    return r;
}

inline std::string to_string(const Rat& r) {
    std::string s = r.numerator().str();
    if (r.denominator() != 1) s += "/" + r.denominator().str();
    return s;
}

}  // namespace qid
