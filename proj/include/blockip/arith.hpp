// Exact integer arithmetic with overflow checking, and a small exact
// rational type used by the Steinitz certificate machinery.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace blockip {

using i64 = long long;
using u64 = unsigned long long;

struct arith_error : std::runtime_error {
    explicit arith_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct dim_error : std::runtime_error {
    explicit dim_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Overflow is a hard error, never a wrap.
inline i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r))
        throw arith_error("integer overflow in addition");
    return r;
}

inline i64 checked_sub(i64 a, i64 b) {
    i64 r;
    if (__builtin_sub_overflow(a, b, &r))
        throw arith_error("integer overflow in subtraction");
    return r;
}

inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw arith_error("integer overflow in multiplication");
    return r;
}

inline i64 checked_neg(i64 a) { return checked_sub(0, a); }

inline i64 abs_i64(i64 a) {
    if (a == INT64_MIN) throw arith_error("abs overflow");
    return a < 0 ? -a : a;
}

// Floor/ceil division for possibly negative operands.
inline i64 div_floor(i64 a, i64 b) {
    if (b == 0) throw arith_error("division by zero");
    i64 q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline i64 div_ceil(i64 a, i64 b) {
    if (b == 0) throw arith_error("division by zero");
    i64 q = a / b, r = a % b;
    if (r != 0 && ((r < 0) == (b < 0))) ++q;
    return q;
}

// Exact rational on 64-bit components. Intermediate products use 128-bit
// arithmetic; results that do not fit 64 bits after reduction are a hard
// error. All use sites keep values small (denominators are bounded by
// minors of desk-scale integer matrices).
class Rat64 {
public:
    Rat64() : num_(0), den_(1) {}
    Rat64(i64 n) : num_(n), den_(1) {}
    Rat64(i64 n, i64 d) : num_(n), den_(d) { normalize(); }

    i64 num() const { return num_; }
    i64 den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ < 0 ? -1 : (num_ > 0 ? 1 : 0); }

    friend Rat64 operator+(const Rat64& a, const Rat64& b) {
        return from128((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_,
                       (__int128)a.den_ * b.den_);
    }
    friend Rat64 operator-(const Rat64& a, const Rat64& b) {
        return from128((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_,
                       (__int128)a.den_ * b.den_);
    }
    friend Rat64 operator*(const Rat64& a, const Rat64& b) {
        return from128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rat64 operator/(const Rat64& a, const Rat64& b) {
        if (b.num_ == 0) throw arith_error("rational division by zero");
        return from128((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }
    Rat64 operator-() const { return Rat64(checked_neg(num_), den_); }

    friend bool operator==(const Rat64& a, const Rat64& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat64& a, const Rat64& b) { return !(a == b); }
    friend bool operator<(const Rat64& a, const Rat64& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator<=(const Rat64& a, const Rat64& b) { return !(b < a); }
    friend bool operator>(const Rat64& a, const Rat64& b) { return b < a; }
    friend bool operator>=(const Rat64& a, const Rat64& b) { return !(a < b); }

    Rat64 abs() const { return num_ < 0 ? -(*this) : *this; }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    void normalize() {
        if (den_ == 0) throw arith_error("rational with zero denominator");
        if (den_ < 0) { num_ = checked_neg(num_); den_ = checked_neg(den_); }
        i64 g = std::gcd(abs_i64(num_), den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    static Rat64 from128(__int128 n, __int128 d) {
        if (d == 0) throw arith_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw arith_error("rational overflow");
        Rat64 r;
        r.num_ = (i64)n;
        r.den_ = (i64)(n == 0 ? 1 : d);
        return r;
    }

    i64 num_;
    i64 den_;
};

}  // namespace blockip
