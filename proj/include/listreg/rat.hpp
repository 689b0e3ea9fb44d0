#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace listreg {

// Exact rational on int64 with int128 intermediates. Every value is kept
// reduced with positive denominator; any overflow of the reduced result
// throws instead of wrapping.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat() = default;
    Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) { assign(n, d); }

    static Rat from_i128(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        Rat r;
        r.num = narrow(n);
        r.den = narrow(d);
        return r;
    }

    void assign(std::int64_t n, std::int64_t d) {
        *this = from_i128(static_cast<__int128>(n), static_cast<__int128>(d));
    }

    bool is_zero() const { return num == 0; }
    bool is_integer() const { return den == 1; }

    Rat operator+(const Rat& o) const {
        return from_i128(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                         static_cast<__int128>(den) * o.den);
    }
    Rat operator-(const Rat& o) const {
        return from_i128(static_cast<__int128>(num) * o.den - static_cast<__int128>(o.num) * den,
                         static_cast<__int128>(den) * o.den);
    }
    Rat operator*(const Rat& o) const {
        return from_i128(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den);
    }
    Rat operator/(const Rat& o) const {
        if (o.num == 0) throw std::domain_error("rational division by zero");
        return from_i128(static_cast<__int128>(num) * o.den, static_cast<__int128>(den) * o.num);
    }
    Rat operator-() const { return from_i128(-static_cast<__int128>(num), den); }

    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    Rat abs() const { return num < 0 ? -*this : *this; }

    // floor(num/den) as an integer
    std::int64_t floor() const {
        std::int64_t q = num / den;
        std::int64_t r = num % den;
        if (r != 0 && num < 0) --q;
        return q;
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    // Parses "p", "p/q", or a plain decimal like "0.25".
    static Rat parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            std::int64_t n = std::stoll(s.substr(0, slash));
            std::int64_t d = std::stoll(s.substr(slash + 1));
            return Rat(n, d);
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            std::string whole = s.substr(0, dot);
            std::string frac = s.substr(dot + 1);
            if (frac.size() > 18) throw std::invalid_argument("decimal too long: " + s);
            std::int64_t den = 1;
            for (size_t i = 0; i < frac.size(); ++i) den *= 10;
            bool neg = !whole.empty() && whole[0] == '-';
            std::int64_t w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
            std::int64_t f = frac.empty() ? 0 : std::stoll(frac);
            __int128 n = static_cast<__int128>(w < 0 ? -w : w) * den + f;
            if (neg || w < 0) n = -n;
            return from_i128(n, den);
        }
        return Rat(std::stoll(s));
    }

private:
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a < 0 ? -a : a;
    }
    static std::int64_t narrow(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
        return static_cast<std::int64_t>(v);
    }
};

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    __int128 l = static_cast<__int128>(a) / std::gcd(a, b) * b;
    if (l > INT64_MAX) throw std::overflow_error("lcm overflow");
    return static_cast<std::int64_t>(l);
}

}  // namespace listreg
