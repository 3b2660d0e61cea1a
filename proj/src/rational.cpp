#include "rmdf/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace rmdf {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw rational_error("rational overflow in multiplication");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw rational_error("rational overflow in addition");
    return r;
}

} // namespace

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    return checked_mul(a / gcd64(a, b), b < 0 ? -b : b);
}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw rational_error("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = gcd64(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = n;
    den_ = d;
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational Rational::operator+(const Rational& o) const {
    std::int64_t g = gcd64(den_, o.den_);
    std::int64_t dl = den_ / g;
    std::int64_t n = checked_add(checked_mul(num_, o.den_ / g), checked_mul(o.num_, dl));
    return Rational(n, checked_mul(dl, o.den_));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
    std::int64_t g1 = gcd64(num_, o.den_);
    std::int64_t g2 = gcd64(o.num_, den_);
    return Rational(checked_mul(num_ / g1, o.num_ / g2),
                    checked_mul(den_ / g2, o.den_ / g1));
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw rational_error("division by zero");
    return *this * Rational(o.den_, o.num_);
}

bool Rational::operator<(const Rational& o) const {
    // denominators positive, so cross multiplication preserves order
    return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
}

std::int64_t Rational::floor() const {
    if (num_ >= 0) return num_ / den_;
    return -((-num_ + den_ - 1) / den_);
}

std::int64_t Rational::ceil() const {
    if (num_ >= 0) return (num_ + den_ - 1) / den_;
    return -((-num_) / den_);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

double Rational::approx() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw rational_error("empty rational");
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '-' || text[pos] == '+') {
        neg = text[pos] == '-';
        ++pos;
    }
    auto read_int = [&](const char* what) -> std::int64_t {
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw rational_error(std::string("malformed rational '") + text + "': expected " + what);
        std::int64_t v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = checked_mul(v, 10);
            v = checked_add(v, text[pos] - '0');
            ++pos;
        }
        return v;
    };
    std::int64_t n = read_int("numerator");
    std::int64_t d = 1;
    if (pos < text.size()) {
        if (text[pos] != '/')
            throw rational_error("malformed rational '" + text + "'");
        ++pos;
        d = read_int("denominator");
        if (pos != text.size())
            throw rational_error("malformed rational '" + text + "'");
    }
    if (d == 0) throw rational_error("malformed rational '" + text + "': zero denominator");
    return Rational(neg ? -n : n, d);
}

} // namespace rmdf
