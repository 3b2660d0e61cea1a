#ifndef RMDF_RATIONAL_HPP
#define RMDF_RATIONAL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rmdf {

struct rational_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact rational number, always stored reduced with a positive denominator.
// Every analysis path in the toolkit goes through this type; there is no
// floating point anywhere in the math.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    bool is_negative() const { return num_ < 0; }

    Rational operator-() const;
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    // Greatest integer <= *this and smallest integer >= *this.
    std::int64_t floor() const;
    std::int64_t ceil() const;
    Rational frac() const { return *this - Rational(floor()); }
    Rational abs() const { return num_ < 0 ? -*this : *this; }

    // "p/q" (or "p" when the value is an integer).
    std::string str() const;
    // Decimal approximation for human-facing output only.
    double approx() const;

    // Parses "p", "p/q" or "-p/q"; no float intermediates. Throws
    // rational_error on malformed input or a zero denominator.
    static Rational parse(const std::string& text);

private:
    std::int64_t num_;
    std::int64_t den_;
};

inline Rational operator+(std::int64_t a, const Rational& b) { return Rational(a) + b; }
inline Rational operator-(std::int64_t a, const Rational& b) { return Rational(a) - b; }
inline Rational operator*(std::int64_t a, const Rational& b) { return Rational(a) * b; }

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);

} // namespace rmdf

#endif
