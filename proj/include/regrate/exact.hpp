#pragma once

#include <cstdint>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace regrate {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Exact rational value of a finite double.
BigRat rat_from_double(double x);

double rat_to_double(const BigRat& q);

/// Exact ceiling / floor of a rational.
BigInt ceil_rat(const BigRat& q);
BigInt floor_rat(const BigRat& q);

std::uint64_t to_u64_checked(const BigInt& n, const char* where);

/// Element a + b*sqrt(s) of a real quadratic field (a, b, s rational, s >= 0).
/// The rate formulas produce at most one square root per expression, so closing
/// the arithmetic over a single surd is enough to make every comparison and
/// ceiling in the rate calculus exactly decidable. Values with b == 0 are plain
/// rationals and combine with any field.
class Quad {
public:
    Quad() : a_(0), b_(0), s_(0) {}
    Quad(const BigRat& a) : a_(a), b_(0), s_(0) {}  // NOLINT: implicit by design
    Quad(const BigRat& a, const BigRat& b, const BigRat& s);

    static Quad from_double(double x) { return Quad(rat_from_double(x)); }
    static Quad sqrt_of(const BigRat& s) { return Quad(BigRat(0), BigRat(1), s); }

    bool is_rational() const { return b_ == 0; }
    const BigRat& rational_part() const { return a_; }
    const BigRat& surd_coefficient() const { return b_; }
    const BigRat& radicand() const { return s_; }

    /// Exact sign: -1, 0, +1.
    int sign() const;

    Quad operator-() const { return Quad(-a_, -b_, s_); }
    friend Quad operator+(const Quad& x, const Quad& y);
    friend Quad operator-(const Quad& x, const Quad& y);
    friend Quad operator*(const Quad& x, const Quad& y);
    friend Quad operator/(const Quad& x, const Quad& y);

    friend bool operator<(const Quad& x, const Quad& y) { return (x - y).sign() < 0; }
    friend bool operator>(const Quad& x, const Quad& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const Quad& x, const Quad& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const Quad& x, const Quad& y) { return (x - y).sign() >= 0; }
    friend bool operator==(const Quad& x, const Quad& y) { return (x - y).sign() == 0; }

    double to_double() const;

    /// Exact ceiling (smallest integer >= value).
    BigInt ceil() const;

private:
    static void require_same_field(const Quad& x, const Quad& y);

    BigRat a_, b_, s_;
};

}  // namespace regrate
