#include "regrate/exact.hpp"

#include <cmath>
#include <limits>

namespace regrate {

BigRat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rat_from_double: non-finite input");
    return BigRat(x);  // exact: every finite double is a dyadic rational
}

double rat_to_double(const BigRat& q) { return q.convert_to<double>(); }

BigInt floor_rat(const BigRat& q) {
    BigInt n = numerator(q), d = denominator(q);  // d > 0 canonically
    BigInt quot = n / d;
    if (n % d != 0 && n < 0) --quot;
    return quot;
}

BigInt ceil_rat(const BigRat& q) {
    BigInt n = numerator(q), d = denominator(q);
    BigInt quot = n / d;
    if (n % d != 0 && n > 0) ++quot;
    return quot;
}

std::uint64_t to_u64_checked(const BigInt& n, const char* where) {
    if (n < 0) throw std::domain_error(std::string(where) + ": negative index");
    if (n > BigInt(std::numeric_limits<std::uint64_t>::max())) {
        throw std::overflow_error(std::string(where) + ": index exceeds 64-bit range");
    }
    return n.convert_to<std::uint64_t>();
}

Quad::Quad(const BigRat& a, const BigRat& b, const BigRat& s) : a_(a), b_(b), s_(s) {
    if (s_ < 0) throw std::domain_error("Quad: negative radicand");
    if (b_ == 0 || s_ == 0) {  // collapse to the rational line
        b_ = 0;
        s_ = 0;
    }
}

void Quad::require_same_field(const Quad& x, const Quad& y) {
    if (!x.is_rational() && !y.is_rational() && x.s_ != y.s_) {
        throw std::logic_error("Quad: mixing distinct quadratic fields");
    }
}

int Quad::sign() const {
    if (b_ == 0) return a_ == 0 ? 0 : (a_ > 0 ? 1 : -1);
    // value = a + b*sqrt(s), s > 0, b != 0
    if (a_ == 0) return b_ > 0 ? 1 : -1;
    if (a_ > 0 && b_ > 0) return 1;
    if (a_ < 0 && b_ < 0) return -1;
    // opposite signs: compare a^2 against b^2 s
    const BigRat lhs = a_ * a_;
    const BigRat rhs = b_ * b_ * s_;
    if (lhs == rhs) return 0;
    if (a_ > 0) return lhs > rhs ? 1 : -1;   // b < 0
    return lhs > rhs ? -1 : 1;               // a < 0, b > 0
}

Quad operator+(const Quad& x, const Quad& y) {
    Quad::require_same_field(x, y);
    const BigRat& s = x.is_rational() ? y.s_ : x.s_;
    return Quad(x.a_ + y.a_, x.b_ + y.b_, s);
}

Quad operator-(const Quad& x, const Quad& y) { return x + (-y); }

Quad operator*(const Quad& x, const Quad& y) {
    Quad::require_same_field(x, y);
    const BigRat& s = x.is_rational() ? y.s_ : x.s_;
    return Quad(x.a_ * y.a_ + x.b_ * y.b_ * s, x.a_ * y.b_ + x.b_ * y.a_, s);
}

Quad operator/(const Quad& x, const Quad& y) {
    Quad::require_same_field(x, y);
    if (y.sign() == 0) throw std::domain_error("Quad: division by zero");
    if (y.b_ == 0) return Quad(x.a_ / y.a_, x.b_ / y.a_, x.s_);
    // multiply by the conjugate: 1/(a + b sqrt(s)) = (a - b sqrt(s)) / (a^2 - b^2 s)
    const BigRat den = y.a_ * y.a_ - y.b_ * y.b_ * y.s_;
    if (den == 0) {
        // s is a perfect square of a rational here; fall back to the rational value
        throw std::logic_error("Quad: conjugate denominator vanished (rational surd not normalized)");
    }
    Quad conj(y.a_ / den, -y.b_ / den, y.s_);
    return x * conj;
}

double Quad::to_double() const {
    double v = rat_to_double(a_);
    if (b_ != 0) v += rat_to_double(b_) * std::sqrt(rat_to_double(s_));
    return v;
}

BigInt Quad::ceil() const {
    if (b_ == 0) return ceil_rat(a_);
    // value = a + sign(b) * sqrt(b^2 s); bracket the root with an integer
    // square root, then settle the unique n with n - 1 < value <= n exactly
    const BigInt root = boost::multiprecision::sqrt(BigInt(floor_rat(b_ * b_ * s_)));
    BigInt n = ceil_rat(a_);
    if (b_ > 0) {
        n += root + 1;
    } else {
        n -= root;
    }
    auto leq_value = [this](const BigInt& k) { return (*this - Quad(BigRat(k))).sign() <= 0; };
    while (!leq_value(n)) ++n;     // n too small
    while (leq_value(n - 1)) --n;  // n too large
    return n;
}

}  // namespace regrate
