#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace regrate {

/// Point of the ambient finite-dimensional real Hilbert space.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim) : coords_(dim, 0.0) {}
    Vector(std::initializer_list<double> xs) : coords_(xs) {}
    explicit Vector(std::vector<double> xs) : coords_(std::move(xs)) {}

    std::size_t dim() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }
    const std::vector<double>& coords() const { return coords_; }

    bool all_finite() const {
        for (double c : coords_) {
            if (!std::isfinite(c)) return false;
        }
        return true;
    }

    friend bool operator==(const Vector& u, const Vector& v) { return u.coords_ == v.coords_; }

private:
    std::vector<double> coords_;
};

inline void require_same_dim(const Vector& u, const Vector& v, const char* where) {
    if (u.dim() != v.dim()) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(u.dim()) + " vs " + std::to_string(v.dim()) + ")");
    }
}

inline double inner(const Vector& u, const Vector& v) {
    require_same_dim(u, v, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) s += u[i] * v[i];
    return s;
}

inline double norm_squared(const Vector& v) { return inner(v, v); }

inline double norm(const Vector& v) { return std::sqrt(norm_squared(v)); }

inline Vector operator+(const Vector& u, const Vector& v) {
    require_same_dim(u, v, "operator+");
    Vector w(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) w[i] = u[i] + v[i];
    return w;
}

inline Vector operator-(const Vector& u, const Vector& v) {
    require_same_dim(u, v, "operator-");
    Vector w(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) w[i] = u[i] - v[i];
    return w;
}

inline Vector operator*(double s, const Vector& v) {
    Vector w(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) w[i] = s * v[i];
    return w;
}

inline double dist(const Vector& u, const Vector& v) {
    require_same_dim(u, v, "dist");
    double s = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// s*x + u*y, one product-and-add per coordinate. The averaging transform and
/// the iteration step both go through here so that they share one arithmetic path.
inline Vector lincomb(double s, const Vector& x, double u, const Vector& y) {
    require_same_dim(x, y, "lincomb");
    Vector w(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) w[i] = s * x[i] + u * y[i];
    return w;
}

}  // namespace regrate
