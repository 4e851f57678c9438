#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "regrate/report.hpp"
#include "regrate/rng.hpp"
#include "regrate/vector.hpp"

namespace regrate {

/// Evaluable self-map of R^d with a certified strictness constant and a known
/// fixed point. A map T is a k-strict pseudocontraction when
///   ||Tx - Ty||^2 <= ||x - y||^2 + k ||(x - Tx) - (y - Ty)||^2
/// for all x, y; k = 0 is the nonexpansive case. Operators are immutable and
/// their evaluators are pure, so concurrent evaluation is safe.
class Operator {
public:
    using EvalFn = std::function<Vector(const Vector&)>;

    Operator(std::string kind, double k_claimed, Vector fixed_point, EvalFn eval);

    const std::string& kind() const { return kind_; }
    double k_claimed() const { return k_claimed_; }
    const Vector& fixed_point() const { return fixed_point_; }
    std::size_t dim() const { return fixed_point_.dim(); }

    Vector apply(const Vector& x) const;
    Vector operator()(const Vector& x) const { return apply(x); }

private:
    std::string kind_;
    double k_claimed_;
    Vector fixed_point_;
    EvalFn eval_;
};

inline Vector apply(const Operator& op, const Vector& x) { return op.apply(x); }

// Constructions. All of these are self-maps of R^d fixing the given point p.
Operator identity_op(Vector p);
Operator contraction_about(Vector p, double factor);                       // p + factor (x - p), factor in [0,1]
Operator reflection_about(Vector p);                                       // 2p - x
Operator rotation_about(Vector p, std::size_t axis_i, std::size_t axis_j, double angle);
Operator householder_about(Vector p, const Vector& normal);                // reflect across a hyperplane through p
Operator projection_onto_ball(Vector p, double radius);                    // nearest point of the closed ball B(p, radius)
Operator linear_about(Vector p, std::vector<std::vector<double>> matrix, double k_claimed);
Operator compose(std::vector<Operator> ops);                               // front-to-back; nonexpansive blocks only

/// The averaging transform T_t = t I + (1-t) T, 0 <= t <= 1. Fixed points are
/// preserved and (T_{t1})_{t2} = T_{1-(1-t1)(1-t2)}.
Operator averaged(Operator op, double t);

/// Inverse of the Browder-Petryshyn averaging: given nonexpansive U and
/// k in [0,1), returns T = (U - k I)/(1 - k), a k-strict pseudocontraction
/// with averaged(T, k) == U.
Operator psc_from_nonexpansive(Operator u, double k);

/// sum_i weights[i] * ops[i]; weights nonnegative summing to 1 (tol 1e-12),
/// all operators sharing the same fixed point.
Operator convex_combination(std::vector<Operator> ops, std::vector<double> weights);

/// (1+k)/(1-k): Lipschitz constant of any k-strict pseudocontraction.
double lipschitz_bound(double k);

struct PairSample {
    Vector x, y;
};

/// `count` pairs drawn uniformly from the box [-radius, radius]^dim.
std::vector<PairSample> sample_pairs(std::size_t dim, std::size_t count, double radius, SplitRng rng);

CheckReport check_kpsc(const Operator& op, double k, std::span<const PairSample> pairs, double slack = 1e-9);
CheckReport check_nonexpansive(const Operator& op, std::span<const PairSample> pairs, double slack = 1e-9);
CheckReport check_lipschitz(const Operator& op, std::span<const PairSample> pairs, double slack = 1e-9);
CheckReport check_fixed_point(const Operator& op, double tol = 1e-9);

}  // namespace regrate
