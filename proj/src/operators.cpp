#include "regrate/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace regrate {

Operator::Operator(std::string kind, double k_claimed, Vector fixed_point, EvalFn eval)
    : kind_(std::move(kind)), k_claimed_(k_claimed), fixed_point_(std::move(fixed_point)), eval_(std::move(eval)) {
    if (k_claimed_ < 0.0 || k_claimed_ >= 1.0) {
        throw std::invalid_argument("Operator: k_claimed must lie in [0,1)");
    }
    if (fixed_point_.dim() == 0) throw std::invalid_argument("Operator: empty fixed point");
    if (!eval_) throw std::invalid_argument("Operator: missing evaluator");
}

Vector Operator::apply(const Vector& x) const {
    if (x.dim() != dim()) {
        throw std::invalid_argument("Operator::apply: dimension mismatch (" + std::to_string(x.dim()) +
                                    " vs " + std::to_string(dim()) + ")");
    }
    return eval_(x);
}

Operator identity_op(Vector p) {
    return Operator("identity", 0.0, std::move(p), [](const Vector& x) { return x; });
}

Operator contraction_about(Vector p, double factor) {
    if (factor < 0.0 || factor > 1.0) throw std::invalid_argument("contraction_about: factor outside [0,1]");
    Vector center = p;
    return Operator("contraction-about-point", 0.0, std::move(p), [center, factor](const Vector& x) {
        Vector y(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) y[i] = center[i] + factor * (x[i] - center[i]);
        return y;
    });
}

Operator reflection_about(Vector p) {
    Vector center = p;
    return Operator("reflection", 0.0, std::move(p), [center](const Vector& x) {
        Vector y(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) y[i] = 2.0 * center[i] - x[i];
        return y;
    });
}

Operator rotation_about(Vector p, std::size_t axis_i, std::size_t axis_j, double angle) {
    if (axis_i == axis_j || axis_i >= p.dim() || axis_j >= p.dim()) {
        throw std::invalid_argument("rotation_about: invalid axis pair");
    }
    const double c = std::cos(angle), s = std::sin(angle);
    Vector center = p;
    return Operator("rotation", 0.0, std::move(p), [center, axis_i, axis_j, c, s](const Vector& x) {
        Vector y = x;
        const double u = x[axis_i] - center[axis_i];
        const double v = x[axis_j] - center[axis_j];
        y[axis_i] = center[axis_i] + c * u - s * v;
        y[axis_j] = center[axis_j] + s * u + c * v;
        return y;
    });
}

Operator householder_about(Vector p, const Vector& normal) {
    require_same_dim(p, normal, "householder_about");
    const double nn = norm(normal);
    if (!(nn > 0.0)) throw std::invalid_argument("householder_about: zero normal");
    Vector unit = (1.0 / nn) * normal;
    Vector center = p;
    return Operator("reflection", 0.0, std::move(p), [center, unit](const Vector& x) {
        double proj = 0.0;
        for (std::size_t i = 0; i < x.dim(); ++i) proj += (x[i] - center[i]) * unit[i];
        Vector y(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) y[i] = x[i] - 2.0 * proj * unit[i];
        return y;
    });
}

Operator projection_onto_ball(Vector p, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("projection_onto_ball: radius must be positive");
    Vector center = p;
    return Operator("projection-onto-ball", 0.0, std::move(p), [center, radius](const Vector& x) {
        const double d = dist(x, center);
        if (d <= radius) return x;
        const double scale = radius / d;
        Vector y(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) y[i] = center[i] + scale * (x[i] - center[i]);
        return y;
    });
}

Operator linear_about(Vector p, std::vector<std::vector<double>> matrix, double k_claimed) {
    const std::size_t d = p.dim();
    if (matrix.size() != d) throw std::invalid_argument("linear_about: matrix rows != dim");
    for (const auto& row : matrix) {
        if (row.size() != d) throw std::invalid_argument("linear_about: matrix is not square");
    }
    Vector center = p;
    return Operator("linear-about-point", k_claimed, std::move(p), [center, m = std::move(matrix)](const Vector& x) {
        Vector y(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) {
            double acc = center[i];
            for (std::size_t j = 0; j < x.dim(); ++j) acc += m[i][j] * (x[j] - center[j]);
            y[i] = acc;
        }
        return y;
    });
}

Operator compose(std::vector<Operator> ops) {
    if (ops.empty()) throw std::invalid_argument("compose: empty list");
    for (const auto& op : ops) {
        if (op.k_claimed() != 0.0) throw std::invalid_argument("compose: only nonexpansive blocks compose safely");
        if (!(op.fixed_point() == ops.front().fixed_point())) {
            throw std::invalid_argument("compose: blocks must share the fixed point");
        }
    }
    if (ops.size() == 1) return std::move(ops.front());
    Vector p = ops.front().fixed_point();
    return Operator("compose-of", 0.0, std::move(p), [ops = std::move(ops)](const Vector& x) {
        Vector y = x;
        for (const auto& op : ops) y = op.apply(y);
        return y;
    });
}

Operator averaged(Operator op, double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("averaged: t outside [0,1]");
    const double k = op.k_claimed();
    // T_t is nonexpansive once t >= k; below that the residual strictness is (k-t)/(1-t).
    const double k_new = (t >= k || t >= 1.0) ? 0.0 : (k - t) / (1.0 - t);
    Vector p = op.fixed_point();
    const double u = 1.0 - t;
    return Operator("averaged-of", k_new, std::move(p),
                    [inner_op = std::move(op), t, u](const Vector& x) { return lincomb(t, x, u, inner_op.apply(x)); });
}

Operator psc_from_nonexpansive(Operator u, double k) {
    if (k < 0.0 || k >= 1.0) throw std::invalid_argument("psc_from_nonexpansive: k outside [0,1)");
    if (u.k_claimed() != 0.0) throw std::invalid_argument("psc_from_nonexpansive: base map must be nonexpansive");
    if (k == 0.0) return u;
    Vector p = u.fixed_point();
    const double denom = 1.0 - k;
    return Operator("psc-from-nonexpansive", k, std::move(p), [base = std::move(u), k, denom](const Vector& x) {
        Vector ux = base.apply(x);
        Vector y(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) y[i] = (ux[i] - k * x[i]) / denom;
        return y;
    });
}

Operator convex_combination(std::vector<Operator> ops, std::vector<double> weights) {
    if (ops.empty() || ops.size() != weights.size()) {
        throw std::invalid_argument("convex_combination: operators/weights size mismatch");
    }
    double sum = 0.0;
    double k_max = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("convex_combination: negative weight");
        sum += weights[i];
        k_max = std::max(k_max, ops[i].k_claimed());
        if (ops[i].dim() != ops.front().dim()) {
            throw std::invalid_argument("convex_combination: dimension mismatch");
        }
        if (!(ops[i].fixed_point() == ops.front().fixed_point())) {
            throw std::invalid_argument("convex_combination: operators must share the fixed point");
        }
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("convex_combination: weights must sum to 1");
    if (ops.size() == 1) return std::move(ops.front());
    Vector p = ops.front().fixed_point();
    return Operator("convex-combination-of", k_max, std::move(p),
                    [ops = std::move(ops), weights = std::move(weights)](const Vector& x) {
                        Vector acc(x.dim());
                        for (std::size_t i = 0; i < ops.size(); ++i) {
                            Vector tx = ops[i].apply(x);
                            for (std::size_t j = 0; j < x.dim(); ++j) acc[j] += weights[i] * tx[j];
                        }
                        return acc;
                    });
}

double lipschitz_bound(double k) {
    if (k < 0.0 || k >= 1.0) throw std::invalid_argument("lipschitz_bound: k outside [0,1)");
    return (1.0 + k) / (1.0 - k);
}

std::vector<PairSample> sample_pairs(std::size_t dim, std::size_t count, double radius, SplitRng rng) {
    std::vector<PairSample> pairs;
    pairs.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        Vector x(dim), y(dim);
        for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform(-radius, radius);
        for (std::size_t i = 0; i < dim; ++i) y[i] = rng.uniform(-radius, radius);
        pairs.push_back(PairSample{std::move(x), std::move(y)});
    }
    return pairs;
}

CheckReport check_kpsc(const Operator& op, double k, std::span<const PairSample> pairs, double slack) {
    CheckReport report("kpsc(k=" + std::to_string(k) + ")");
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const Vector& x = pairs[n].x;
        const Vector& y = pairs[n].y;
        Vector tx = op.apply(x);
        Vector ty = op.apply(y);
        const double lhs = norm_squared(tx - ty);
        const double rhs = norm_squared(x - y) + k * norm_squared((x - tx) - (y - ty));
        report.record(n, lhs, rhs, slack);
    }
    return report;
}

CheckReport check_nonexpansive(const Operator& op, std::span<const PairSample> pairs, double slack) {
    CheckReport report("nonexpansive");
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const Vector& x = pairs[n].x;
        const Vector& y = pairs[n].y;
        const double lhs = norm_squared(op.apply(x) - op.apply(y));
        const double rhs = norm_squared(x - y);
        report.record(n, lhs, rhs, slack);
    }
    return report;
}

CheckReport check_lipschitz(const Operator& op, std::span<const PairSample> pairs, double slack) {
    CheckReport report("lipschitz");
    const double bound = lipschitz_bound(op.k_claimed());
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const double lhs = dist(op.apply(pairs[n].x), op.apply(pairs[n].y));
        const double rhs = bound * dist(pairs[n].x, pairs[n].y);
        report.record(n, lhs, rhs, slack);
    }
    return report;
}

CheckReport check_fixed_point(const Operator& op, double tol) {
    CheckReport report("fixed-point");
    const double residual = dist(op.apply(op.fixed_point()), op.fixed_point());
    report.record(0, residual, 0.0, tol);
    return report;
}

}  // namespace regrate
