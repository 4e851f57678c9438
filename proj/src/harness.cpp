#include "regrate/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

namespace regrate {

namespace {

double require_number(const ojson& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw config_error(std::string("config: missing numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

std::vector<double> number_list(const ojson& j) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

Vector vector_from_json(const ojson& j) {
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

Vector random_unit(SplitRng& rng, std::size_t d) {
    Vector v(d);
    double n = 0.0;
    for (int attempt = 0; attempt < 16 && !(n > 1e-9); ++attempt) {
        for (std::size_t i = 0; i < d; ++i) v[i] = rng.gaussian();
        n = norm(v);
    }
    if (!(n > 1e-9)) {
        v = Vector(d);
        v[0] = 1.0;
        return v;
    }
    return (1.0 / n) * v;
}

}  // namespace

ThetaFn theta_from_json(const ojson& spec) {
    const std::string type = spec.value("type", "");
    if (type == "zero") return [](std::uint64_t) -> std::uint64_t { return 0; };
    if (type == "identity") return [](std::uint64_t n) { return n; };
    if (type == "linear") {
        const BigRat slope = rat_from_double(require_number(spec, "slope"));
        if (slope <= 0) throw config_error("theta: slope must be positive");
        return [slope](std::uint64_t n) {
            return to_u64_checked(ceil_rat(slope * BigRat(n)), "theta(linear)");
        };
    }
    throw config_error("theta: unknown type '" + type + "'");
}

GammaFn gamma_from_json(const ojson& spec) {
    const std::string type = spec.value("type", "");
    if (type == "zero") {
        return [](const Quad& eps) -> std::uint64_t {
            if (eps.sign() <= 0) throw std::domain_error("gamma: eps must be positive");
            return 0;
        };
    }
    if (type == "geometric_tail") {
        const BigRat coeff = rat_from_double(require_number(spec, "coeff"));
        const BigRat ratio = rat_from_double(require_number(spec, "ratio"));
        if (coeff < 0 || ratio <= 0 || ratio >= 1) throw config_error("gamma: need coeff >= 0, 0 < ratio < 1");
        return [coeff, ratio](const Quad& eps) -> std::uint64_t {
            if (eps.sign() <= 0) throw std::domain_error("gamma: eps must be positive");
            BigRat tail = coeff * ratio;
            std::uint64_t m = 0;
            while (Quad(tail) > eps) {
                tail *= ratio;
                ++m;
                if (m > 10'000'000ULL) throw std::overflow_error("gamma: eps too small");
            }
            return m;
        };
    }
    throw config_error("gamma: unknown type '" + type + "'");
}

StepSchedule step_from_json(const ojson& spec, double k) {
    const std::string type = spec.value("type", "constant");
    if (type != "constant") throw config_error("step: unknown type '" + type + "'");
    const double t = require_number(spec, "t");
    StepSchedule s = constant_step(t, k);
    if (spec.contains("theta")) {
        ojson desc = s.descriptor();
        desc["theta"] = spec["theta"];
        s = s.with_theta(theta_from_json(spec["theta"]), std::move(desc));
    }
    return s;
}

MixSchedule mix_from_json(const ojson& spec) {
    const std::string type = spec.value("type", "constant");
    MixSchedule m = [&]() {
        if (type == "constant") {
            if (!spec.contains("weights")) throw config_error("mix: constant mix needs 'weights'");
            return constant_mix(number_list(spec["weights"]));
        }
        if (type == "geometric") {
            if (!spec.contains("limit") || !spec.contains("c")) {
                throw config_error("mix: geometric mix needs 'limit' and 'c'");
            }
            return geometric_mix(number_list(spec["limit"]), number_list(spec["c"]),
                                 require_number(spec, "r"));
        }
        throw config_error("mix: unknown type '" + type + "'");
    }();
    if (spec.contains("gamma")) {
        ojson desc = m.descriptor();
        desc["gamma"] = spec["gamma"];
        m = m.with_gamma(gamma_from_json(spec["gamma"]), std::move(desc));
    }
    return m;
}

Operator operator_from_json(const ojson& spec, const Vector& p) {
    const std::string kind = spec.value("kind", "");
    if (kind == "identity") return identity_op(p);
    if (kind == "reflection") return reflection_about(p);
    if (kind == "contraction") return contraction_about(p, require_number(spec, "factor"));
    if (kind == "rotation") {
        const auto& plane = spec.at("plane");
        return rotation_about(p, plane.at(0).get<std::size_t>(), plane.at(1).get<std::size_t>(),
                              require_number(spec, "angle"));
    }
    if (kind == "householder") return householder_about(p, vector_from_json(spec.at("normal")));
    if (kind == "projection_ball") return projection_onto_ball(p, require_number(spec, "radius"));
    if (kind == "linear") {
        std::vector<std::vector<double>> m;
        for (const auto& row : spec.at("matrix")) m.push_back(number_list(row));
        return linear_about(p, std::move(m), spec.value("k", 0.0));
    }
    if (kind == "compose") {
        std::vector<Operator> parts;
        for (const auto& sub : spec.at("of")) parts.push_back(operator_from_json(sub, p));
        return compose(std::move(parts));
    }
    if (kind == "averaged") return averaged(operator_from_json(spec.at("of"), p), require_number(spec, "t"));
    if (kind == "psc") {
        return psc_from_nonexpansive(operator_from_json(spec.at("of"), p), require_number(spec, "k"));
    }
    if (kind == "convex") {
        std::vector<Operator> parts;
        for (const auto& sub : spec.at("of")) parts.push_back(operator_from_json(sub, p));
        return convex_combination(std::move(parts), number_list(spec.at("weights")));
    }
    throw config_error("operator: unknown kind '" + kind + "'");
}

namespace {

StepSchedule draw_or_build_step(const ojson& spec, double k, SplitRng rng) {
    ojson s = spec.is_object() ? spec : ojson::object();
    if (!s.contains("t")) {
        const double u = rng.uniform(0.35, 0.65);
        s["type"] = s.value("type", "constant");
        s["t"] = k + (1.0 - k) * u;
    }
    return step_from_json(s, k);
}

MixSchedule draw_or_build_mix(const ojson& spec, std::size_t n_maps, SplitRng rng) {
    ojson s = spec.is_object() ? spec : ojson::object();
    const std::string type = s.value("type", "constant");
    if (type == "constant" && !s.contains("weights")) {
        std::vector<double> w(n_maps);
        double sum = 0.0;
        for (auto& v : w) {
            v = rng.uniform(0.5, 1.5);
            sum += v;
        }
        for (auto& v : w) v /= sum;
        // renormalize the last weight so the sum is exactly 1 up to one rounding
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < n_maps; ++i) acc += w[i];
        w[n_maps - 1] = 1.0 - acc;
        s["weights"] = w;
    } else if (type == "geometric" && !s.contains("limit")) {
        std::vector<double> limit(n_maps);
        double sum = 0.0;
        for (auto& v : limit) {
            v = rng.uniform(0.5, 1.5);
            sum += v;
        }
        for (auto& v : limit) v /= sum;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < n_maps; ++i) acc += limit[i];
        limit[n_maps - 1] = 1.0 - acc;

        std::vector<double> dev(n_maps);
        double mean = 0.0;
        for (auto& v : dev) {
            v = rng.uniform(-1.0, 1.0);
            mean += v;
        }
        mean /= static_cast<double>(n_maps);
        double scale = 1.0;
        for (std::size_t i = 0; i < n_maps; ++i) {
            dev[i] -= mean;
            const double allowed = std::min(0.4 * limit[i], 0.5 * (1.0 - limit[i]));
            if (std::abs(dev[i]) > 1e-12) scale = std::min(scale, allowed / std::abs(dev[i]));
        }
        std::vector<double> c(n_maps);
        double c_acc = 0.0;
        for (std::size_t i = 0; i + 1 < n_maps; ++i) {
            c[i] = scale * dev[i];
            c_acc += c[i];
        }
        c[n_maps - 1] = -c_acc;  // zero-sum exactly up to one rounding
        s["limit"] = limit;
        s["c"] = c;
        if (!s.contains("r")) s["r"] = rng.uniform(0.3, 0.8);
    }
    return mix_from_json(s);
}

Operator random_block(SplitRng& rng, std::size_t d, const Vector& p, double scale) {
    const std::uint64_t kinds = d >= 2 ? 4 : 3;
    switch (rng.next_below(kinds)) {
        case 0:
            return contraction_about(p, rng.uniform(0.3, 1.0));
        case 1:
            if (d >= 2 && rng.next_below(2) == 0) return householder_about(p, random_unit(rng, d));
            return reflection_about(p);
        case 2:
            return projection_onto_ball(p, std::max(scale, 0.05) * rng.uniform(0.5, 3.0));
        default: {
            const std::size_t i = rng.next_below(d);
            std::size_t j = rng.next_below(d - 1);
            if (j >= i) ++j;
            return rotation_about(p, i, j, rng.uniform(0.0, 6.283185307179586));
        }
    }
}

}  // namespace

ProblemInstance generate_instance(std::uint64_t seed, std::size_t d, std::size_t n_maps, double k,
                                  const ojson& step_spec, const ojson& mix_spec, const GenOptions& opts) {
    if (d == 0) throw config_error("generate_instance: dimension must be >= 1");
    if (n_maps == 0) throw config_error("generate_instance: family size must be >= 1");
    if (k < 0.0 || k >= 1.0) throw config_error("generate_instance: k outside [0,1)");

    SplitRng root(seed);
    MixSchedule mix = draw_or_build_mix(mix_spec, n_maps, root.fork("mix"));
    StepSchedule steps = draw_or_build_step(step_spec, k, root.fork("step"));

    // Shrink the bound b until every certificate the campaign will ask for
    // fits the step budget. All rate indices are monotone in b.
    RateInputs ri;
    ri.a = mix.a();
    ri.k = k;
    ri.theta = steps.theta_fn();
    ri.gamma = mix.gamma_fn();
    double b_target = opts.b_start;
    for (int round = 0; round < 80; ++round) {
        ri.b = b_target;
        std::uint64_t need = 0;
        try {
            if (k == 0.0) need = ri.phi(opts.eps_min_A);
            need = std::max(need, ri.phi_double_prime(opts.eps_min_T));
            need = std::max(need, ri.delta(0.1, 25));  // liminf grid corner
        } catch (const std::overflow_error&) {
            need = std::numeric_limits<std::uint64_t>::max();
        }
        const bool fits = need <= opts.step_budget && opts.step_budget - need >= opts.margin;
        if (fits || b_target < 1e-6) break;
        b_target *= 0.5;
    }

    SplitRng rng_p = root.fork("p");
    Vector p = rng_p.uniform(0.25, 0.5) * b_target * random_unit(rng_p, d);
    SplitRng rng_x = root.fork("x0");
    Vector x0 = p + rng_x.uniform(0.3, 0.5) * b_target * random_unit(rng_x, d);
    const double b = std::nextafter(std::max(norm(x0), dist(x0, p)), std::numeric_limits<double>::infinity());

    std::vector<Operator> family;
    family.reserve(n_maps);
    SplitRng rng_ops = root.fork("ops");
    ojson op_kinds = ojson::array();
    for (std::size_t i = 0; i < n_maps; ++i) {
        SplitRng rng_i = rng_ops.fork(i);
        const std::uint64_t blocks = 1 + rng_i.next_below(static_cast<std::uint64_t>(opts.max_blocks));
        std::vector<Operator> parts;
        parts.reserve(blocks);
        for (std::uint64_t bidx = 0; bidx < blocks; ++bidx) parts.push_back(random_block(rng_i, d, p, b_target));
        Operator u = compose(std::move(parts));
        op_kinds.push_back(u.kind());
        family.push_back(psc_from_nonexpansive(std::move(u), k));
    }

    ojson desc;
    desc["generated"] = true;
    desc["seed"] = seed;
    desc["dimension"] = d;
    desc["family_size"] = n_maps;
    desc["k"] = k;
    desc["b"] = b;
    desc["b_target"] = b_target;
    desc["step"] = steps.descriptor();
    desc["mix"] = mix.descriptor();
    desc["blocks"] = op_kinds;
    return ProblemInstance(std::move(family), k, std::move(x0), std::move(p), b, std::move(steps),
                           std::move(mix), std::move(desc));
}

ProblemInstance instance_from_json(const ojson& spec, std::uint64_t seed) {
    if (spec.contains("generate")) {
        const ojson& g = spec["generate"];
        GenOptions opts;
        if (g.contains("step_budget")) opts.step_budget = g["step_budget"].get<std::uint64_t>();
        return generate_instance(seed, g.value("dimension", std::size_t(2)), g.value("family_size", std::size_t(1)),
                                 g.value("k", 0.0), g.value("step", ojson::object()),
                                 g.value("mix", ojson::object()), opts);
    }
    if (!spec.contains("x0") || !spec.contains("operators")) {
        throw config_error("instance: need either 'generate' or explicit 'x0' + 'operators'");
    }
    Vector x0 = vector_from_json(spec["x0"]);
    const std::size_t d = spec.value("dimension", x0.dim());
    if (x0.dim() != d) throw config_error("instance: x0 dimension mismatch");
    Vector p = spec.contains("fixed_point") ? vector_from_json(spec["fixed_point"]) : Vector(d);
    if (p.dim() != d) throw config_error("instance: fixed_point dimension mismatch");

    std::vector<Operator> family;
    for (const auto& op_spec : spec["operators"]) family.push_back(operator_from_json(op_spec, p));
    if (family.empty()) throw config_error("instance: empty operator list");

    double k = spec.value("k", 0.0);
    for (const auto& op : family) k = std::max(k, op.k_claimed());

    if (!spec.contains("step")) throw config_error("instance: missing 'step'");
    if (!spec.contains("mix")) throw config_error("instance: missing 'mix'");
    StepSchedule steps = step_from_json(spec["step"], k);
    MixSchedule mix = mix_from_json(spec["mix"]);

    double b;
    if (spec.contains("b")) {
        b = require_number(spec, "b");
    } else {
        b = std::nextafter(std::max(norm(x0), dist(x0, p)), std::numeric_limits<double>::infinity());
    }
    ojson desc = spec;
    desc["b"] = b;
    return ProblemInstance(std::move(family), k, std::move(x0), std::move(p), b, std::move(steps),
                           std::move(mix), std::move(desc));
}

CampaignParams params_from_json(const ojson& config) {
    CampaignParams p;
    if (config.contains("schema_version") && config["schema_version"].get<int>() != 1) {
        throw config_error("config: unsupported schema_version");
    }
    p.seed = effective_seed(config);
    if (config.contains("eps_grid")) p.eps_grid_A = number_list(config["eps_grid"]);
    if (config.contains("eps_grid_T")) p.eps_grid_T = number_list(config["eps_grid_T"]);
    if (config.contains("liminf_eps")) p.liminf_eps = number_list(config["liminf_eps"]);
    if (config.contains("liminf_m")) {
        p.liminf_m.clear();
        for (const auto& v : config["liminf_m"]) p.liminf_m.push_back(v.get<std::uint64_t>());
    }
    if (config.contains("slack")) p.slack = config["slack"].get<double>();
    if (config.contains("n_max_margin")) p.n_max_margin = config["n_max_margin"].get<std::uint64_t>();
    if (config.contains("step_budget")) p.step_budget = config["step_budget"].get<std::uint64_t>();
    if (config.contains("step_cap")) p.step_cap = config["step_cap"].get<std::uint64_t>();
    if (config.contains("lemma_steps")) p.lemma_steps = config["lemma_steps"].get<std::uint64_t>();
    if (config.contains("operator_check_pairs")) {
        p.operator_check_pairs = config["operator_check_pairs"].get<std::size_t>();
    }
    if (config.contains("trace_csv_rows")) p.trace_csv_rows = config["trace_csv_rows"].get<std::size_t>();

    auto check_grid = [](const std::vector<double>& grid, const char* name) {
        if (grid.empty()) throw config_error(std::string("config: empty ") + name);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] > 0.0)) throw config_error(std::string("config: ") + name + " must be positive");
            if (i > 0 && grid[i] >= grid[i - 1]) {
                throw config_error(std::string("config: ") + name + " must be sorted descending");
            }
        }
    };
    check_grid(p.eps_grid_A, "eps_grid");
    check_grid(p.eps_grid_T, "eps_grid_T");
    check_grid(p.liminf_eps, "liminf_eps");
    if (!(p.slack >= 0.0)) throw config_error("config: slack must be nonnegative");
    return p;
}

namespace {

void push_lemma_suite(InstanceCertification& out, const Trace& tr, const ProblemInstance& inst,
                      const CampaignParams& params) {
    out.checks.push_back(check_step_inequality(tr, inst, params.slack));
    out.checks.push_back(check_fejer(tr, inst));
    out.checks.push_back(check_chain_inequalities(tr, inst, params.slack));
    out.checks.push_back(check_summed_inequality(tr, inst, params.slack));

    CheckReport psi("psi-bound");
    psi.record(0, psi_partial_sum(tr, 0, tr.length() - 1), inst.b() * inst.b(), params.slack);
    out.checks.push_back(psi);

    std::vector<std::size_t> points = {0, 1, tr.length() / 2, tr.length() - 1};
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    CheckReport preti("preti");
    for (std::size_t n : points) {
        if (n >= tr.length()) continue;
        preti.merge(check_preti(inst, tr.iterate_at(n), n, tr.res_A(n), params.slack));
    }
    out.checks.push_back(preti);
}

void push_liminf_suite(InstanceCertification& out, const Trace& tr, const ProblemInstance& inst,
                       const CampaignParams& params) {
    CheckReport rep("liminf");
    ojson cells = ojson::array();
    std::uint64_t cell = 0;
    for (double eps : params.liminf_eps) {
        for (std::uint64_t m : params.liminf_m) {
            const std::uint64_t bound = delta(inst.b(), inst.steps().theta_fn(), eps, m);
            if (bound >= tr.length()) {
                throw certificate_error("liminf grid exceeds trace length (Delta = " + std::to_string(bound) +
                                        ")");
            }
            double best = std::numeric_limits<double>::infinity();
            std::optional<std::uint64_t> witness;
            for (std::uint64_t n = m; n <= bound; ++n) {
                best = std::min(best, tr.res_A(n));
                if (!witness && tr.res_A(n) <= eps + params.slack) witness = n;
            }
            rep.record(cell++, best, eps, params.slack);
            ojson c;
            c["eps"] = eps;
            c["m"] = m;
            c["delta"] = bound;
            if (witness) {
                c["witness"] = *witness;
            } else {
                c["witness"] = nullptr;
            }
            cells.push_back(c);
        }
    }
    out.checks.push_back(rep);
    out.empirics["liminf"] = cells;
}

ojson first_hit_entry(double eps, std::optional<std::uint64_t> hit, std::uint64_t bound) {
    ojson e;
    e["eps"] = eps;
    if (hit) {
        e["first_hit"] = *hit;
    } else {
        e["first_hit"] = nullptr;
    }
    e["bound"] = bound;
    if (hit && bound > 0) {
        e["tightness"] = static_cast<double>(*hit) / static_cast<double>(bound);
    } else {
        e["tightness"] = nullptr;
    }
    return e;
}

}  // namespace

InstanceCertification certify_instance(const ProblemInstance& inst, const CampaignParams& params,
                                        std::uint64_t instance_seed, const std::string& name) {
    InstanceCertification out;
    out.name = name;
    out.descriptor = inst.descriptor();
    out.empirics = ojson::object();
    out.rate_table = ojson::array();
    try {
        const RateInputs rates = inst.rates();

        out.checks.push_back(validate_theta(inst.steps(), 50, params.slack));
        {
            const std::vector<double> eps_list = {1.0, 0.1, 0.01, 1e-4};
            const std::uint64_t window = 10 * inst.mix().gamma(1e-4) + 100;
            out.checks.push_back(validate_gamma(inst.mix(), eps_list, window));
        }
        {
            // sampled type invariants: k <= t_n < 1, weights summing to 1 and >= a
            const std::uint64_t sample_n = std::max<std::uint64_t>(inst.steps().theta(50), 1000);
            CheckReport step_range("step-range");
            CheckReport mix_range("mix-range");
            std::vector<double> row(inst.family_size());
            for (std::uint64_t n = 0; n <= sample_n; n += 1 + sample_n / 997) {
                const double tn = inst.steps().t(n);
                step_range.record(n, inst.steps().k_floor(), tn, 1e-12);  // k_floor <= t_n
                step_range.record(n, tn, 1.0, -1e-15);                    // t_n < 1
                inst.mix().lambda_row(n, std::span<double>(row));
                double sum = 0.0;
                for (std::size_t i = 0; i < row.size(); ++i) {
                    sum += row[i];
                    mix_range.record(n, inst.mix().a(), row[i], 1e-15);  // lambda_i >= a
                }
                mix_range.record(n, std::abs(sum - 1.0), 0.0, 1e-12);
            }
            out.checks.push_back(step_range);
            out.checks.push_back(mix_range);
        }

        // empirical operator certification on a seeded sample
        const double box_radius = 10.0 * norm(inst.p()) + 10.0;
        const auto pairs = sample_pairs(inst.dim(), params.operator_check_pairs, box_radius,
                                        SplitRng(instance_seed).fork("op-pairs"));
        ojson sampling;
        sampling["pairs"] = params.operator_check_pairs;
        sampling["box_radius"] = box_radius;
        sampling["seed"] = instance_seed;
        out.descriptor["operator_check_sampling"] = sampling;
        CheckReport kpsc("kpsc");
        CheckReport lip("lipschitz");
        CheckReport fixed("fixed-point");
        for (std::size_t i = 0; i < inst.family_size(); ++i) {
            kpsc.merge(check_kpsc(inst.op(i), inst.op(i).k_claimed(), pairs, params.slack));
            lip.merge(check_lipschitz(inst.op(i), pairs, params.slack));
            fixed.merge(check_fixed_point(inst.op(i), params.slack));
        }
        out.checks.push_back(kpsc);
        out.checks.push_back(lip);
        out.checks.push_back(fixed);

        CheckReport kc("k-ceiling");
        kc.record(0, inst.k(), rates.k_ceiling(), 1e-12);
        out.checks.push_back(kc);

        // rate table
        for (double eps : params.eps_grid_A) {
            ojson row;
            row["eps"] = eps;
            row["delta_m0"] = rates.delta(eps, 0);
            row["phi"] = rates.phi(eps);
            out.rate_table.push_back(row);
        }
        for (double eps : params.eps_grid_T) {
            ojson row;
            row["eps"] = eps;
            row["phi_prime"] = rates.phi_prime(eps);
            row["phi_double_prime"] = rates.phi_double_prime(eps);
            out.rate_table.push_back(row);
        }

        std::uint64_t need_T = 0;
        for (double eps : params.eps_grid_T) need_T = std::max(need_T, rates.phi_double_prime(eps));

        if (inst.k() == 0.0) {
            std::uint64_t need = need_T;
            for (double eps : params.eps_grid_A) need = std::max(need, rates.phi(eps));
            for (double eps : params.liminf_eps) {
                for (std::uint64_t m : params.liminf_m) need = std::max(need, rates.delta(eps, m));
            }
            const std::uint64_t n_long = need + params.n_max_margin;
            if (n_long > params.step_cap) {
                throw config_error("instance certificates need " + std::to_string(n_long) +
                                   " steps, above step_cap");
            }
            Trace long_tr = iterate(inst, n_long, TraceOptions{false, false});
            Trace short_tr = iterate(inst, std::min(params.lemma_steps, n_long), TraceOptions{true, true});

            push_lemma_suite(out, short_tr, inst, params);
            push_liminf_suite(out, long_tr, inst, params);
            for (double eps : params.eps_grid_A) {
                out.checks.push_back(certify_rate_A(long_tr, inst, eps, params.slack));
            }
            for (double eps : params.eps_grid_T) {
                out.checks.push_back(certify_rate_T(long_tr, inst, eps, params.slack));
            }

            ojson hits_a = ojson::array(), hits_t = ojson::array();
            for (double eps : params.eps_grid_A) {
                hits_a.push_back(first_hit_entry(eps, first_hit_A(long_tr, eps), rates.phi(eps)));
            }
            for (double eps : params.eps_grid_T) {
                hits_t.push_back(first_hit_entry(eps, first_hit_T(long_tr, eps), rates.phi_double_prime(eps)));
            }
            out.empirics["first_hit_res_A"] = hits_a;
            out.empirics["first_hit_res_T"] = hits_t;
            out.empirics["final_dist_p"] = long_tr.dist_p(long_tr.length() - 1);
            out.trace_csv = render_trace_csv(short_tr, params.trace_csv_rows);
        } else {
            ProblemInstance red = reduce_instance(inst);
            const RateInputs red_rates = red.rates();

            // reduction equivalence over 100 steps
            const std::uint64_t eq_steps = 100;
            Trace orig_eq = iterate(inst, eq_steps, TraceOptions{true, true});
            Trace red_eq = iterate(red, eq_steps, TraceOptions{true, true});
            CheckReport eq("reduction-equivalence");
            for (std::size_t n = 0; n < orig_eq.length(); ++n) {
                eq.record(n, dist(orig_eq.iterate_at(n), red_eq.iterate_at(n)), 0.0, 1e-12);
            }
            out.checks.push_back(eq);
            out.checks.push_back(residual_relation(orig_eq, red_eq, inst.k()));

            // the lemma/liminf/A-rate suite runs on the reduced (nonexpansive) route
            std::uint64_t need_red = params.lemma_steps;
            for (double eps : params.eps_grid_T) need_red = std::max(need_red, red_rates.phi(eps));
            for (double eps : params.liminf_eps) {
                for (std::uint64_t m : params.liminf_m) need_red = std::max(need_red, red_rates.delta(eps, m));
            }
            const std::uint64_t n_red = need_red + params.n_max_margin;
            const std::uint64_t n_long = need_T + params.n_max_margin;
            if (std::max(n_red, n_long) > params.step_cap) {
                throw config_error("instance certificates need " + std::to_string(std::max(n_red, n_long)) +
                                   " steps, above step_cap");
            }
            Trace red_tr = iterate(red, n_red, TraceOptions{true, true});
            push_lemma_suite(out, red_tr, red, params);
            push_liminf_suite(out, red_tr, red, params);
            for (double eps : params.eps_grid_T) {
                out.checks.push_back(certify_rate_A(red_tr, red, eps, params.slack));
            }

            Trace long_tr = iterate(inst, n_long, TraceOptions{false, false});
            for (double eps : params.eps_grid_T) {
                out.checks.push_back(certify_rate_T(long_tr, inst, eps, params.slack));
            }

            ojson hits_a = ojson::array(), hits_t = ojson::array();
            for (double eps : params.eps_grid_T) {
                hits_a.push_back(first_hit_entry(eps, first_hit_A(red_tr, eps), red_rates.phi(eps)));
                hits_t.push_back(first_hit_entry(eps, first_hit_T(long_tr, eps), rates.phi_double_prime(eps)));
            }
            out.empirics["first_hit_res_A_reduced"] = hits_a;
            out.empirics["first_hit_res_T"] = hits_t;
            out.empirics["final_dist_p"] = long_tr.dist_p(long_tr.length() - 1);
            out.trace_csv = render_trace_csv(orig_eq, params.trace_csv_rows);
        }

        bool all_pass = true;
        for (const auto& c : out.checks) all_pass = all_pass && c.passed();
        out.status = all_pass ? "pass" : "fail";
    } catch (const std::exception& e) {
        out.status = "error";
        out.error_message = e.what();
    }
    return out;
}

ojson InstanceCertification::to_json() const {
    ojson j;
    j["name"] = name;
    j["status"] = status;
    if (!error_message.empty()) j["error"] = error_message;
    j["descriptor"] = descriptor;
    j["rates"] = rate_table;
    ojson cs = ojson::array();
    for (const auto& c : checks) cs.push_back(c.to_json());
    j["checks"] = cs;
    j["empirics"] = empirics;
    return j;
}

bool CertificationReport::passed() const {
    for (const auto& inst : instances) {
        if (!inst.passed()) return false;
    }
    return true;
}

ojson CertificationReport::to_json() const {
    ojson j;
    j["schema_version"] = 1;
    j["status"] = passed() ? "pass" : "fail";
    ojson summary;
    summary["instances"] = instances.size();
    std::size_t failed = 0, errored = 0;
    for (const auto& inst : instances) {
        if (inst.status == "error") ++errored;
        else if (inst.status == "fail") ++failed;
    }
    summary["failed"] = failed;
    summary["errored"] = errored;
    j["summary"] = summary;
    j["config"] = config_echo;
    ojson arr = ojson::array();
    for (const auto& inst : instances) arr.push_back(inst.to_json());
    j["instances"] = arr;
    return j;
}

CertificationReport run_campaign(const ojson& config) {
    const CampaignParams params = params_from_json(config);
    CertificationReport report;
    report.config_echo = config;
    report.config_echo["seed"] = params.seed;

    SplitRng seeder = SplitRng(params.seed).fork("instances");
    std::size_t index = 0;

    auto run_one = [&](const std::function<ProblemInstance(std::uint64_t)>& build) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "instance_%03zu", index);
        const std::string name(buf);
        const std::uint64_t inst_seed = seeder.fork(index).next_u64();
        ++index;
        try {
            ProblemInstance inst = build(inst_seed);
            report.instances.push_back(certify_instance(inst, params, inst_seed, name));
        } catch (const std::exception& e) {
            InstanceCertification bad;
            bad.name = name;
            bad.status = "error";
            bad.error_message = e.what();
            report.instances.push_back(std::move(bad));
        }
    };

    if (config.contains("instance")) {
        run_one([&](std::uint64_t s) { return instance_from_json(config["instance"], s); });
    }
    if (config.contains("suite")) {
        for (const auto& entry : config["suite"]) {
            const std::size_t count = entry.value("count", std::size_t(1));
            std::vector<std::size_t> dims = {2};
            if (entry.contains("dimensions")) {
                dims.clear();
                for (const auto& v : entry["dimensions"]) dims.push_back(v.get<std::size_t>());
            }
            std::vector<std::size_t> sizes = {1};
            if (entry.contains("family_sizes")) {
                sizes.clear();
                for (const auto& v : entry["family_sizes"]) sizes.push_back(v.get<std::size_t>());
            }
            std::vector<std::string> mixes = {"constant"};
            if (entry.contains("mixes")) {
                mixes.clear();
                for (const auto& v : entry["mixes"]) mixes.push_back(v.get<std::string>());
            }
            std::vector<double> t_values;
            if (entry.contains("t_values")) t_values = number_list(entry["t_values"]);

            for (std::size_t j = 0; j < count; ++j) {
                const std::size_t d = dims[j % dims.size()];
                const std::size_t n_maps = sizes[(j / dims.size()) % sizes.size()];
                const std::string mix_kind = mixes[j % mixes.size()];

                double k = entry.value("k", 0.0);
                ojson step_spec;
                step_spec["type"] = "constant";
                if (entry.contains("k_fraction_of_ceiling")) {
                    // reference schedule at k = 0 fixes theta(1); the pigeonhole
                    // ceiling then bounds every admissible k for that theta
                    const double t_ref = t_values.empty() ? 0.75 : t_values[0];
                    StepSchedule ref = constant_step(t_ref, 0.0);
                    k = entry["k_fraction_of_ceiling"].get<double>() * k_ceiling(ref.theta_fn());
                } else if (k == 0.0 && !t_values.empty()) {
                    step_spec["t"] = t_values[j % t_values.size()];
                }
                ojson mix_spec;
                mix_spec["type"] = mix_kind;

                run_one([&](std::uint64_t s) {
                    GenOptions opts;
                    opts.step_budget = params.step_budget;
                    opts.eps_min_A = params.eps_grid_A.back();
                    opts.eps_min_T = params.eps_grid_T.back();
                    opts.margin = params.n_max_margin;
                    return generate_instance(s, d, n_maps, k, step_spec, mix_spec, opts);
                });
            }
        }
    }
    if (report.instances.empty() && !config.contains("instance") && !config.contains("suite")) {
        // an empty campaign is vacuously passing
        report.config_echo["note"] = "no instances configured";
    }
    return report;
}

ojson default_campaign_config(std::uint64_t seed) {
    ojson cfg;
    cfg["schema_version"] = 1;
    cfg["seed"] = seed;
    cfg["eps_grid"] = {1.0, 0.1, 0.01};
    cfg["eps_grid_T"] = {1.0, 0.1};
    cfg["liminf_eps"] = {1.0, 0.5, 0.1};
    cfg["liminf_m"] = {0, 5, 25};
    cfg["slack"] = 1e-9;
    cfg["n_max_margin"] = 100;
    cfg["step_budget"] = 800000;
    cfg["step_cap"] = 5000000;
    cfg["lemma_steps"] = 400;
    cfg["operator_check_pairs"] = 1000;
    cfg["trace_csv_rows"] = 1000;
    ojson suite = ojson::array();
    {
        ojson e;
        e["count"] = 50;
        e["k"] = 0.0;
        e["dimensions"] = {1, 2, 3, 4, 6, 8};
        e["family_sizes"] = {1, 2, 3, 4};
        e["mixes"] = {"constant", "geometric"};
        e["t_values"] = {0.5, 0.6, 0.75};
        suite.push_back(e);
    }
    for (double k : {0.3, 0.5}) {
        ojson e;
        e["count"] = 6;
        e["k"] = k;
        e["dimensions"] = {1, 2, 4, 8};
        e["family_sizes"] = {1, 2, 3, 4};
        e["mixes"] = {"constant", "geometric"};
        suite.push_back(e);
    }
    {
        ojson e;
        e["count"] = 6;
        e["k_fraction_of_ceiling"] = 0.9;
        e["dimensions"] = {2, 4, 8};
        e["family_sizes"] = {1, 2, 3};
        e["mixes"] = {"constant", "geometric"};
        e["t_values"] = {0.75};
        suite.push_back(e);
    }
    cfg["suite"] = suite;
    return cfg;
}

// ---------------------------------------------------------------------------
// CSV + emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string render_trace_csv(const Trace& trace, std::size_t max_rows) {
    if (!trace.has_per_map()) throw std::logic_error("render_trace_csv: needs per-map residuals");
    std::string out = "n,res_A";
    for (std::size_t i = 1; i <= trace.family_size(); ++i) out += ",res_T_" + std::to_string(i);
    out += ",dist_p,t_n\n";
    const std::size_t rows = std::min(trace.length(), max_rows);
    for (std::size_t n = 0; n < rows; ++n) {
        out += std::to_string(n);
        out += ',';
        out += fmt_double(trace.res_A(n));
        for (std::size_t i = 0; i < trace.family_size(); ++i) {
            out += ',';
            out += fmt_double(trace.res_T(n, i));
        }
        out += ',';
        out += fmt_double(trace.dist_p(n));
        out += ',';
        out += fmt_double(trace.t_n(n));
        out += '\n';
    }
    return out;
}

TraceCsv parse_trace_csv(const std::string& text) {
    TraceCsv doc;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("parse_trace_csv: empty document");
    std::istringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) doc.columns.push_back(col);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        const char* ptr = line.data();
        const char* end = line.data() + line.size();
        while (ptr < end) {
            double v = 0.0;
            auto res = std::from_chars(ptr, end, v);
            if (res.ec != std::errc()) throw std::invalid_argument("parse_trace_csv: bad number");
            row.push_back(v);
            ptr = res.ptr;
            if (ptr < end && *ptr == ',') ++ptr;
        }
        if (row.size() != doc.columns.size()) throw std::invalid_argument("parse_trace_csv: ragged row");
        doc.rows.push_back(std::move(row));
    }
    return doc;
}

std::string render_trace_csv(const TraceCsv& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.columns.size(); ++i) {
        if (i) out += ',';
        out += doc.columns[i];
    }
    out += '\n';
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (i == 0) {
                out += std::to_string(static_cast<std::uint64_t>(row[0]));
            } else {
                out += fmt_double(row[i]);
            }
        }
        out += '\n';
    }
    return out;
}

void emit_report(const CertificationReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(out_dir / "summary.json", std::ios::binary);
        if (!f) throw std::runtime_error("emit_report: cannot write summary.json");
        f << report.to_json().dump(2) << '\n';
    }
    const auto traces_dir = out_dir / "traces";
    std::filesystem::create_directories(traces_dir);
    for (const auto& inst : report.instances) {
        if (inst.trace_csv.empty()) continue;
        std::ofstream f(traces_dir / (inst.name + ".csv"), std::ios::binary);
        if (!f) throw std::runtime_error("emit_report: cannot write trace CSV");
        f << inst.trace_csv;
    }
}

std::uint64_t effective_seed(const ojson& config) {
    if (const char* env = std::getenv("REGRATE_SEED")) {
        char* tail = nullptr;
        const unsigned long long v = std::strtoull(env, &tail, 10);
        if (tail == env || (tail && *tail != '\0')) {
            throw config_error("REGRATE_SEED: not a valid unsigned integer");
        }
        return static_cast<std::uint64_t>(v);
    }
    if (config.contains("seed")) return config["seed"].get<std::uint64_t>();
    return 1;
}

}  // namespace regrate
