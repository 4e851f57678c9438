#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "regrate/harness.hpp"

using namespace regrate;

namespace {

ojson worked_example_config() {
    ojson cfg;
    cfg["schema_version"] = 1;
    cfg["seed"] = 7;
    cfg["eps_grid"] = {1.0, 0.5, 0.1};
    cfg["eps_grid_T"] = {1.0, 0.5};
    cfg["liminf_eps"] = {1.0, 0.5, 0.1};
    cfg["liminf_m"] = {0, 5, 25};
    ojson inst;
    inst["dimension"] = 1;
    inst["k"] = 0.0;
    inst["fixed_point"] = {0.0};
    inst["x0"] = {1.0};
    inst["b"] = 1.0;
    inst["operators"] = ojson::array({ojson{{"kind", "reflection"}}});
    inst["step"] = ojson{{"type", "constant"}, {"t", 0.75}};
    inst["mix"] = ojson{{"type", "constant"}, {"weights", {1.0}}};
    cfg["instance"] = inst;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("generate_instance is deterministic and certified") {
    ojson step_spec{{"type", "constant"}};
    ojson mix_spec{{"type", "geometric"}};
    GenOptions opts;
    opts.step_budget = 100000;

    auto a = generate_instance(42, 3, 2, 0.5, step_spec, mix_spec, opts);
    auto b = generate_instance(42, 3, 2, 0.5, step_spec, mix_spec, opts);

    CHECK(a.b() == b.b());
    CHECK(a.x0() == b.x0());
    CHECK(a.p() == b.p());
    CHECK(a.k() == 0.5);

    // bit-identical behaviour, not just identical metadata
    SplitRng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        for (std::size_t i = 0; i < a.family_size(); ++i) {
            CHECK(apply(a.op(i), x) == apply(b.op(i), x));
        }
    }

    // each member certified as a k-strict pseudocontraction by sampling
    auto pairs = sample_pairs(3, 1000, 10.0 * norm(a.p()) + 10.0, SplitRng(99));
    for (std::size_t i = 0; i < a.family_size(); ++i) {
        CHECK(check_kpsc(a.op(i), 0.5, pairs).violations() == 0);
    }

    // a different seed gives a different instance
    auto c = generate_instance(43, 3, 2, 0.5, step_spec, mix_spec, opts);
    CHECK(c.x0().coords() != a.x0().coords());
}

TEST_CASE("generated instances respect the step budget") {
    ojson step_spec{{"type", "constant"}};
    for (std::uint64_t seed : {1, 2, 3, 4}) {
        for (double k : {0.0, 0.5}) {
            for (std::size_t n_maps : {1, 4}) {
                GenOptions opts;
                opts.step_budget = 50000;
                auto inst =
                    generate_instance(seed, 4, n_maps, k, step_spec, ojson{{"type", "constant"}}, opts);
                const RateInputs r = inst.rates();
                std::uint64_t need = r.phi_double_prime(0.1);
                if (k == 0.0) need = std::max(need, r.phi(0.01));
                CHECK(need + 100 <= 50000);
            }
        }
    }
}

TEST_CASE("operator_from_json grammar") {
    const Vector p{0.0, 0.0};
    auto refl = operator_from_json(ojson{{"kind", "reflection"}}, p);
    CHECK(apply(refl, Vector{1.0, 2.0}) == Vector{-1.0, -2.0});

    auto psc = operator_from_json(ojson{{"kind", "psc"}, {"k", 0.5}, {"of", ojson{{"kind", "reflection"}}}},
                                  Vector{0.0});
    CHECK(apply(psc, Vector{1.0})[0] == -3.0);
    CHECK(psc.k_claimed() == 0.5);

    ojson conv;
    conv["kind"] = "convex";
    conv["weights"] = {0.5, 0.5};
    conv["of"] = ojson::array({ojson{{"kind", "identity"}}, ojson{{"kind", "reflection"}}});
    auto zero = operator_from_json(conv, p);
    CHECK(norm(apply(zero, Vector{3.0, -1.0})) == 0.0);

    CHECK_THROWS_AS(operator_from_json(ojson{{"kind", "warp"}}, p), config_error);
}

TEST_CASE("instance_from_json explicit path computes b when absent") {
    ojson spec;
    spec["dimension"] = 2;
    spec["x0"] = {3.0, 4.0};
    spec["operators"] = ojson::array({ojson{{"kind", "contraction"}, {"factor", 0.5}}});
    spec["step"] = ojson{{"type", "constant"}, {"t", 0.5}};
    spec["mix"] = ojson{{"type", "constant"}, {"weights", {1.0}}};
    auto inst = instance_from_json(spec, 1);
    CHECK(inst.b() == std::nextafter(5.0, 6.0));  // ||x0|| = 5 rounded up
    CHECK(inst.p() == Vector{0.0, 0.0});
}

TEST_CASE("verify of the worked example passes with the expected empirics") {
    const ojson cfg = worked_example_config();
    const CampaignParams params = params_from_json(cfg);
    auto inst = instance_from_json(cfg["instance"], params.seed);
    auto cert = certify_instance(inst, params, params.seed, "worked");

    REQUIRE(cert.status == "pass");

    // Phi(0.5) = 91 for theta(N) = ceil(16N/3), gamma == 0
    bool saw_phi_05 = false;
    for (const auto& row : cert.rate_table) {
        if (row.contains("phi") && row["eps"].get<double>() == 0.5) {
            CHECK(row["phi"].get<std::uint64_t>() == 91);
            saw_phi_05 = true;
        }
    }
    CHECK(saw_phi_05);

    // empirical first hit for eps = 0.5 is n = 2 (res_A = 2^(1-n))
    bool saw_hit = false;
    for (const auto& e : cert.empirics["first_hit_res_A"]) {
        if (e["eps"].get<double>() == 0.5) {
            CHECK(e["first_hit"].get<std::uint64_t>() == 2);
            CHECK(e["bound"].get<std::uint64_t>() == 91);
            saw_hit = true;
        }
    }
    CHECK(saw_hit);

    // liminf witness at (eps = 1, m = 0) is n = 1
    bool saw_witness = false;
    for (const auto& cell : cert.empirics["liminf"]) {
        if (cell["eps"].get<double>() == 1.0 && cell["m"].get<std::uint64_t>() == 0) {
            CHECK(cell["witness"].get<std::uint64_t>() == 1);
            saw_witness = true;
        }
    }
    CHECK(saw_witness);
}

TEST_CASE("a corrupted theta fails the campaign at validate_theta") {
    ojson cfg = worked_example_config();
    cfg["instance"]["step"]["theta"] = ojson{{"type", "zero"}};
    CertificationReport report = run_campaign(cfg);
    REQUIRE(report.instances.size() == 1);
    CHECK(!report.passed());
    bool theta_failed = false;
    for (const auto& check : report.instances[0].checks) {
        if (check.name() == "validate-theta") theta_failed = !check.passed();
    }
    CHECK(theta_failed);
}

TEST_CASE("an empty campaign passes vacuously") {
    ojson cfg;
    cfg["schema_version"] = 1;
    cfg["seed"] = 3;
    CertificationReport report = run_campaign(cfg);
    CHECK(report.instances.empty());
    CHECK(report.passed());
    CHECK(report.to_json()["status"] == "pass");
}

TEST_CASE("campaign reports are deterministic and violations carry the schema fields") {
    ojson cfg = worked_example_config();
    CertificationReport r1 = run_campaign(cfg);
    CertificationReport r2 = run_campaign(cfg);
    CHECK(r1.to_json().dump(2) == r2.to_json().dump(2));
    CHECK(r1.passed());

    // force a violation and check the violation object schema
    ojson bad = worked_example_config();
    bad["instance"]["step"]["theta"] = ojson{{"type", "zero"}};
    CertificationReport rb = run_campaign(bad);
    REQUIRE(!rb.passed());
    const ojson jb = rb.to_json();
    bool found = false;
    for (const auto& check : jb["instances"][0]["checks"]) {
        if (check["status"] == "fail") {
            REQUIRE(check.contains("violation_samples"));
            const auto& v = check["violation_samples"][0];
            CHECK(v.contains("check"));
            CHECK(v.contains("n"));
            CHECK(v.contains("lhs"));
            CHECK(v.contains("rhs"));
            CHECK(v.contains("slack"));
            found = true;
            break;
        }
    }
    CHECK(found);
}

TEST_CASE("emit_report is byte-identical across emissions and CSV round-trips") {
    const ojson cfg = worked_example_config();
    CertificationReport report = run_campaign(cfg);
    REQUIRE(report.passed());

    const auto base = std::filesystem::temp_directory_path() / "regrate_emit_test";
    std::filesystem::remove_all(base);
    emit_report(report, base / "one");
    emit_report(report, base / "two");

    const std::string s1 = slurp(base / "one" / "summary.json");
    const std::string s2 = slurp(base / "two" / "summary.json");
    CHECK(!s1.empty());
    CHECK(s1 == s2);

    const ojson summary = ojson::parse(s1);
    CHECK(summary["status"] == "pass");
    CHECK(summary["schema_version"] == 1);

    const auto csv_path = base / "one" / "traces" / "instance_000.csv";
    REQUIRE(std::filesystem::exists(csv_path));
    const std::string csv = slurp(csv_path);
    TraceCsv parsed = parse_trace_csv(csv);
    CHECK(parsed.columns == std::vector<std::string>{"n", "res_A", "res_T_1", "dist_p", "t_n"});
    CHECK(render_trace_csv(parsed) == csv);

    std::filesystem::remove_all(base);
}

TEST_CASE("REGRATE_SEED overrides the config seed") {
    ojson cfg;
    cfg["seed"] = 5;
    CHECK(effective_seed(cfg) == 5);
    setenv("REGRATE_SEED", "123", 1);
    CHECK(effective_seed(cfg) == 123);
    setenv("REGRATE_SEED", "not-a-number", 1);
    CHECK_THROWS_AS(effective_seed(cfg), config_error);
    unsetenv("REGRATE_SEED");
    CHECK(effective_seed(cfg) == 5);
}

TEST_CASE("trace CSV renders n, res_A, res_T_i, dist_p, t_n at 17 significant digits") {
    ojson step_spec{{"type", "constant"}, {"t", 0.75}};
    GenOptions opts;
    opts.step_budget = 50000;
    auto inst = generate_instance(77, 2, 2, 0.0, step_spec, ojson{{"type", "constant"}}, opts);
    auto tr = iterate(inst, 5, TraceOptions{false, true});
    const std::string csv = render_trace_csv(tr);
    TraceCsv parsed = parse_trace_csv(csv);
    REQUIRE(parsed.columns ==
            std::vector<std::string>{"n", "res_A", "res_T_1", "res_T_2", "dist_p", "t_n"});
    REQUIRE(parsed.rows.size() == 6);
    for (std::size_t n = 0; n < parsed.rows.size(); ++n) {
        CHECK(parsed.rows[n][0] == static_cast<double>(n));
        CHECK(parsed.rows[n][1] == tr.res_A(n));  // 17 significant digits round-trip doubles exactly
        CHECK(parsed.rows[n][5] == tr.t_n(n));
    }
    CHECK(render_trace_csv(parsed) == csv);
}
