// Command-line front end: rate certificates, single runs, single-instance
// verification and batch certification campaigns.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regrate/harness.hpp"

namespace {

using regrate::ojson;

ojson load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw regrate::config_error("cannot open config file: " + path);
    ojson cfg;
    try {
        f >> cfg;
    } catch (const std::exception& e) {
        throw regrate::config_error(std::string("config parse error: ") + e.what());
    }
    return cfg;
}

// theta specs: identity | zero | linear:SLOPE | step:t=T,k=K
ojson parse_theta_spec(const std::string& spec) {
    ojson j;
    if (spec == "identity" || spec == "zero") {
        j["type"] = spec;
        return j;
    }
    if (spec.rfind("linear:", 0) == 0) {
        j["type"] = "linear";
        j["slope"] = std::stod(spec.substr(7));
        return j;
    }
    if (spec.rfind("step:", 0) == 0) {
        j["type"] = "step";
        for (std::size_t pos = 5; pos < spec.size();) {
            const std::size_t eq = spec.find('=', pos);
            if (eq == std::string::npos) throw regrate::config_error("bad theta spec: " + spec);
            std::size_t end = spec.find(',', eq);
            if (end == std::string::npos) end = spec.size();
            j[spec.substr(pos, eq - pos)] = std::stod(spec.substr(eq + 1, end - eq - 1));
            pos = end + 1;
        }
        return j;
    }
    throw regrate::config_error("unknown theta spec: " + spec);
}

// gamma specs: zero | tail:c=C,r=R
ojson parse_gamma_spec(const std::string& spec) {
    ojson j;
    if (spec == "zero") {
        j["type"] = "zero";
        return j;
    }
    if (spec.rfind("tail:", 0) == 0) {
        j["type"] = "geometric_tail";
        for (std::size_t pos = 5; pos < spec.size();) {
            const std::size_t eq = spec.find('=', pos);
            if (eq == std::string::npos) throw regrate::config_error("bad gamma spec: " + spec);
            std::size_t end = spec.find(',', eq);
            if (end == std::string::npos) end = spec.size();
            const std::string key = spec.substr(pos, eq - pos);
            const double val = std::stod(spec.substr(eq + 1, end - eq - 1));
            if (key == "c") j["coeff"] = val;
            else if (key == "r") j["ratio"] = val;
            else throw regrate::config_error("bad gamma spec key: " + key);
            pos = end + 1;
        }
        return j;
    }
    throw regrate::config_error("unknown gamma spec: " + spec);
}

regrate::ThetaFn theta_from_spec(const ojson& j, double k) {
    if (j["type"] == "step") {
        return regrate::constant_step(j.value("t", 0.5), j.value("k", k)).theta_fn();
    }
    return regrate::theta_from_json(j);
}

int cmd_rate(double a, double b, double k, const std::string& theta_spec, const std::string& gamma_spec,
             const std::vector<double>& eps_list, std::uint64_t m) {
    const ojson tj = parse_theta_spec(theta_spec);
    const ojson gj = parse_gamma_spec(gamma_spec);
    regrate::RateInputs rates;
    rates.a = a;
    rates.b = b;
    rates.k = k;
    rates.theta = theta_from_spec(tj, k);
    rates.gamma = regrate::gamma_from_json(gj);

    ojson out;
    out["schema_version"] = 1;
    ojson inputs;
    inputs["a"] = a;
    inputs["b"] = b;
    inputs["k"] = k;
    inputs["theta"] = tj;
    inputs["gamma"] = gj;
    out["inputs"] = inputs;
    out["k_ceiling"] = rates.k_ceiling();
    ojson certs = ojson::array();
    for (double eps : eps_list) {
        ojson c;
        c["eps"] = eps;
        c["delta"] = rates.delta(eps, m);
        c["phi"] = rates.phi(eps);
        c["phi_prime"] = rates.phi_prime(eps);
        c["phi_double_prime"] = rates.phi_double_prime(eps);
        certs.push_back(c);
    }
    out["m"] = m;
    out["certificates"] = certs;
    std::cout << out.dump(2) << '\n';
    return 0;
}

regrate::ProblemInstance build_instance(const ojson& cfg, std::uint64_t seed) {
    try {
        return regrate::instance_from_json(cfg.at("instance"), seed);
    } catch (const regrate::config_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw regrate::config_error(std::string("instance: ") + e.what());
    }
}

int cmd_run(const std::string& config_path, const std::string& trace_dir, std::uint64_t n_max) {
    const ojson cfg = load_config(config_path);
    if (!cfg.contains("instance")) throw regrate::config_error("run: config needs an 'instance' object");
    const std::uint64_t seed = regrate::effective_seed(cfg);
    regrate::ProblemInstance inst = build_instance(cfg, seed);
    regrate::Trace tr = regrate::iterate(inst, n_max, regrate::TraceOptions{false, true});

    std::filesystem::path dir(trace_dir);
    std::filesystem::create_directories(dir);
    const auto csv_path = dir / "trace.csv";
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw std::runtime_error("run: cannot write " + csv_path.string());
        f << regrate::render_trace_csv(tr);
    }

    ojson out;
    out["schema_version"] = 1;
    out["seed"] = seed;
    out["steps"] = tr.length();
    out["final_res_A"] = tr.res_A(tr.length() - 1);
    out["final_res_T_max"] = tr.res_T_max(tr.length() - 1);
    out["final_dist_p"] = tr.dist_p(tr.length() - 1);
    out["trace_csv"] = csv_path.string();
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_verify(const std::string& config_path) {
    const ojson cfg = load_config(config_path);
    if (!cfg.contains("instance")) throw regrate::config_error("verify: config needs an 'instance' object");
    const regrate::CampaignParams params = regrate::params_from_json(cfg);
    regrate::ProblemInstance inst = build_instance(cfg, params.seed);

    regrate::CertificationReport report;
    report.config_echo = cfg;
    report.config_echo["seed"] = params.seed;
    report.instances.push_back(regrate::certify_instance(inst, params, params.seed, "instance"));
    std::cout << report.to_json().dump(2) << '\n';
    return report.passed() ? 0 : 1;
}

int cmd_campaign(const std::string& config_path, const std::string& out_dir) {
    const ojson cfg = load_config(config_path);
    regrate::CertificationReport report = regrate::run_campaign(cfg);
    regrate::emit_report(report, out_dir);
    std::size_t pass = 0;
    for (const auto& inst : report.instances) {
        if (inst.passed()) ++pass;
        std::cerr << inst.name << ": " << inst.status << '\n';
    }
    std::cout << "campaign " << (report.passed() ? "PASS" : "FAIL") << " (" << pass << "/"
              << report.instances.size() << " instances), report in " << out_dir << '\n';
    return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regrate: rate certificates for the parallel fixed-point algorithm"};
    app.require_subcommand(1);

    // rate
    auto* rate = app.add_subcommand("rate", "print Delta/Phi/Phi'/Phi'' certificate values as JSON");
    double a = 1.0, b = 1.0, k = 0.0;
    std::string theta_spec = "identity", gamma_spec = "zero";
    std::vector<double> eps_list;
    std::uint64_t m = 0;
    rate->add_option("--a", a, "mixing lower bound a in (0,1]")->required();
    rate->add_option("--b", b, "norm bound b > 0")->required();
    rate->add_option("--k", k, "strictness constant k in [0,1)");
    rate->add_option("--theta", theta_spec, "theta spec: identity | linear:S | step:t=T,k=K");
    rate->add_option("--gamma", gamma_spec, "gamma spec: zero | tail:c=C,r=R");
    rate->add_option("--eps", eps_list, "epsilon values")->required()->delimiter(',');
    rate->add_option("--m", m, "left endpoint for Delta");

    // run
    auto* run = app.add_subcommand("run", "iterate one instance and emit its trace CSV");
    std::string run_config, trace_out = ".";
    std::uint64_t n_max = 1000;
    run->add_option("--config", run_config, "config file with an 'instance' object")->required();
    run->add_option("--trace-out", trace_out, "output directory for trace.csv");
    run->add_option("--n-max", n_max, "number of iteration steps");

    // verify
    auto* verify = app.add_subcommand("verify", "full certification of one instance (exit 0 pass, 1 fail)");
    std::string verify_config;
    verify->add_option("--config", verify_config, "config file with an 'instance' object")->required();

    // campaign
    auto* campaign = app.add_subcommand("campaign", "batch certification over a config suite");
    std::string campaign_config, campaign_out;
    campaign->add_option("--config", campaign_config, "campaign config file")->required();
    campaign->add_option("--out", campaign_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate->parsed()) return cmd_rate(a, b, k, theta_spec, gamma_spec, eps_list, m);
        if (run->parsed()) return cmd_run(run_config, trace_out, n_max);
        if (verify->parsed()) return cmd_verify(verify_config);
        if (campaign->parsed()) return cmd_campaign(campaign_config, campaign_out);
    } catch (const regrate::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
