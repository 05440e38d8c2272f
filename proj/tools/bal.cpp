// Command-line entry point for the experiments.
#include "bal/common.hpp"
#include "bal/repro.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Flags {
    std::string dist, config, out;
    int n = 0, h = 0, agents = 0;
    double budget = 0, tol = 0, supply = 0, v_lo = 0, v_hi = 0, pi = 0, eps = 0;
    std::uint64_t seed = 0, samples = 0;
    bool exact = false;
};

void add_common(CLI::App* c, Flags& f) {
    c->add_option("--dist", f.dist, "Distribution: JSON file or inline JSON");
    c->add_option("--n", f.n, "Agent count (or N for irregular)");
    c->add_option("--budget", f.budget, "Public budget");
    c->add_option("--seed", f.seed, "Random seed (default 1)");
    c->add_option("--samples", f.samples, "Monte Carlo samples (0 skips Monte Carlo)");
    c->add_option("--tol", f.tol, "Tolerance for the headline ratio");
    c->add_option("--out", f.out, "Output directory (default results)");
    c->add_flag("--exact", f.exact, "Exact rational arithmetic");
    c->add_option("--config", f.config, "JSON config file or inline JSON; flags override it");
}

std::string read_json_arg(const std::string& s) {
    const auto p = s.find_first_not_of(" \t\r\n");
    if (p != std::string::npos && (s[p] == '{' || s[p] == '[')) return s;
    std::ifstream in(s);
    if (!in) throw bal::ConfigError("cannot read " + s);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bal::ExperimentConfig collect(const CLI::App* c, const Flags& f) {
    bal::ExperimentConfig cfg;
    if (c->count("--config")) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_json_arg(f.config));
        } catch (const nlohmann::json::exception& e) {
            throw bal::ConfigError(std::string("config: ") + e.what());
        }
        cfg = bal::ExperimentConfig::from_json(j);
    }
    bal::ExperimentConfig o;
    auto has = [&](const char* name) { return c->get_option_no_throw(name) && c->count(name) > 0; };
    if (has("--dist")) {
        try {
            const auto p = f.dist.find_first_not_of(" \t\r\n");
            o.dist = p != std::string::npos && f.dist[p] == '{' ? nlohmann::json::parse(f.dist)
                                                               : nlohmann::json(f.dist);
        } catch (const nlohmann::json::exception& e) {
            throw bal::ConfigError(std::string("dist: ") + e.what());
        }
    }
    if (has("--n")) o.n = f.n;
    if (has("--budget")) o.budget = f.budget;
    if (has("--seed")) o.seed = f.seed;
    if (has("--samples")) o.samples = f.samples;
    if (has("--tol")) o.tol = f.tol;
    if (has("--out")) o.out = f.out;
    o.exact = f.exact;
    if (has("--h")) o.h = f.h;
    if (has("--supply")) o.supply = f.supply;
    if (has("--agents")) o.agents = f.agents;
    if (has("--vlo")) o.v_lo = f.v_lo;
    if (has("--vhi")) o.v_hi = f.v_hi;
    if (has("--pi")) o.pi = f.pi;
    if (has("--eps")) o.eps = f.eps;
    cfg.merge(o);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budget-constrained auction experiments"};
    app.require_subcommand(1);
    Flags f;
    std::vector<std::pair<CLI::App*, std::string>> leaves;

    CLI::App* repro = app.add_subcommand("repro", "Reproduce a headline result");
    repro->require_subcommand(1);
    const std::vector<std::pair<std::string, std::string>> repros{
        {"ratio-103", "All-pay vs clinching, two agents, uniform[0,4.04], B=1"},
        {"gap-1013", "All-pay vs middle-ironed clinching, uniform[0,5.5], B=1"},
        {"e-bound", "Clinching vs the ex ante relaxation over a grid"},
        {"irregular", "Tight irregular instance for the all-pay 2-approximation"},
        {"fp-linear", "First-price vs all-pay on the linear-gap instance"},
        {"revenue", "All-pay vs revenue-optimal revenue"}};
    for (const auto& [name, desc] : repros) {
        CLI::App* c = repro->add_subcommand(name, desc);
        add_common(c, f);
        if (name == "irregular") c->add_option("--eps", f.eps, "Gap between the two low atoms (default 1e-6)");
        if (name == "gap-1013") {
            c->add_option("--vlo", f.v_lo, "Lower ironing threshold (default 0)");
            c->add_option("--vhi", f.v_hi, "Upper ironing threshold (default 2B - vlo)");
        }
        leaves.push_back({c, name});
    }
    CLI::App* lp = app.add_subcommand("lp-optimal", "Certify the middle-ironed rule on the discrete grid");
    add_common(lp, f);
    lp->set_help_flag("--help", "Print this help message and exit");
    lp->add_option("--h", f.h, "Highest value of the grid {1..h} (default 6)");
    leaves.push_back({lp, "lp-optimal"});
    CLI::App* jl = app.add_subcommand("jump-lp", "Solve the price-jump reallocation LP");
    add_common(jl, f);
    jl->add_option("--supply", f.supply, "Remaining supply (default 1)");
    jl->add_option("--agents", f.agents, "Active agents (default 2)");
    jl->add_option("--vlo", f.v_lo, "Price before the jump (default 1)");
    jl->add_option("--vhi", f.v_hi, "Price after the jump (default 3)");
    jl->add_option("--pi", f.pi, "Probability an active agent quits at the jump (default 0.5)");
    leaves.push_back({jl, "jump-lp"});
    CLI::App* ev = app.add_subcommand("eval", "Evaluate the mechanisms on one instance");
    add_common(ev, f);
    leaves.push_back({ev, "eval"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    for (const auto& [c, name] : leaves) {
        if (!c->parsed()) continue;
        try {
            const bal::ExperimentConfig cfg = collect(c, f);
            const bal::ExperimentResult r = bal::run_experiment(name, cfg);
            bal::write_result(r, cfg.out.value_or("results"));
            for (const bal::Check& ch : r.checks) std::cout << ch.line() << "\n";
            std::cout << (r.pass() ? "PASS " : "FAIL ") << name << "\n";
            return r.pass() ? 0 : kExitFail;
        } catch (const bal::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const bal::DomainError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const bal::UnsupportedError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitFail;
        }
    }
    return kExitConfig;
}
