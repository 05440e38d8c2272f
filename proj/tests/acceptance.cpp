// Acceptance gate. Usage: acceptance [c1 .. c10]; no argument runs all.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include "bal/dsic_opt.hpp"
#include "bal/eval.hpp"
#include "bal/interim.hpp"
#include "bal/mechanisms.hpp"
#include "bal/price_jump.hpp"
#include "bal/repro.hpp"
#include "bal/wpb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace bal;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("violated: " + what);
        }
    }
    void absorb(const ExperimentResult& r) {
        for (const Check& c : r.checks) {
            if (!c.pass) pass = false;
            notes.push_back(c.line());
        }
    }
};

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

ExperimentResult run(const std::string& name, ExperimentConfig c = {}) { return run_experiment(name, c); }

Outcome c1() {
    Outcome o;
    ExperimentConfig c;
    c.samples = 0;
    auto t0 = Clock::now();
    o.absorb(run("ratio-103", c));
    const double t_closed = seconds_since(t0);
    c.samples = 1000000;
    t0 = Clock::now();
    const ExperimentResult mc = run("ratio-103", c);
    const double t_mc = seconds_since(t0);
    for (const Check& k : mc.checks) {
        if (k.name.find("monte carlo") != std::string::npos) {
            o.require(k.pass, k.name);
            o.notes.push_back(k.line());
        }
    }
    o.require(t_closed < 1.0, "closed form under 1 s");
    o.require(t_mc < 30.0, "1e6-sample cross-check under 30 s");
    o.detail = fmt("closed form %.3fs, monte carlo %.2fs", t_closed, t_mc);
    return o;
}

Outcome c2() {
    Outcome o;
    ExperimentConfig c;
    c.samples = 0;
    const auto t0 = Clock::now();
    o.absorb(run("gap-1013", c));
    const double t = seconds_since(t0);
    o.require(t < 1.0, "under 1 s");
    o.detail = fmt("%.3fs", t);
    return o;
}

Outcome c3() {
    Outcome o;
    int cases = 0, bad = 0, other_vertex = 0;
    double worst = 0;
    for (int h = 2; h <= 30; ++h) {
        for (int B = 1; B <= h - 1; ++B) {
            ++cases;
            const VerifyReport r = verify_optimal(h, B);
            const double lp_gap = r.lp_objective ? std::abs(*r.lp_objective - r.mic_objective) : 1.0;
            const double dual_gap = std::abs(r.dual_objective - r.mic_objective);
            worst = std::max({worst, lp_gap, dual_gap});
            // The simplex may stop at another optimal vertex; only the optimum
            // value has to agree.
            other_vertex += !r.lp_agrees;
            const bool ok = r.pass && r.exact && lp_gap <= 1e-6 && dual_gap <= 1e-6;
            if (!ok) {
                ++bad;
                o.require(false, "h=" + std::to_string(h) + " B=" + std::to_string(B));
            }
        }
    }
    o.detail = std::to_string(cases) + " cases, " + std::to_string(bad) + " failures, " +
               fmt("max three-way gap %.2e, %g LP optima at another vertex", worst, other_vertex);
    return o;
}

Outcome c4() {
    Outcome o;
    o.absorb(run("e-bound"));
    return o;
}

Outcome c5() {
    Outcome o;
    o.absorb(run("irregular"));
    return o;
}

// Random discrete instance with a virtual welfare dip: a heavy low atom, a
// light middle and a heavy high cluster.
Dist random_irregular_discrete(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    for (;;) {
        const int m = 3 + static_cast<int>(u(rng) * 5);
        std::vector<double> vals(m), mass(m);
        double v = 0.2 + u(rng);
        for (int j = 0; j < m; ++j) {
            vals[j] = v;
            v += 0.1 + 2 * u(rng);
            mass[j] = (j == 0 || j == m - 1) ? 1 + 3 * u(rng) : 0.05 + 0.5 * u(rng);
        }
        const double tot = std::accumulate(mass.begin(), mass.end(), 0.0);
        for (double& w : mass) w /= tot;
        // Mass per unit of value, the discrete counterpart of the density,
        // must increase somewhere.
        bool irregular = false;
        for (int j = 1; j + 1 < m; ++j) {
            irregular = irregular || mass[j + 1] / (vals[j + 1] - vals[j]) > mass[j] / (vals[j] - vals[j - 1]);
        }
        if (irregular) return Dist::discrete(vals, mass);
    }
}

Outcome c6() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1);
    double min_ap = 1e9, min_cl = 1e9;
    for (int t = 0; t < 20; ++t) {
        const Dist d = random_irregular_discrete(rng);
        const int n = 2 + static_cast<int>(u(rng) * 4);
        const double B = (0.05 + 0.9 * u(rng)) * d.hbar();
        const std::string tag = "instance " + std::to_string(t);
        const double wap = welfare_interim(allpay_rule_discrete(d, n, B), d, n).value;
        const double relaxed = optimal_welfare_discrete(d, n, std::nullopt, relax_budget_bound_discrete(d, n, B));
        const double wex = ex_ante_welfare_discrete(d, n, B);
        const ExPostSim sim = [B](const std::vector<double>& v) { return clinching_expost(v, B); };
        const WelfareReport wcl = welfare_expost_mc(sim, d, n, 20000, 100 + t);
        const double bound = wex / (2 * std::exp(1.0));
        o.require(wap >= relaxed / 2 - 1e-9, tag + " all-pay >= relaxed optimum / 2");
        o.require(wcl.value + 3 * *wcl.std_error >= bound, tag + " clinching >= ex ante / 2e");
        min_ap = std::min(min_ap, wap / relaxed);
        min_cl = std::min(min_cl, wcl.value / wex);
    }
    o.detail = fmt("min W_ap/W_relaxed %.4f, min W_cl/W_exante %.4f", min_ap, min_cl);
    return o;
}

Outcome c7() {
    Outcome o;
    const ExperimentResult r = run("fp-linear");
    o.absorb(r);
    for (const auto& row : r.data["rows"]) {
        const int n = row["n"];
        if (n >= 100) {
            o.notes.push_back("n=" + std::to_string(n) + fmt(": n W_fp %.4f, W_ap %.4f", n * row["W_fp"].get<double>(),
                                                             row["W_ap"].get<double>()) +
                              fmt(", ratio %.2f", row["ratio"].get<double>()));
        }
    }
    return o;
}

Outcome c8() {
    Outcome o;
    o.absorb(run("revenue"));
    return o;
}

Outcome c9() {
    Outcome o;
    struct Setting {
        double hbar, B, v_lo;
    };
    const std::vector<Setting> settings{{3, 1, 0}, {3, 1, 0.5}, {5.5, 1, 0}, {2, 0.5, 0.2}, {4, 1.5, 1.0}};
    double worst = 0;
    for (const Setting& s : settings) {
        const MicParams mp = MicParams::from_vlo(s.v_lo, s.B);
        const double pi = jump_pi(Dist::uniform(0, s.hbar), mp.v_lo, mp.v_hi);
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                const double v1 = s.hbar * i / 49, v2 = s.hbar * j / 49;
                const ExPostOutcome a = simulate_jump_auction({v1, v2}, s.B, mp.v_lo, mp.v_hi, pi);
                const ExPostOutcome b = middle_ironed_expost(v1, v2, mp);
                for (int k = 0; k < 2; ++k) {
                    worst = std::max({worst, std::abs(a.alloc[k] - b.alloc[k]), std::abs(a.pay[k] - b.pay[k])});
                }
            }
        }
    }
    o.require(worst <= 1e-6, "jump auction equals middle-ironed rule within 1e-6");
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    int infeasible = 0;
    for (int t = 0; t < 100; ++t) {
        const int k = 1 + static_cast<int>(u(rng) * 8);
        const double vlo = 0.05 + 2 * u(rng);
        const double B = 0.05 + 2 * u(rng);
        const double supply = std::min(1.0, k * B / vlo) * u(rng);
        const JumpState st{supply, k, B, vlo, vlo * (1.01 + 3 * u(rng)), u(rng)};
        try {
            if (!jump_plan_violations(st, solve_jump(st)).empty()) ++infeasible;
        } catch (const std::exception&) {
            ++infeasible;
        }
    }
    o.require(infeasible == 0, "jump LP feasible on random states");
    o.detail = fmt("5 settings x 2500 profiles, max deviation %.2e; %g/100 LP failures", worst, infeasible);
    return o;
}

using Mech = std::function<ExPostOutcome(const std::vector<double>&)>;

struct NamedMech {
    std::string name;
    Mech run;
    double budget;
    int agents;       // 0 for any count
    bool clears;      // sells the whole unit when some value is positive
};

Outcome c10() {
    Outcome o;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0, 1);
    constexpr double tol = 1e-9;
    long checks = 0;

    std::vector<NamedMech> mechs;
    for (int t = 0; t < 6; ++t) {
        const double B = 0.1 + 2 * u(rng);
        const double vlo = B * u(rng);
        const MicParams mp = MicParams::from_vlo(vlo, B);
        const int k = 1 + t % 3;
        mechs.push_back({"clinching B=" + std::to_string(B), [B](const auto& v) { return clinching_expost(v, B); }, B, 0, true});
        mechs.push_back({"lotteries k=" + std::to_string(k),
                         [B, k](const auto& v) { return clinching_lotteries_expost(v, B, k); }, B, 0, false});
        mechs.push_back({"jump auction", [B, mp](const auto& v) { return simulate_jump_auction(v, B, mp.v_lo, mp.v_hi, 0.5); },
                         B, 0, false});
        mechs.push_back({"middle-ironed", [mp](const auto& v) { return middle_ironed_expost(v[0], v[1], mp); }, B, 2,
                         false});
    }

    for (const NamedMech& m : mechs) {
        for (int t = 0; t < 40; ++t) {
            const int n = m.agents ? m.agents : 2 + static_cast<int>(u(rng) * 4);
            std::vector<double> v(n);
            for (double& x : v) x = 3 * u(rng);
            if (u(rng) < 0.2) v[1] = v[0];
            const ExPostOutcome out = m.run(v);
            double tot = 0;
            for (int i = 0; i < n; ++i) {
                tot += out.alloc[i];
                o.require(out.alloc[i] >= -tol, m.name + " nonnegative allocation");
                o.require(out.pay[i] <= m.budget + tol, m.name + " budget cap");
                o.require(out.pay[i] <= v[i] * out.alloc[i] + tol, m.name + " individual rationality");
                checks += 3;
            }
            o.require(tot <= 1 + tol, m.name + " supply");
            if (m.clears && *std::max_element(v.begin(), v.end()) > 0) {
                o.require(tot >= 1 - 1e-7, m.name + " market clearing");
            }
            checks += 2;

            // Symmetry: permuting values permutes the outcome.
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<double> pv(n);
            for (int i = 0; i < n; ++i) pv[i] = v[perm[i]];
            const ExPostOutcome po = m.run(pv);
            for (int i = 0; i < n; ++i) {
                o.require(std::abs(po.alloc[i] - out.alloc[perm[i]]) <= 1e-7 &&
                              std::abs(po.pay[i] - out.pay[perm[i]]) <= 1e-7,
                          m.name + " symmetry");
                ++checks;
            }

            // Monotone allocation in the own value and the payment identity
            // p(v) = v x(v) - integral_0^v x, integrated on a fine grid.
            const int grid = 3000;
            const double top = 3.5;
            std::vector<double> w = v;
            double prev = -1, integral = 0, x_prev = 0;
            bool mono = true;
            double worst = 0;
            for (int g = 0; g <= grid; ++g) {
                w[0] = top * g / grid;
                const ExPostOutcome r = m.run(w);
                const double x = r.alloc[0];
                mono = mono && x >= prev - 1e-9;
                if (g > 0) integral += 0.5 * (x + x_prev) * top / grid;
                if (g % 100 == 0) worst = std::max(worst, std::abs(r.pay[0] - (w[0] * x - integral)));
                prev = x;
                x_prev = x;
            }
            o.require(mono, m.name + " monotone allocation");
            o.require(worst <= 5e-3, m.name + fmt(" payment identity (dev %.2e)", worst));
            checks += 2;
        }
    }

    // Interim rules: feasibility against the highest-bid-wins constraint,
    // monotonicity and the payment identity.
    int rules = 0;
    for (int t = 0; t < 30; ++t) {
        const int pieces = 1 + static_cast<int>(u(rng) * 4);
        std::vector<double> br{0}, dens;
        for (int i = 0; i < pieces; ++i) br.push_back(br.back() + 0.2 + u(rng));
        for (int i = 0; i < pieces; ++i) dens.push_back(0.1 + u(rng));
        double tot = 0;
        for (int i = 0; i < pieces; ++i) tot += dens[i] * (br[i + 1] - br[i]);
        for (double& f : dens) f /= tot;
        const Dist d = Dist::piecewise(br, dens);
        const int n = 2 + static_cast<int>(u(rng) * 5);
        const double B = (0.05 + 0.9 * u(rng)) * d.hbar();
        const PiecewiseFn z = hbw_constraint(d, n);
        std::vector<std::pair<std::string, MechanismRule>> rs{{"all-pay", allpay_rule(d, n, B)}};
        if (check_regularity(d).revenue_regular) rs.push_back({"revenue-optimal", revenue_optimal_rule(d, n, B)});
        if (check_regularity(d).welfare_regular) rs.push_back({"first-price", first_price_rule(d, n, B)});
        for (const auto& [name, r] : rs) {
            ++rules;
            o.require(interim_feasible(r.interim_alloc, z, d, 1e-9), name + " interim feasibility");
            const PiecewiseFn pid = payment_identity(r.interim_alloc);
            double prev = -1;
            for (int g = 0; g <= 400; ++g) {
                const double v = d.hbar() * g / 400;
                const double x = r.interim_alloc(v);
                o.require(x >= prev - 1e-9, name + " monotone interim allocation");
                o.require(std::abs(r.interim_pay(v) - pid(v)) <= 1e-7, name + " interim payment identity");
                o.require(r.interim_pay(v) <= B + 1e-9, name + " interim budget");
                prev = x;
                checks += 3;
            }
        }
    }
    o.detail = std::to_string(mechs.size()) + " ex-post mechanisms, " + std::to_string(rules) + " interim rules, " +
               std::to_string(checks) + " checks";
    return o;
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& criteria() {
    static const std::map<int, std::pair<std::string, std::function<Outcome()>>> m{
        {1, {"clinching lower bound 1.03", c1}},
        {2, {"revelation gap 1.013", c2}},
        {3, {"DSIC optimality certificates h <= 30", c3}},
        {4, {"e-bound property suite", c4}},
        {5, {"irregular tightness", c5}},
        {6, {"2 and 2e approximation on random irregular instances", c6}},
        {7, {"winner-pays-bid linear gap", c7}},
        {8, {"revenue bound n/(n-1)", c8}},
        {9, {"price-jump equivalence and LP feasibility", c9}},
        {10, {"mechanism invariant suite", c10}},
    };
    return m;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (!a.empty() && a[0] == 'c') a = a.substr(1);
        try {
            which.push_back(std::stoi(a));
        } catch (const std::exception&) {
            std::fprintf(stderr, "usage: acceptance [c1 .. c10]\n");
            return 2;
        }
        if (!criteria().count(which.back())) {
            std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
            return 2;
        }
    }
    if (which.empty()) {
        for (const auto& [k, _] : criteria()) which.push_back(k);
    }
    bool all = true;
    for (int k : which) {
        const auto& [title, fn] = criteria().at(k);
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        const double t = seconds_since(t0);
        for (const std::string& s : o.notes) std::printf("  %s\n", s.c_str());
        std::printf("%s c%d %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", k, title.c_str(), t,
                    o.detail.empty() ? "" : ": ", o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
