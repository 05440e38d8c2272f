#include "bal/eval.hpp"

#include "bal/interim.hpp"
#include "bal/lp.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

namespace bal {

namespace {

constexpr std::uint64_t kBlock = 1 << 14;

struct Moments {
    double sum = 0;
    double sumsq = 0;
};

Moments pairwise(const std::vector<Moments>& m, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return m[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    const Moments a = pairwise(m, lo, mid), b = pairwise(m, mid, hi);
    return {a.sum + b.sum, a.sumsq + b.sumsq};
}

void require_n(int n) {
    if (n < 1) throw DomainError("agent count must be >= 1");
}

} // namespace

const char* to_string(EvalMethod m) {
    switch (m) {
    case EvalMethod::ClosedForm: return "closed_form";
    case EvalMethod::Quadrature: return "quadrature";
    case EvalMethod::MonteCarlo: return "monte_carlo";
    }
    return "?";
}

nlohmann::json WelfareReport::to_json() const {
    nlohmann::json j{{"value", value}, {"method", to_string(method)}};
    if (std_error) j["stderr"] = *std_error;
    if (samples) j["samples"] = *samples;
    if (seed) j["seed"] = *seed;
    return j;
}

WelfareReport welfare_interim(const MechanismRule& rule, const Dist& d, int n) {
    require_n(n);
    return {n * integral_dF(rule.interim_alloc.times_v(), d, 0.0, d.hbar()),
            EvalMethod::ClosedForm, {}, {}, {}};
}

WelfareReport welfare_quadrature(const MechanismRule& rule, const Dist& d, int n) {
    require_n(n);
    if (!d.continuous()) return welfare_interim(rule, d, n);
    std::set<double> cuts(d.breaks().begin(), d.breaks().end());
    for (double b : rule.interim_alloc.breakpoints()) {
        if (b > d.breaks().front() && b < d.hbar()) cuts.insert(b);
    }
    const std::vector<double> pts(cuts.begin(), cuts.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const double f = d.pdf((a + b) / 2);
        if (f <= 0) continue;
        // Integrate the right limit at a so a jump at the cut is not sampled.
        auto g = [&](double v) { return v * (v <= a ? rule.interim_alloc.right_limit(a) : rule.interim_alloc(v)); };
        s += f * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-14);
    }
    return {n * s, EvalMethod::Quadrature, {}, {}, {}};
}

WelfareReport revenue_interim(const MechanismRule& rule, const Dist& d, int n) {
    require_n(n);
    const double rev = n * integral_dF(rule.interim_pay, d, 0.0, d.hbar());
    if (d.continuous()) {
        const auto& br = d.breaks();
        const auto& f = d.densities();
        const bool has_phi = std::all_of(f.begin(), f.end(), [](double x) { return x > 0; });
        if (has_phi) {
            // phi f = v f - (1 - F) with 1 - F affine on each piece.
            const PiecewiseFn& x = rule.interim_alloc;
            const PiecewiseFn vx = x.times_v();
            double s = 0;
            for (int i = 0; i < d.pieces(); ++i) {
                const double a = br[i], b = br[i + 1];
                const double c0 = 1 - d.cdf_at_break(i) + f[i] * a;
                s += f[i] * vx.integral(a, b) - (c0 * x.integral(a, b) - f[i] * vx.integral(a, b));
            }
            if (std::abs(n * s - rev) > 1e-6 * std::max(1.0, std::abs(rev))) {
                throw NumericalFailure("revenue_interim: virtual surplus check failed");
            }
        }
    }
    return {rev, EvalMethod::ClosedForm, {}, {}, {}};
}

int worker_count() {
    if (const char* env = std::getenv("BAL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

WelfareReport mc_mean(const std::function<double(std::mt19937_64&)>& draw, std::uint64_t samples,
                      std::uint64_t seed) {
    if (samples < 1) throw DomainError("mc_mean: need at least one sample");
    const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<Moments> res(blocks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
            std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                             static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
            std::mt19937_64 rng(ss);
            const std::uint64_t m = std::min(kBlock, samples - b * kBlock);
            Moments mo;
            for (std::uint64_t i = 0; i < m; ++i) {
                const double y = draw(rng);
                mo.sum += y;
                mo.sumsq += y * y;
            }
            res[b] = mo;
        }
    };
    const int w = static_cast<int>(std::min<std::uint64_t>(worker_count(), blocks));
    if (w <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < w; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    const Moments tot = pairwise(res, 0, res.size());
    const double mean = tot.sum / samples;
    const double var =
        samples > 1 ? std::max(0.0, (tot.sumsq - samples * mean * mean) / (samples - 1)) : 0.0;
    return {mean, EvalMethod::MonteCarlo, std::sqrt(var / samples), samples, seed};
}

WelfareReport welfare_expost_mc(const ExPostSim& mech, const Dist& d, int n, std::uint64_t samples,
                                std::uint64_t seed) {
    require_n(n);
    return mc_mean(
        [&](std::mt19937_64& rng) {
            std::vector<double> v(n);
            for (double& x : v) x = d.sample(rng);
            const ExPostOutcome o = mech(v);
            double w = 0;
            for (int i = 0; i < n; ++i) w += v[i] * o.alloc[i];
            return w;
        },
        samples, seed);
}

WelfareReport interim_alloc_mc(const ExPostSim& mech, const Dist& d, int n, double v,
                               std::uint64_t samples, std::uint64_t seed) {
    require_n(n);
    return mc_mean(
        [&](std::mt19937_64& rng) {
            std::vector<double> vals(n);
            vals[0] = v;
            for (int i = 1; i < n; ++i) vals[i] = d.sample(rng);
            return mech(vals).alloc[0];
        },
        samples, seed);
}

nlohmann::json RatioReport::to_json() const {
    nlohmann::json j{{"value", value}};
    if (std_error) j["stderr"] = *std_error;
    return j;
}

RatioReport ratio(const WelfareReport& num, const WelfareReport& den) {
    if (!(den.value > 0)) throw DomainError("ratio: nonpositive denominator");
    RatioReport r;
    r.value = num.value / den.value;
    if (num.std_error || den.std_error) {
        const double a = num.std_error.value_or(0) / num.value;
        const double b = den.std_error.value_or(0) / den.value;
        r.std_error = std::abs(r.value) * std::sqrt(a * a + b * b);
    }
    return r;
}

double allpay_welfare_uniform2(double h) {
    return (3 * h * h * h + 6 * h * h - 12 * h + 8) / (6 * h * h);
}

double clinching_welfare_uniform2(double h) {
    return (3 * h * h * h + 6 * h * h - 3 * h - 6 * h * std::log(h) - 2) / (6 * h * h);
}

Dist irregular_instance(int N, double eps) {
    if (N < 3) throw DomainError("irregular_instance: N must be >= 3");
    if (!(eps > 0 && eps < 1)) throw DomainError("irregular_instance: eps must be in (0,1)");
    const double n = N;
    return Dist::discrete({n - eps, n, n * n * n}, {1 / (n + 1), (n - 1) / (n + 1), 1 / (n + 1)});
}

nlohmann::json IrregularGapResult::to_json() const {
    return {{"N", N},           {"eps", eps},         {"delta", delta},
            {"W_allpay", w_allpay}, {"W_crafted", w_crafted}, {"ratio", ratio}};
}

IrregularGapResult irregular_gap_experiment(int N, double eps) {
    const Dist d = irregular_instance(N, eps);
    const int n = N + 1;
    const double B = 1.0;
    IrregularGapResult r;
    r.N = N;
    r.eps = eps;
    const MechanismRule ap = allpay_rule_discrete(d, n, B);
    r.delta = ap.interim_alloc(d.values()[0]);
    r.w_allpay = welfare_interim(ap, d, n).value;
    const double lo = (N - 1.0) / (double(N) * (N + 1)), hi = 2.0 / (N + 1);
    const std::vector<double> xs{lo, lo, hi};
    const PiecewiseFn x = atom_fn(d, xs);
    if (!interim_feasible(x, hbw_constraint(d, n), d, 1e-12)) {
        throw CertificationFailure("irregular_gap_experiment: crafted rule is infeasible");
    }
    const std::vector<double> p = discrete_payments(d, xs);
    if (*std::max_element(p.begin(), p.end()) > B + 1e-9) {
        throw CertificationFailure("irregular_gap_experiment: crafted rule exceeds the budget");
    }
    MechanismRule crafted;
    crafted.interim_alloc = x;
    crafted.interim_pay = atom_fn(d, p);
    r.w_crafted = welfare_interim(crafted, d, n).value;
    r.ratio = r.w_crafted / r.w_allpay;
    return r;
}

nlohmann::json RevenueGapResult::to_json() const {
    return {{"n", n},         {"budget", budget}, {"R_allpay", r_allpay},        {"R_opt", r_opt},
            {"ratio", ratio}, {"bound", bound},   {"within_bound", within_bound}};
}

RevenueGapResult revenue_gap_experiment(const Dist& d, int n, double B) {
    if (n < 2) throw DomainError("revenue_gap_experiment: n must be >= 2");
    RevenueGapResult r;
    r.n = n;
    r.budget = B;
    r.r_allpay = revenue_interim(allpay_rule(d, n, B), d, n).value;
    r.r_opt = revenue_interim(revenue_optimal_rule(d, n, B), d, n).value;
    r.ratio = r.r_opt / r.r_allpay;
    r.bound = n / (n - 1.0);
    r.within_bound = r.ratio <= r.bound + 1e-6;
    return r;
}

namespace {

// Monotone atom-level allocation variables x_0..x_{m-1} maximizing welfare.
Lp discrete_welfare_lp(const Dist& d, int n, std::optional<double> B, double cap) {
    const int m = d.atoms();
    Lp lp;
    lp.sense = Sense::Max;
    for (int j = 0; j < m; ++j) {
        lp.add_var("x" + std::to_string(j), n * d.masses()[j] * d.values()[j], 0.0, cap);
    }
    for (int j = 0; j + 1 < m; ++j) {
        lp.add_row("mono" + std::to_string(j), {{j, 1.0}, {j + 1, -1.0}}, Rel::Le, 0.0);
    }
    if (B) {
        // p_top = sum_{j>=1} v_{j-1} (x_j - x_{j-1})
        std::vector<double> c(m, 0.0);
        for (int j = 1; j < m; ++j) {
            c[j] += d.values()[j - 1];
            c[j - 1] -= d.values()[j - 1];
        }
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < m; ++j) {
            if (c[j] != 0) row.push_back({j, c[j]});
        }
        if (!row.empty()) lp.add_row("budget", row, Rel::Le, *B);
    }
    return lp;
}

double solve_welfare_lp(const Lp& lp, const char* what) {
    const LpSolution s = solve(lp);
    if (s.status != LpStatus::Optimal) {
        throw NumericalFailure(std::string(what) + ": LP is " + to_string(s.status));
    }
    return s.objective;
}

} // namespace

double optimal_welfare_discrete(const Dist& d, int n, std::optional<double> B,
                                std::optional<double> alloc_cap) {
    require_n(n);
    if (d.continuous()) throw UnsupportedError("optimal_welfare_discrete: continuous distribution");
    Lp lp = discrete_welfare_lp(d, n, B, std::min(1.0, alloc_cap.value_or(1.0)));
    const PiecewiseFn z = hbw_constraint(d, n);
    double tz = 0;
    std::vector<std::pair<int, double>> row;
    for (int j = d.atoms() - 1; j >= 0; --j) {
        tz += d.masses()[j] * z(d.values()[j]);
        row.push_back({j, d.masses()[j]});
        lp.add_row("tail" + std::to_string(j), row, Rel::Le, tz);
    }
    return solve_welfare_lp(lp, "optimal_welfare_discrete");
}

double ex_ante_welfare_discrete(const Dist& d, int n, double B) {
    require_n(n);
    if (d.continuous()) throw UnsupportedError("ex_ante_welfare_discrete: continuous distribution");
    Lp lp = discrete_welfare_lp(d, n, B, 1.0);
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < d.atoms(); ++j) row.push_back({j, d.masses()[j]});
    lp.add_row("ex_ante", row, Rel::Le, 1.0 / n);
    return solve_welfare_lp(lp, "ex_ante_welfare_discrete");
}

nlohmann::json EBoundRow::to_json() const {
    return {{"dist", dist},       {"n", n},           {"budget", budget},
            {"k0", k0},           {"k", k},           {"v_dagger", v_dagger},
            {"x_po", x_po},       {"x_cl", x_cl},     {"x_cl_se", x_cl_se},
            {"x_cl_floor", x_cl_floor}, {"W_exante", w_exante}, {"W_clk", w_clk},
            {"W_clk_se", w_clk_se}, {"W_cl", w_cl},   {"W_cl_se", w_cl_se},
            {"alloc_ok", alloc_ok}, {"welfare_ok", welfare_ok}};
}

EBoundRow ebound_check(const Dist& d, const std::string& label, int n, double B,
                       std::uint64_t samples, std::uint64_t seed) {
    EBoundRow r;
    r.dist = label;
    r.n = n;
    r.budget = B;
    const PostedLottery lot = ex_ante_optimal(d, n, B);
    r.v_dagger = lot.cutoff;
    r.x_po = lot.win_prob;
    r.k0 = 1.0 / lot.win_prob;
    r.k = std::max(1, static_cast<int>(std::ceil(r.k0 - 1e-12)));
    r.x_cl_floor = clinch_k_allocation_bound(n, r.k0) * r.x_po;
    const int k = r.k;
    const ExPostSim lotteries = [B, k](const std::vector<double>& v) {
        return clinching_lotteries_expost(v, B, k);
    };
    const ExPostSim clinch = [B](const std::vector<double>& v) { return clinching_expost(v, B); };
    const WelfareReport xc = interim_alloc_mc(lotteries, d, n, r.v_dagger, samples, seed);
    r.x_cl = xc.value;
    r.x_cl_se = *xc.std_error;
    r.w_exante = ex_ante_welfare(lot, d, n);
    const WelfareReport wk = welfare_expost_mc(lotteries, d, n, samples, seed + 1);
    r.w_clk = wk.value;
    r.w_clk_se = *wk.std_error;
    const WelfareReport wc = welfare_expost_mc(clinch, d, n, samples, seed + 1);
    r.w_cl = wc.value;
    r.w_cl_se = *wc.std_error;
    const double e = std::exp(1.0);
    r.alloc_ok = r.x_cl + 3 * r.x_cl_se >= r.x_cl_floor - 1e-9 && r.x_cl_floor >= r.x_po / e - 1e-9;
    r.welfare_ok = r.w_clk + 3 * r.w_clk_se >= r.w_exante / e && r.w_cl + 3 * r.w_cl_se >= r.w_exante / e;
    return r;
}

} // namespace bal
