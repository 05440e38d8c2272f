#include "bal/price_jump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bal {

void JumpState::validate() const {
    if (agents < 1) throw DomainError("jump: need at least one active agent");
    if (!(supply >= 0) || !(budget >= 0)) throw DomainError("jump: negative supply or budget");
    if (!(v_lo >= 0 && v_hi > v_lo)) throw DomainError("jump: need 0 <= v_lo < v_hi");
    if (!(pi >= 0 && pi <= 1)) throw DomainError("jump: pi outside [0,1]");
    if (v_lo > 0 && agents * budget / v_lo < supply * (1 - 1e-12)) {
        throw DomainError("jump: active demand does not cover the supply");
    }
}

nlohmann::json JumpState::to_json() const {
    return {{"supply", supply}, {"agents", agents}, {"budget", budget},
            {"v_lo", v_lo},     {"v_hi", v_hi},     {"pi", pi}};
}

nlohmann::json JumpPlan::to_json() const {
    return {{"h", h}, {"l", l}, {"objective", objective}};
}

int jump_var_h(const JumpState&, int k) { return 2 * k; }
int jump_var_l(const JumpState&, int k) { return 2 * k + 1; }

Lp build_jump_lp(const JumpState& s) {
    s.validate();
    const int K = s.agents;
    Lp lp;
    lp.sense = Sense::Min;
    const std::optional<double> cap =
        s.v_lo > 0 ? std::optional<double>(s.budget / s.v_lo) : std::nullopt;
    for (int k = 0; k <= K; ++k) {
        lp.add_var("h" + std::to_string(k), 0.0, 0.0, cap);
        const double w = std::pow(s.pi, K - k) * std::pow(1 - s.pi, k);
        lp.add_var("l" + std::to_string(k), w, 0.0, cap);
    }
    for (int k = 1; k <= K; ++k) {
        lp.add_row("IC" + std::to_string(k),
                   {{jump_var_h(s, k), 1.0}, {jump_var_l(s, k - 1), -1.0}}, Rel::Eq, 0.0);
    }
    for (int k = 0; k <= K; ++k) {
        std::vector<std::pair<int, double>> mc, ls;
        if (k > 0) {
            mc.push_back({jump_var_h(s, k), k - k * s.v_lo / s.v_hi});
            ls.push_back({jump_var_h(s, k), double(k)});
        }
        if (k < K) {
            mc.push_back({jump_var_l(s, k), double(K - k)});
            ls.push_back({jump_var_l(s, k), double(K - k)});
        }
        lp.add_row("MC" + std::to_string(k), mc, Rel::Ge, s.supply - k * s.budget / s.v_hi);
        lp.add_row("LS" + std::to_string(k), ls, Rel::Le, s.supply);
    }
    return lp;
}

std::vector<std::string> jump_plan_violations(const JumpState& s, const JumpPlan& p, double tol) {
    std::vector<std::string> out;
    const int K = s.agents;
    auto tag = [&](const std::string& fam, int k) { out.push_back(fam + std::to_string(k)); };
    const double cap = s.v_lo > 0 ? s.budget / s.v_lo : std::numeric_limits<double>::infinity();
    for (int k = 0; k <= K; ++k) {
        if (k > 0 && std::abs(p.h[k] - p.l[k - 1]) > tol) tag("IC", k);
        if (p.h[k] > cap + tol || p.l[k] > cap + tol) tag("BB", k);
        if (p.h[k] < -tol || p.l[k] < -tol) tag("NN", k);
        const double used = k * p.h[k] + (K - k) * p.l[k];
        if (used + k / s.v_hi * (s.budget - s.v_lo * p.h[k]) < s.supply - tol) tag("MC", k);
        if (used > s.supply + tol) tag("LS", k);
    }
    return out;
}

JumpPlan solve_jump(const JumpState& s) {
    const Lp lp = build_jump_lp(s);
    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) {
        throw CertificationFailure(std::string("jump LP is ") + to_string(sol.status));
    }
    JumpPlan plan;
    for (int k = 0; k <= s.agents; ++k) {
        plan.h.push_back(std::max(0.0, sol.x[jump_var_h(s, k)]));
        plan.l.push_back(std::max(0.0, sol.x[jump_var_l(s, k)]));
    }
    plan.objective = sol.objective;
    const auto bad = jump_plan_violations(s, plan);
    if (!bad.empty()) throw CertificationFailure("jump plan violates " + bad.front());
    return plan;
}

ExPostOutcome simulate_jump_auction(const std::vector<double>& vals, double B, double v_lo,
                                    double v_hi, double pi) {
    if (vals.size() < 2) throw DomainError("simulate_jump_auction: need at least two agents");
    if (v_hi < v_lo) throw DomainError("simulate_jump_auction: v_hi below v_lo");
    ClinchingClock clock(vals, B);
    // A zero-width jump is the plain clinching auction.
    clock.run(v_hi > v_lo ? v_lo : std::numeric_limits<double>::infinity());
    if (!clock.done()) {
        const std::vector<int> act = clock.active();
        JumpState st{clock.supply(), static_cast<int>(act.size()), clock.budget(), v_lo, v_hi, pi};
        const JumpPlan plan = solve_jump(st);
        int quit = 0;
        for (int i : act) quit += vals[i] < v_hi;
        const int stay = st.agents - quit;
        for (int t = 0; t < st.agents; ++t) {
            const int i = act[t];
            clock.grant(i, t < quit ? plan.l[stay] : plan.h[stay], v_lo);
        }
        const double left = st.supply - stay * plan.h[stay] - quit * plan.l[stay];
        clock.resume(v_hi, clock.first_active() + quit, std::max(0.0, left),
                     std::max(0.0, st.budget - v_lo * plan.h[stay]));
        if (stay > 0) clock.run();
    }
    return symmetrize_ties(vals, clock.outcome());
}

double jump_pi(const Dist& d, double v_lo, double v_hi) {
    const double above = 1 - d.cdf(v_lo);
    if (above <= 0) return 0;
    return (d.cdf(v_hi) - d.cdf(v_lo)) / above;
}

} // namespace bal
