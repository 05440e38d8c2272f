#pragma once

#include "bal/lp.hpp"
#include "bal/mechanisms.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bal {

// Clock state when the price jumps from v_lo to v_hi.
struct JumpState {
    double supply = 0;
    int agents = 0; // active agents at the pre-jump price
    double budget = 0;
    double v_lo = 0;
    double v_hi = 0;
    double pi = 0; // probability an active agent's value is below v_hi
    void validate() const;
    nlohmann::json to_json() const;
};

// h[k], l[k]: quantity reallocated at price v_lo to each staying / quitting
// agent when k agents stay, k = 0..agents.
struct JumpPlan {
    std::vector<double> h;
    std::vector<double> l;
    double objective = 0;
    nlohmann::json to_json() const;
};

int jump_var_h(const JumpState& s, int k);
int jump_var_l(const JumpState& s, int k);

Lp build_jump_lp(const JumpState& state);
JumpPlan solve_jump(const JumpState& state);
// Constraint families IC, BB, NN, MC, LS violated by more than tol.
std::vector<std::string> jump_plan_violations(const JumpState& state, const JumpPlan& plan,
                                              double tol = 1e-7);

// Clinching below v_lo, the reallocation LP at the jump, clinching again from
// v_hi.
ExPostOutcome simulate_jump_auction(const std::vector<double>& vals, double B, double v_lo,
                                    double v_hi, double pi);

// pi = (F(v_hi) - F(v_lo)) / (1 - F(v_lo)).
double jump_pi(const Dist& d, double v_lo, double v_hi);

} // namespace bal
