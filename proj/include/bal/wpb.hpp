#pragma once

#include "bal/dist.hpp"
#include "bal/mechanisms.hpp"

#include <json.hpp>

#include <vector>

namespace bal {

// Value at top-quantile q: v(q) = F^{-1}(1 - q).
double value_at_quantile(const Dist& d, double q);

// R(q) = integral_0^q v(t) dt - lambda v(q) + lambda B for q > 0, and 0 at q = 0.
double lagrangian_curve(const Dist& d, double lambda, double B, double q);

struct PayoffCurve {
    std::vector<double> q;
    std::vector<double> values;
    std::vector<double> hull;
    double q_dagger = 0; // ironed prefix [0, q_dagger]
    nlohmann::json to_json() const;
};

// Upper concave envelope of the samples. q must be increasing and start at 0;
// values[0] is the value of the atom at q = 0.
PayoffCurve concave_hull(const std::vector<double>& q, const std::vector<double>& values);
PayoffCurve lagrangian_payoff_curve(const Dist& d, double lambda, double B, int grid = 10000);

// Tangency point of the chord from the origin: argmax_{q in (0,1]} R(q) / q,
// or 0 when the curve is concave through the origin.
double lagrangian_ironing_quantile(const Dist& d, double lambda, double B);

// p(v) / x(v); DomainError when x(v) = 0.
double bid_ratio(const MechanismRule& rule, double v);

// Highest-bid-wins with the top interval [v', hbar] ironed, where v' is the
// smallest value with v' zbar(v') - integral_0^v' z = B zbar(v').
MechanismRule first_price_rule(const Dist& d, int n, double B);

// Smallest lambda whose ironed Lagrangian curve induces a rule with
// p(hbar) = B x(hbar); 0 when the budget is slack.
double find_binding_lambda(const Dist& d, int n, double B);

// Density n-1 on [0, 1/n] and 1/(n-1) on [1/n, 1].
Dist fp_instance(int n);
double fp_instance_budget(int n);

// n * integral v x(v) dF.
double rule_welfare(const MechanismRule& rule, const Dist& d, int n);

struct FpGapResult {
    int n = 0;
    double budget = 0;
    double v_fp = 0;
    double v_ap = 0;
    double w_fp = 0;
    double w_ap = 0;
    double ratio = 0;
    nlohmann::json to_json() const;
};

FpGapResult fp_lowerbound_experiment(int n);

} // namespace bal
