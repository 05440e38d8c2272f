#pragma once

#include "bal/dist.hpp"
#include "bal/piecewise.hpp"

#include <json.hpp>

#include <vector>

namespace bal {

// Step function taking xs[j] at the j-th atom of a discrete distribution.
PiecewiseFn atom_fn(const Dist& d, const std::vector<double>& xs);

// Integral of g against dF over [a, b]. Atoms of a discrete distribution
// count when they lie in the closed interval.
double integral_dF(const PiecewiseFn& g, const Dist& d, double a, double b);
// F-measure of [a, b] (closed for atoms).
double mass(const Dist& d, double a, double b);
// F-weighted average of g on [a, b].
double f_average(const PiecewiseFn& g, const Dist& d, double a, double b);

// Interim allocation of the highest-bid-wins rule, F(v)^(n-1), with uniform
// tie-splitting at atoms.
PiecewiseFn hbw_constraint(const Dist& d, int n);

PiecewiseFn iron(const PiecewiseFn& x, const Dist& d, double a, double b);

// p(v) = v x(v) - integral_0^v x(t) dt.
PiecewiseFn payment_identity(const PiecewiseFn& x);

// Smallest v' with v' zbar(v') - integral_0^v' z = B, or hbar when the
// budget never binds. Continuous distributions only.
double allpay_iron_threshold(const PiecewiseFn& z, const Dist& d, double B);

bool interim_feasible(const PiecewiseFn& x, const PiecewiseFn& z, const Dist& d,
                      double tol = kTol);

enum class LotteryRegime { BudgetBinds, AllocationBinds };

struct PostedLottery {
    double price = 0;
    double win_prob = 0;
    double cutoff = 0;
    LotteryRegime regime = LotteryRegime::AllocationBinds;
    bool welfare_regular = true; // false when the input violated the precondition
    nlohmann::json to_json() const;
};

PostedLottery ex_ante_optimal(const Dist& d, int n, double B);
// n * win_prob * E[v; v >= cutoff].
double ex_ante_welfare(const PostedLottery& lot, const Dist& d, int n);

// min(1, 2 zbar(v')) at the all-pay threshold v'.
double relax_budget_bound(const PiecewiseFn& z, const Dist& d, double B);

// Top ironing of the discrete highest-bid-wins rule in rank space: ranks in
// [u_star, 1] receive the average allocation zbar. The atom containing
// u_star mixes both parts. Payments follow the discrete identity
// p_j = sum_{i<=j} v_{i-1} (x_i - x_{i-1}) with v_{-1} = 0.
struct DiscreteTopIron {
    double u_star = 1;
    double zbar = 1;
    int boundary = -1; // atom containing u_star, -1 when nothing is ironed
    std::vector<double> x;
    std::vector<double> p;
};

DiscreteTopIron discrete_top_iron(const Dist& d, int n, double B);
// Payments of an atom-level allocation under the discrete identity.
std::vector<double> discrete_payments(const Dist& d, const std::vector<double>& x);
// Relaxation bound for a discrete distribution: min(1, 2 zbar(u_star)).
double relax_budget_bound_discrete(const Dist& d, int n, double B);

} // namespace bal
