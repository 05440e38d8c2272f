#pragma once

#include "bal/dist.hpp"
#include "bal/interim.hpp"
#include "bal/piecewise.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bal {

struct ExPostOutcome {
    std::vector<double> alloc;
    std::vector<double> pay;
    nlohmann::json to_json() const;
};

struct MechanismRule {
    PiecewiseFn interim_alloc;
    PiecewiseFn interim_pay;
    std::optional<PiecewiseFn> bid_fn;
    std::string label;
    double threshold = std::numeric_limits<double>::quiet_NaN(); // ironing threshold v'
    double reserve = 0;
    nlohmann::json to_json() const;
};

// Middle-ironed parameters: v_lo <= B and v_hi = 2B - v_lo.
struct MicParams {
    double v_lo = 0;
    double v_hi = 0;
    double budget = 0;
    static MicParams from_vlo(double v_lo, double budget);
    void validate() const;
};

// Ascending clinching clock for one divisible unit and a common budget.
// Active agents always share the same remaining budget and allocation room,
// so the clock moves between events (drops, start of clinching) in closed
// form. `agent_cap` limits each agent's total allocation.
class ClinchingClock {
public:
    ClinchingClock(std::vector<double> vals, double budget, double supply = 1.0,
                   double agent_cap = std::numeric_limits<double>::infinity());

    // Advance until the auction ends or the price reaches `cap`. Agents whose
    // value equals the cap are still active when the clock stops there.
    void run(double cap = std::numeric_limits<double>::infinity());

    bool done() const { return done_; }
    double price() const { return price_; }
    double supply() const { return supply_; }
    double budget() const { return budget_; }
    // Active agents in ascending (value, index) order.
    std::vector<int> active() const;

    // Record `amount` for agent i at unit price p. The clock state is left
    // unchanged; callers follow up with resume().
    void grant(int i, double amount, double p);
    // Restart the clock at `price` with the agents from position first_active
    // of the ascending order, the remaining supply and the common budget.
    void resume(double price, int first_active, double supply, double budget);
    int first_active() const { return first_; }

    ExPostOutcome outcome() const { return {alloc_, pay_}; }

private:
    std::vector<double> vals_;
    std::vector<int> order_;
    std::vector<double> alloc_;
    std::vector<double> pay_;
    double price_ = 0;
    double supply_ = 1;
    double budget_ = 0;
    double room_ = 0; // remaining allocation room of each active agent
    int first_ = 0;
    bool clinching_ = false;
    bool done_ = false;

    double demand() const;
    void drop_lowest();
    void clinch_jump();
    void continuous_to(double p1);
};

// Replace the outcome of every group of agents with equal values by its
// group average.
ExPostOutcome symmetrize_ties(const std::vector<double>& vals, ExPostOutcome out);

ExPostOutcome clinching_expost(const std::vector<double>& vals, double B);
// Clinching auction selling k lotteries that each win with probability 1/k:
// the clock above with every agent capped at allocation 1/k.
ExPostOutcome clinching_lotteries_expost(const std::vector<double>& vals, double B, int k);

MechanismRule allpay_rule(const Dist& d, int n, double B);
MechanismRule allpay_rule_discrete(const Dist& d, int n, double B);
MechanismRule clinching_interim_2agent(const Dist& d, double B);
double clinch_k_allocation_bound(int n, double k0);
ExPostOutcome middle_ironed_expost(double v1, double v2, const MicParams& p);
MechanismRule revenue_optimal_rule(const Dist& d, int n, double B);

// Rule with x = 0 below r, z on [r, v'], and the F-average of z above v'.
MechanismRule iron_reserve_rule(const PiecewiseFn& z, const Dist& d, double r, double v_iron);

} // namespace bal
