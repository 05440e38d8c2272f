#pragma once

#include "bal/dist.hpp"
#include "bal/mechanisms.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bal {

enum class EvalMethod { ClosedForm, Quadrature, MonteCarlo };
const char* to_string(EvalMethod m);

struct WelfareReport {
    double value = 0;
    EvalMethod method = EvalMethod::ClosedForm;
    std::optional<double> std_error;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    nlohmann::json to_json() const;
};

// n * integral v x(v) dF, piece by piece.
WelfareReport welfare_interim(const MechanismRule& rule, const Dist& d, int n);
// Same quantity by adaptive Gauss-Kronrod on each smooth piece.
WelfareReport welfare_quadrature(const MechanismRule& rule, const Dist& d, int n);
// n * integral p(v) dF. For continuous distributions with positive density
// the result is checked against n * integral phi(v) x(v) dF.
WelfareReport revenue_interim(const MechanismRule& rule, const Dist& d, int n);

// Workers for Monte Carlo runs: BAL_THREADS when set, else the hardware count.
int worker_count();

// Mean of draw(rng) over `samples` draws. Samples are split into fixed blocks
// with one generator per (seed, block), so the result does not depend on the
// number of workers.
WelfareReport mc_mean(const std::function<double(std::mt19937_64&)>& draw, std::uint64_t samples,
                      std::uint64_t seed);

using ExPostSim = std::function<ExPostOutcome(const std::vector<double>&)>;

// Mean of sum_i v_i alloc_i over i.i.d. profiles.
WelfareReport welfare_expost_mc(const ExPostSim& mech, const Dist& d, int n, std::uint64_t samples,
                                std::uint64_t seed);
// Mean allocation of agent 0 with value v, the others drawn from d.
WelfareReport interim_alloc_mc(const ExPostSim& mech, const Dist& d, int n, double v,
                               std::uint64_t samples, std::uint64_t seed);

struct RatioReport {
    double value = 0;
    std::optional<double> std_error;
    nlohmann::json to_json() const;
};
RatioReport ratio(const WelfareReport& num, const WelfareReport& den);

// Two agents, uniform[0, h], budget 1.
double allpay_welfare_uniform2(double h);
double clinching_welfare_uniform2(double h);

// Atoms N - eps, N, N^3 with masses 1/(N+1), (N-1)/(N+1), 1/(N+1).
Dist irregular_instance(int N, double eps);

struct IrregularGapResult {
    int N = 0;
    double eps = 0;
    double delta = 0; // all-pay allocation of the lowest atom
    double w_allpay = 0;
    double w_crafted = 0;
    double ratio = 0;
    nlohmann::json to_json() const;
};
// N + 1 agents, budget 1.
IrregularGapResult irregular_gap_experiment(int N, double eps);

struct RevenueGapResult {
    int n = 0;
    double budget = 0;
    double r_allpay = 0;
    double r_opt = 0;
    double ratio = 0;
    double bound = 0; // n / (n - 1)
    bool within_bound = false;
    nlohmann::json to_json() const;
};
RevenueGapResult revenue_gap_experiment(const Dist& d, int n, double B);

// Optimal interim welfare for a discrete distribution over monotone
// atom-level rules satisfying the interim feasibility tail constraints, with
// an optional payment cap B on the top type and an optional allocation cap.
double optimal_welfare_discrete(const Dist& d, int n, std::optional<double> B,
                                std::optional<double> alloc_cap);
// Ex ante relaxation: E[x] <= 1/n instead of interim feasibility.
double ex_ante_welfare_discrete(const Dist& d, int n, double B);

struct EBoundRow {
    std::string dist;
    int n = 0;
    double budget = 0;
    double k0 = 0;
    int k = 0; // lotteries, ceil(k0)
    double v_dagger = 0;
    double x_po = 0;
    double x_cl = 0; // interim allocation of the k-lottery clinching auction at v_dagger
    double x_cl_se = 0;
    double x_cl_floor = 0; // clinch_k_allocation_bound(n, k0) * x_po
    double w_exante = 0;
    double w_clk = 0; // k-lottery clinching auction
    double w_clk_se = 0;
    double w_cl = 0; // clinching auction
    double w_cl_se = 0;
    bool alloc_ok = false;
    bool welfare_ok = false;
    nlohmann::json to_json() const;
};
// Compares the k-lottery clinching auction against the ex ante relaxation at
// the posted-lottery cutoff, and both clinching auctions against it in
// welfare. Monte Carlo checks allow three standard errors.
EBoundRow ebound_check(const Dist& d, const std::string& label, int n, double B,
                       std::uint64_t samples, std::uint64_t seed);

} // namespace bal
