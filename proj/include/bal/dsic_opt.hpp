#pragma once

#include "bal/lp.hpp"

#include <gmpxx.h>
#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bal {

// Two agents, values uniform on {1..h}. Variable x(v1,v2) is agent 1's
// allocation at profile (v1,v2); index (v1-1)*h + (v2-1).
int dsic_var(int h, int v1, int v2);

// Rows: budget(v2) for v2=1..h, then feas(a,b) for a<=b, then mono(v1,v2)
// for v1=1..h-1, v2=1..h.
Lp build_primal(int h, double B);
ExactLp build_primal_exact(int h, const mpq_class& B);

struct DiscreteAlloc {
    int h = 0;
    mpq_class B;
    std::vector<mpq_class> x; // row major, see dsic_var

    const mpq_class& at(int v1, int v2) const { return x[dsic_var(h, v1, v2)]; }
    mpq_class objective() const; // sum v1 * x(v1,v2)
    std::vector<double> to_double() const;
};

// Middle-ironed allocation with L = {1..vlo-1}, M = {vlo..vhi-1}, H = {vhi..h}.
// vhi = h+1 leaves H empty.
DiscreteAlloc mic_discrete(int h, const mpq_class& B, int vlo, int vhi);

struct ThresholdChoice {
    int v_lo = 1;
    int v_hi = 1;
    mpq_class lambda_vpp;
    mpq_class window_lo;
    mpq_class window_hi;
    bool empty_l_case = false; // no v'' passed the scan; v'' = 2B+1, v' = 1
};

struct DualCertificate {
    int h = 0;
    mpq_class B;
    ThresholdChoice choice;
    std::vector<mpq_class> Lambda; // index 1..h
    std::vector<mpq_class> lambda; // Lambda(v) - Lambda(v+1), index 1..h-1
    std::vector<mpq_class> beta;   // dsic_var layout, symmetric
    std::vector<mpq_class> mu;     // dsic_var layout, v1 <= h-1 used

    mpq_class objective() const; // B * sum Lambda + 1/2 * sum beta
    // Multipliers in build_primal row order (diagonal feasibility rows carry beta/2).
    std::vector<mpq_class> row_duals() const;
};

mpq_class z_function(int h, const mpq_class& B, int v);

// Exact lambda(v''-1) window for given thresholds, from the pivotal rows.
struct LambdaWindow {
    mpq_class lo;
    mpq_class hi;
    bool empty() const { return lo > hi; }
};
LambdaWindow lambda_window(int h, const mpq_class& B, int v_lo, int v_hi);

ThresholdChoice find_thresholds(int h, int B);
ThresholdChoice thresholds_with_vhi(int h, int B, int v_hi);

DualCertificate build_dual(int h, const mpq_class& B, const ThresholdChoice& choice);

// Same dual written as affine functions of lambda(v''-1); used to locate the
// constraints that pin the window.
struct AffineConstraint {
    std::string name;
    mpq_class constant;
    mpq_class slope; // value = constant + slope * lambda, required >= 0
};
std::vector<AffineConstraint> dual_constraints_affine(int h, const mpq_class& B, int v_lo,
                                                      int v_hi);

struct VerifyOptions {
    bool exact = true;
    bool solve_lp = true;
    std::optional<int> v_hi_override;
};

struct VerifyReport {
    int h = 0;
    int B = 0;
    ThresholdChoice choice;
    std::optional<double> lp_objective;
    long lp_iterations = 0;
    double mic_objective = 0;
    double dual_objective = 0;
    bool exact = true;
    CertificateReport certificate;
    std::vector<std::string> pivotal_failures;
    std::optional<int> lp_v_lo;
    std::optional<int> lp_v_hi;
    bool lp_agrees = true;
    bool pass = false;

    nlohmann::json to_json() const;
};

VerifyReport verify_optimal(int h, int B, const VerifyOptions& opt = {});

// Expected two-agent welfare of the middle-ironed rule under uniform[0,hbar]^2.
double mic_welfare_continuous(double hbar, double B, double v_lo, double v_hi);

} // namespace bal
