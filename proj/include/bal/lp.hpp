#pragma once

#include "bal/common.hpp"

#include <gmpxx.h>
#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bal {

inline double to_double(double v) { return v; }
inline double to_double(const mpq_class& v) { return v.get_d(); }

// Canonical rational a/b.
inline mpq_class frac(long a, long b) {
    mpq_class q(a, b);
    q.canonicalize();
    return q;
}

enum class Sense { Max, Min };
enum class Rel { Le, Eq, Ge };
enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);
const char* to_string(Rel r);

template <class T>
struct LpRow {
    std::string name;
    std::vector<std::pair<int, T>> coeffs;
    Rel rel = Rel::Le;
    T rhs{};
};

// Sparse LP. Variables default to bounds [0, inf).
template <class T>
struct BasicLp {
    Sense sense = Sense::Max;
    std::vector<std::string> var_names;
    std::vector<T> obj;
    std::vector<std::optional<T>> lo;
    std::vector<std::optional<T>> hi;
    std::vector<LpRow<T>> rows;

    int add_var(std::string name, T cost = T(0), std::optional<T> lower = T(0),
                std::optional<T> upper = std::nullopt) {
        var_names.push_back(std::move(name));
        obj.push_back(cost);
        lo.push_back(lower);
        hi.push_back(upper);
        return static_cast<int>(var_names.size()) - 1;
    }

    int add_row(std::string name, std::vector<std::pair<int, T>> coeffs, Rel rel, T rhs) {
        rows.push_back({std::move(name), std::move(coeffs), rel, rhs});
        return static_cast<int>(rows.size()) - 1;
    }

    int num_vars() const { return static_cast<int>(var_names.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    std::size_t nonzeros() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.coeffs.size();
        return n;
    }
};

using Lp = BasicLp<double>;
using ExactLp = BasicLp<mpq_class>;

template <class T>
struct BasicLpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<T> x;
    T objective{};
    // One entry per row of the input LP; sign convention: the objective
    // changes by row_duals[i] per unit increase of rows[i].rhs.
    std::vector<T> row_duals;
    long iterations = 0;
};

using LpSolution = BasicLpSolution<double>;
using ExactLpSolution = BasicLpSolution<mpq_class>;

struct SolveOptions {
    long max_iterations = 0;   // 0 picks a size-based cap
    int degenerate_limit = 50; // consecutive degenerate pivots before Bland's rule
    double eps = 1e-9;         // ignored in exact arithmetic
};

LpSolution solve(const Lp& lp, const SolveOptions& opt = {});
ExactLpSolution solve(const ExactLp& lp, const SolveOptions& opt = {});

ExactLp to_exact(const Lp& lp);

struct RowViolation {
    std::string name;
    double activity = 0;
    double rhs = 0;
    double slack = 0; // negative when violated
};

// Rows (and variable bounds, named "bound:<var>") violated by more than tol.
std::vector<RowViolation> check_point(const Lp& lp, const std::vector<double>& x,
                                      double tol = kTol);
std::vector<RowViolation> check_point(const ExactLp& lp, const std::vector<mpq_class>& x);

template <class T>
T objective_value(const BasicLp<T>& lp, const std::vector<T>& x) {
    T z(0);
    for (int j = 0; j < lp.num_vars(); ++j) z += lp.obj[j] * x[j];
    return z;
}

nlohmann::json to_json(const Lp& lp);
Lp lp_from_json(const nlohmann::json& j);

} // namespace bal

namespace bal {

struct NamedSlack {
    std::string name;
    double slack = 0;
};

// Primal/dual pair check for a max-sense LP with nonnegative variables:
// primal rows, dual rows A^T y >= c, sign of y, objectives and
// complementary slackness, each violation named.
struct CertificateReport {
    std::vector<RowViolation> primal;
    std::vector<NamedSlack> dual;
    std::vector<NamedSlack> complementary;
    double primal_objective = 0;
    double dual_objective = 0;
    bool objectives_equal = false;
    double worst_primal_slack = 0;
    double worst_dual_slack = 0;
    bool ok() const {
        return primal.empty() && dual.empty() && complementary.empty() && objectives_equal;
    }
};

CertificateReport check_certificate(const ExactLp& lp, const std::vector<mpq_class>& x,
                                    const std::vector<mpq_class>& y);
CertificateReport check_certificate(const Lp& lp, const std::vector<double>& x,
                                    const std::vector<double>& y, double tol = 1e-7);

} // namespace bal
