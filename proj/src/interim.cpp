#include "bal/interim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bal {

namespace {

constexpr int kBisectIters = 200;

// (a^n - b^n) / (n (a - b)), the mean of a^k b^(n-1-k); equals a^(n-1) at a = b.
double power_diff_quot(double a, double b, int n) {
    if (n == 1) return 1.0;
    if (std::abs(a - b) > 1e-4 * std::max(a, b)) {
        return (std::pow(a, n) - std::pow(b, n)) / (n * (a - b));
    }
    double s = 0;
    for (int k = 0; k < n; ++k) s += std::pow(a, k) * std::pow(b, n - 1 - k);
    return s / n;
}

void require_n(int n) {
    if (n < 1) throw DomainError("agent count must be >= 1");
}

} // namespace

PiecewiseFn atom_fn(const Dist& d, const std::vector<double>& xs) {
    if (d.continuous()) throw UnsupportedError("atom_fn: continuous distribution");
    return PiecewiseFn::steps(0.0, d.values(), xs);
}

double integral_dF(const PiecewiseFn& g, const Dist& d, double a, double b) {
    double s = 0;
    if (d.continuous()) {
        const auto& br = d.breaks();
        const auto& f = d.densities();
        for (int i = 0; i < d.pieces(); ++i) {
            const double lo = std::max(a, br[i]);
            const double hi = std::min(b, br[i + 1]);
            if (hi > lo && f[i] > 0) s += f[i] * g.integral(lo, hi);
        }
        return s;
    }
    for (int j = 0; j < d.atoms(); ++j) {
        const double v = d.values()[j];
        if (v >= a && v <= b) s += d.masses()[j] * g(v);
    }
    return s;
}

double mass(const Dist& d, double a, double b) {
    a = std::clamp(a, 0.0, d.hbar());
    b = std::clamp(b, 0.0, d.hbar());
    if (b < a) return 0.0;
    return d.continuous() ? d.cdf(b) - d.cdf(a) : d.cdf(b) - d.cdf_below(a);
}

double f_average(const PiecewiseFn& g, const Dist& d, double a, double b) {
    const double m = mass(d, a, b);
    if (m <= 1e-15) throw DegenerateIntervalError("zero-mass interval");
    return integral_dF(g, d, a, b) / m;
}

PiecewiseFn hbw_constraint(const Dist& d, int n) {
    require_n(n);
    if (d.continuous()) {
        if (n == 1) return PiecewiseFn::constant(1.0, 0.0, d.hbar());
        std::vector<Piece> ps;
        const auto& br = d.breaks();
        for (int i = 0; i < d.pieces(); ++i) {
            const double f = d.densities()[i];
            const double base = d.cdf_at_break(i) - f * br[i];
            ps.push_back(Piece{br[i], br[i + 1], {Term::affine_power(1.0, base, f, n - 1)}, {}});
        }
        return PiecewiseFn(std::move(ps));
    }
    std::vector<double> z(d.atoms());
    for (int j = 0; j < d.atoms(); ++j) {
        z[j] = power_diff_quot(d.cdf_at_atom(j), d.cdf_before_atom(j), n);
    }
    return atom_fn(d, z);
}

PiecewiseFn iron(const PiecewiseFn& x, const Dist& d, double a, double b) {
    if (!(a >= 0 && a < b && b <= d.hbar() * (1 + 1e-12))) {
        throw DomainError("iron: need 0 <= a < b <= hbar");
    }
    const double avg = f_average(x, d, a, b);
    if (d.continuous()) return x.spliced(a, std::min(b, x.hi()), PiecewiseFn::constant(avg, a, b));
    std::vector<double> xs(d.atoms());
    for (int j = 0; j < d.atoms(); ++j) {
        const double v = d.values()[j];
        xs[j] = (v >= a && v <= b) ? avg : x(v);
    }
    return atom_fn(d, xs);
}

PiecewiseFn payment_identity(const PiecewiseFn& x) { return x.times_v() - x.antiderivative(); }

double allpay_iron_threshold(const PiecewiseFn& z, const Dist& d, double B) {
    if (!(B > 0)) throw DomainError("allpay_iron_threshold: budget must be positive");
    if (!d.continuous()) throw UnsupportedError("allpay_iron_threshold: use discrete_top_iron");
    const double hbar = d.hbar();
    const PiecewiseFn Z = z.antiderivative();
    auto g = [&](double v) {
        const double zbar = mass(d, v, hbar) > 1e-14 ? f_average(z, d, v, hbar) : z(hbar);
        return v * zbar - Z(v);
    };
    if (g(hbar) <= B) return hbar;
    double lo = 0, hi = hbar;
    for (int it = 0; it < kBisectIters && hi - lo > 1e-13 * std::max(1.0, hbar); ++it) {
        const double mid = (lo + hi) / 2;
        (g(mid) <= B ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

bool interim_feasible(const PiecewiseFn& x, const PiecewiseFn& z, const Dist& d, double tol) {
    if (!d.continuous()) {
        double tx = 0, tz = 0;
        for (int j = d.atoms() - 1; j >= 0; --j) {
            const double v = d.values()[j];
            tx += d.masses()[j] * x(v);
            tz += d.masses()[j] * z(v);
            if (tx > tz + tol) return false;
        }
        return true;
    }
    const double hbar = d.hbar();
    const PiecewiseFn X = x.antiderivative();
    const PiecewiseFn Zf = z.antiderivative();
    const auto& br = d.breaks();
    const auto& f = d.densities();
    auto tail = [&](const PiecewiseFn& A, double v) {
        double s = 0;
        for (int i = d.pieces() - 1; i >= 0 && br[i + 1] > v; --i) {
            if (f[i] > 0) s += f[i] * (A(br[i + 1]) - A(std::max(v, br[i])));
        }
        return s;
    };
    std::set<double> pts(br.begin(), br.end());
    for (double b : x.breakpoints()) pts.insert(b);
    for (double b : z.breakpoints()) pts.insert(b);
    const int grid = 10000;
    for (int k = 0; k <= grid; ++k) pts.insert(hbar * k / grid);
    for (double v : pts) {
        if (v < 0 || v > hbar) continue;
        if (tail(X, v) > tail(Zf, v) + tol) return false;
    }
    return true;
}

nlohmann::json PostedLottery::to_json() const {
    return {{"price", price},
            {"win_prob", win_prob},
            {"cutoff", cutoff},
            {"regime", regime == LotteryRegime::BudgetBinds ? "budget_binds" : "allocation_binds"},
            {"welfare_regular", welfare_regular}};
}

PostedLottery ex_ante_optimal(const Dist& d, int n, double B) {
    require_n(n);
    if (!d.continuous()) throw UnsupportedError("ex_ante_optimal: discrete distribution");
    if (!(B > 0)) throw DomainError("ex_ante_optimal: budget must be positive");
    PostedLottery lot;
    lot.welfare_regular = check_regularity(d).welfare_regular;
    const double hbar = d.hbar();
    const double target = 1.0 / n;
    if (B < hbar && 1.0 - d.cdf(B) > target) {
        auto h = [&](double v) { return B / v * (1.0 - d.cdf(v)) - target; };
        double lo = B, hi = hbar;
        for (int it = 0; it < kBisectIters && hi - lo > 1e-15 * hbar; ++it) {
            const double mid = (lo + hi) / 2;
            (h(mid) > 0 ? lo : hi) = mid;
        }
        lot.cutoff = (lo + hi) / 2;
        lot.price = B;
        lot.win_prob = B / lot.cutoff;
        lot.regime = LotteryRegime::BudgetBinds;
        return lot;
    }
    lot.price = d.quantile_value(target);
    lot.cutoff = lot.price;
    lot.win_prob = 1.0;
    lot.regime = LotteryRegime::AllocationBinds;
    return lot;
}

double ex_ante_welfare(const PostedLottery& lot, const Dist& d, int n) {
    return n * lot.win_prob * d.partial_mean(lot.cutoff, d.hbar());
}

double relax_budget_bound(const PiecewiseFn& z, const Dist& d, double B) {
    const double v = allpay_iron_threshold(z, d, B);
    const double zbar = v < d.hbar() && mass(d, v, d.hbar()) > 1e-14 ? f_average(z, d, v, d.hbar())
                                                                     : z(d.hbar());
    return std::min(1.0, 2 * zbar);
}

std::vector<double> discrete_payments(const Dist& d, const std::vector<double>& x) {
    std::vector<double> p(x.size());
    double acc = 0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        acc += d.values()[j - 1] * (x[j] - x[j - 1]);
        p[j] = acc;
    }
    return p;
}

DiscreteTopIron discrete_top_iron(const Dist& d, int n, double B) {
    require_n(n);
    if (d.continuous()) throw UnsupportedError("discrete_top_iron: continuous distribution");
    if (B < 0) throw InfeasibleBudgetError("discrete_top_iron: negative budget");
    const int m = d.atoms();
    auto build = [&](double u) {
        DiscreteTopIron r;
        r.u_star = u;
        r.zbar = power_diff_quot(1.0, u, n);
        r.x.resize(m);
        for (int j = 0; j < m; ++j) {
            const double lo = d.cdf_before_atom(j);
            const double hi = d.cdf_at_atom(j);
            const double mj = d.masses()[j];
            if (hi <= u) {
                r.x[j] = power_diff_quot(hi, lo, n);
            } else if (lo >= u) {
                r.x[j] = r.zbar;
            } else {
                r.boundary = j;
                r.x[j] = ((u - lo) * power_diff_quot(u, lo, n) + (hi - u) * r.zbar) / mj;
            }
        }
        r.p = discrete_payments(d, r.x);
        return r;
    };
    DiscreteTopIron top = build(1.0);
    top.boundary = -1;
    if (top.p.back() <= B) return top;
    double lo = 0, hi = 1;
    for (int it = 0; it < kBisectIters && hi - lo > 1e-16; ++it) {
        const double mid = (lo + hi) / 2;
        (build(mid).p.back() <= B ? lo : hi) = mid;
    }
    return build(lo);
}

double relax_budget_bound_discrete(const Dist& d, int n, double B) {
    return std::min(1.0, 2 * discrete_top_iron(d, n, B).zbar);
}

} // namespace bal
