#include "bal/wpb.hpp"

#include <algorithm>
#include <cmath>

namespace bal {

namespace {

constexpr int kBisectIters = 200;

double zbar_at(const PiecewiseFn& z, const Dist& d, double v) {
    return mass(d, v, d.hbar()) > 1e-14 ? f_average(z, d, v, d.hbar()) : z(d.hbar());
}

void require_continuous(const Dist& d, const char* what) {
    if (!d.continuous()) throw UnsupportedError(std::string(what) + ": discrete distribution");
}

// Top-payment residual of the winner-pays-bid rule ironed on [v, hbar].
double fp_residual(const PiecewiseFn& z, const PiecewiseFn& Z, const Dist& d, double B, double v) {
    const double zb = zbar_at(z, d, v);
    return v * zb - Z(v) - B * zb;
}

} // namespace

double value_at_quantile(const Dist& d, double q) {
    return d.quantile_value(std::clamp(q, 0.0, 1.0));
}

double lagrangian_curve(const Dist& d, double lambda, double B, double q) {
    require_continuous(d, "lagrangian_curve");
    if (!(q > 0)) return 0.0;
    const double v = value_at_quantile(d, q);
    return d.partial_mean(v, d.hbar()) - lambda * v + lambda * B;
}

nlohmann::json PayoffCurve::to_json() const {
    return {{"q", q}, {"values", values}, {"hull", hull}, {"q_dagger", q_dagger}};
}

PayoffCurve concave_hull(const std::vector<double>& q, const std::vector<double>& values) {
    if (q.size() != values.size() || q.size() < 2 || q.front() != 0) {
        throw DomainError("concave_hull: need matching samples starting at q = 0");
    }
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (!(q[i] > q[i - 1])) throw DomainError("concave_hull: q must be increasing");
    }
    // Monotone chain, upper envelope.
    std::vector<std::size_t> h;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (q[a] - q[o]) * (values[b] - values[o]) - (values[a] - values[o]) * (q[b] - q[o]);
    };
    for (std::size_t i = 0; i < q.size(); ++i) {
        while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), i) >= 0) h.pop_back();
        h.push_back(i);
    }
    PayoffCurve c;
    c.q = q;
    c.values = values;
    c.hull.resize(q.size());
    for (std::size_t s = 0; s + 1 < h.size(); ++s) {
        const std::size_t a = h[s], b = h[s + 1];
        for (std::size_t i = a; i <= b; ++i) {
            const double t = (q[i] - q[a]) / (q[b] - q[a]);
            c.hull[i] = values[a] + t * (values[b] - values[a]);
        }
    }
    c.hull.back() = values.back();
    c.q_dagger = h[1] > 1 ? q[h[1]] : 0.0;
    return c;
}

PayoffCurve lagrangian_payoff_curve(const Dist& d, double lambda, double B, int grid) {
    if (grid < 2) throw DomainError("lagrangian_payoff_curve: grid too small");
    std::vector<double> q(grid + 1), r(grid + 1);
    for (int k = 0; k <= grid; ++k) {
        q[k] = static_cast<double>(k) / grid;
        r[k] = lagrangian_curve(d, lambda, B, q[k]);
    }
    return concave_hull(q, r);
}

double lagrangian_ironing_quantile(const Dist& d, double lambda, double B) {
    require_continuous(d, "lagrangian_ironing_quantile");
    // R(q)/q is increasing before the tangency point and decreasing after it,
    // so the sign of R'(q) q - R(q) brackets q_dagger.
    auto slope_gap = [&](double q) {
        const double v = value_at_quantile(d, q);
        const double f = d.pdf(v);
        const double dv = f > 0 ? -1.0 / f : 0.0;
        return (v - lambda * dv) * q - lagrangian_curve(d, lambda, B, q);
    };
    if (lambda <= 0) return 0.0;
    if (slope_gap(1.0) >= 0) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < kBisectIters && hi - lo > 1e-15; ++it) {
        const double mid = (lo + hi) / 2;
        (slope_gap(mid) >= 0 ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

double bid_ratio(const MechanismRule& rule, double v) {
    const double x = rule.interim_alloc(v);
    if (!(x > 0)) throw DomainError("bid_ratio: zero allocation");
    return rule.interim_pay(v) / x;
}

MechanismRule first_price_rule(const Dist& d, int n, double B) {
    require_continuous(d, "first_price_rule");
    if (n < 1) throw DomainError("first_price_rule: agent count must be >= 1");
    if (!(B > 0)) throw DomainError("first_price_rule: budget must be positive");
    const double hbar = d.hbar();
    const PiecewiseFn z = hbw_constraint(d, n);
    const PiecewiseFn Z = z.antiderivative();
    MechanismRule r;
    r.label = "first-price";
    r.threshold = hbar;
    if (fp_residual(z, Z, d, B, hbar) > 0) {
        double lo = 0, hi = hbar;
        for (int it = 0; it < kBisectIters && hi - lo > 1e-14 * std::max(1.0, hbar); ++it) {
            const double mid = (lo + hi) / 2;
            (fp_residual(z, Z, d, B, mid) <= 0 ? lo : hi) = mid;
        }
        r.threshold = (lo + hi) / 2;
    }
    r.interim_alloc = r.threshold < hbar ? iron(z, d, r.threshold, hbar) : z;
    r.interim_pay = payment_identity(r.interim_alloc);
    const PiecewiseFn x = r.interim_alloc;
    const PiecewiseFn p = r.interim_pay;
    auto bid = [x, p](double v) {
        const double xv = x(v);
        return xv > 1e-300 ? p(v) / xv : 0.0;
    };
    std::vector<Piece> ps = PiecewiseFn::tabulate(bid, 0.0, r.threshold, 2001).pieces();
    if (r.threshold < hbar) ps.push_back(Piece{r.threshold, hbar, {Term::constant(bid(hbar))}, {}});
    const PiecewiseFn b(std::move(ps));
    r.bid_fn = b;
    return r;
}

double find_binding_lambda(const Dist& d, int n, double B) {
    require_continuous(d, "find_binding_lambda");
    const double hbar = d.hbar();
    const PiecewiseFn z = hbw_constraint(d, n);
    const PiecewiseFn Z = z.antiderivative();
    auto residual = [&](double lambda) {
        const double v = value_at_quantile(d, lagrangian_ironing_quantile(d, lambda, B));
        return fp_residual(z, Z, d, B, v);
    };
    if (residual(0.0) <= 0) return 0.0;
    double lo = 0.0, hi = std::max(1.0, hbar);
    while (residual(hi) > 0) {
        hi *= 2;
        if (hi > 1e12) throw NumericalFailure("find_binding_lambda: no binding multiplier");
    }
    for (int it = 0; it < kBisectIters && hi - lo > 1e-15 * hi; ++it) {
        const double mid = (lo + hi) / 2;
        (residual(mid) > 0 ? lo : hi) = mid;
    }
    return hi;
}

Dist fp_instance(int n) {
    if (n < 2) throw DomainError("fp_instance: n must be >= 2");
    const double a = 1.0 / n;
    return Dist::piecewise({0.0, a, 1.0}, {n - 1.0, 1.0 / (n - 1.0)});
}

double fp_instance_budget(int n) { return (1.0 - 1.0 / std::exp(1.0)) / n; }

double rule_welfare(const MechanismRule& rule, const Dist& d, int n) {
    return n * integral_dF(rule.interim_alloc.times_v(), d, 0.0, d.hbar());
}

nlohmann::json FpGapResult::to_json() const {
    return {{"n", n},         {"budget", budget}, {"v_fp", v_fp}, {"v_ap", v_ap},
            {"W_fp", w_fp},   {"W_ap", w_ap},     {"ratio", ratio}};
}

FpGapResult fp_lowerbound_experiment(int n) {
    const Dist d = fp_instance(n);
    FpGapResult res;
    res.n = n;
    res.budget = fp_instance_budget(n);
    const MechanismRule fp = first_price_rule(d, n, res.budget);
    const MechanismRule ap = allpay_rule(d, n, res.budget);
    res.v_fp = fp.threshold;
    res.v_ap = ap.threshold;
    res.w_fp = rule_welfare(fp, d, n);
    res.w_ap = rule_welfare(ap, d, n);
    res.ratio = res.w_ap / res.w_fp;
    return res;
}

} // namespace bal
