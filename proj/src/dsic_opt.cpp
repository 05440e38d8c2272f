#include "bal/dsic_opt.hpp"

#include <algorithm>
#include <cmath>

namespace bal {

namespace {

std::string pair_name(const char* tag, int a, int b) {
    return std::string(tag) + "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

// sum_{k=a}^{b-1} (h-k)/k
mpq_class harmonic_tail(int h, int a, int b) {
    mpq_class s(0);
    for (int k = a; k < b; ++k) s += frac(h - k, k);
    return s;
}

struct Affine {
    mpq_class a; // constant
    mpq_class b; // coefficient of lambda(v''-1)
    Affine() = default;
    Affine(mpq_class c) : a(std::move(c)) {}
    Affine(mpq_class c, mpq_class s) : a(std::move(c)), b(std::move(s)) {}
    Affine operator+(const Affine& o) const { return {a + o.a, b + o.b}; }
    Affine operator-(const Affine& o) const { return {a - o.a, b - o.b}; }
    Affine scaled(const mpq_class& k) const { return {a * k, b * k}; }
    mpq_class at(const mpq_class& lam) const { return a + b * lam; }
};

struct AffineDual {
    std::vector<Affine> Lambda; // 1..h
    std::vector<Affine> beta;
    std::vector<Affine> mu;
};

AffineDual affine_dual(int h, int vlo, int vhi) {
    AffineDual d;
    const Affine lam(mpq_class(0), mpq_class(1));
    std::vector<mpq_class> S(h + 2, mpq_class(0)); // S[v] = sum_{k=v}^{h-1} (h-k)/k
    for (int v = h - 1; v >= 1; --v) S[v] = S[v + 1] + frac(h - v, v);
    const mpq_class Svpp = vhi <= h ? S[vhi] : mpq_class(0);

    d.Lambda.assign(h + 1, Affine());
    for (int v = 1; v <= h; ++v) {
        if (v < vlo) d.Lambda[v] = Affine();
        else if (v < vhi) d.Lambda[v] = Affine(Svpp + v - vhi + 1) + lam;
        else d.Lambda[v] = Affine(S[v]);
    }
    d.beta.assign(static_cast<std::size_t>(h) * h, Affine());
    for (int v1 = 1; v1 <= h; ++v1) {
        for (int v2 = 1; v2 <= v1; ++v2) {
            Affine val;
            if (v2 < vlo) {
                val = Affine(mpq_class(v1));
            } else if (v2 < vhi) {
                if (v1 < vhi) val = Affine(Svpp + v1 + v2 - vhi + 1) + lam;
                else if (v1 <= h - 1) val = Affine(S[v1] + v2);
                else val = Affine(mpq_class((h - 1) * (vhi - v2) + 1), mpq_class(-(vhi - 1)));
            } else {
                val = Affine(S[v1] + v2);
            }
            d.beta[dsic_var(h, v1, v2)] = val;
            d.beta[dsic_var(h, v2, v1)] = val;
        }
    }
    d.mu.assign(static_cast<std::size_t>(h) * h, Affine());
    for (int v1 = 1; v1 <= h - 1; ++v1) {
        for (int v2 = 1; v2 <= h; ++v2) {
            Affine val;
            if (v2 < vlo) {
                val = Affine();
            } else if (v2 < vhi) {
                if (v1 >= vhi) val = Affine(mpq_class(v1 - vhi + 1) + harmonic_tail(h, vhi, v1)) + lam;
            } else if (v1 > v2) {
                val = Affine(mpq_class(v1 - v2) + harmonic_tail(h, v2, v1));
            }
            d.mu[dsic_var(h, v1, v2)] = val;
        }
    }
    return d;
}

template <class T>
BasicLp<T> primal_impl(int h, const T& B) {
    if (h < 2) throw DomainError("build_primal: h must be at least 2");
    BasicLp<T> lp;
    lp.sense = Sense::Max;
    for (int v1 = 1; v1 <= h; ++v1) {
        for (int v2 = 1; v2 <= h; ++v2) lp.add_var(pair_name("x", v1, v2), T(v1));
    }
    for (int v2 = 1; v2 <= h; ++v2) {
        std::vector<std::pair<int, T>> c;
        for (int t = 1; t <= h - 1; ++t) c.emplace_back(dsic_var(h, t, v2), T(-1));
        c.emplace_back(dsic_var(h, h, v2), T(h - 1));
        lp.add_row("budget(" + std::to_string(v2) + ")", std::move(c), Rel::Le, B);
    }
    for (int a = 1; a <= h; ++a) {
        for (int b = a; b <= h; ++b) {
            std::vector<std::pair<int, T>> c;
            if (a == b) c.emplace_back(dsic_var(h, a, a), T(2));
            else c = {{dsic_var(h, a, b), T(1)}, {dsic_var(h, b, a), T(1)}};
            lp.add_row(pair_name("feas", a, b), std::move(c), Rel::Le, T(1));
        }
    }
    for (int v1 = 1; v1 <= h - 1; ++v1) {
        for (int v2 = 1; v2 <= h; ++v2) {
            lp.add_row(pair_name("mono", v1, v2),
                       {{dsic_var(h, v1, v2), T(1)}, {dsic_var(h, h, v2), T(-1)}}, Rel::Le, T(0));
        }
    }
    return lp;
}

} // namespace

int dsic_var(int h, int v1, int v2) { return (v1 - 1) * h + (v2 - 1); }

Lp build_primal(int h, double B) { return primal_impl<double>(h, B); }

ExactLp build_primal_exact(int h, const mpq_class& B) { return primal_impl<mpq_class>(h, B); }

mpq_class DiscreteAlloc::objective() const {
    mpq_class z(0);
    for (int v1 = 1; v1 <= h; ++v1) {
        for (int v2 = 1; v2 <= h; ++v2) z += v1 * at(v1, v2);
    }
    return z;
}

std::vector<double> DiscreteAlloc::to_double() const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].get_d();
    return out;
}

DiscreteAlloc mic_discrete(int h, const mpq_class& B, int vlo, int vhi) {
    if (!(1 <= vlo && vlo <= vhi && vhi <= h + 1)) {
        throw DomainError("mic_discrete: need 1 <= v' <= v'' <= h+1");
    }
    DiscreteAlloc d;
    d.h = h;
    d.B = B;
    d.x.assign(static_cast<std::size_t>(h) * h, mpq_class(0));
    std::vector<mpq_class> a(h + 1, mpq_class(0));
    mpq_class acc(0);
    for (int v = vhi; v <= h - 1; ++v) {
        a[v] = (B + frac(1, 2) + acc) / v;
        if (a[v] < frac(1, 2) || a[v] > 1) {
            throw InvalidThresholdsError("mic_discrete: a(" + std::to_string(v) +
                                         ") = " + a[v].get_str() + " leaves [1/2, 1]");
        }
        acc += 1 - a[v];
    }
    auto region = [&](int v) { return v < vlo ? 0 : (v < vhi ? 1 : 2); };
    for (int v1 = 1; v1 <= h; ++v1) {
        for (int v2 = 1; v2 <= h; ++v2) {
            const int r1 = region(v1);
            const int r2 = region(v2);
            mpq_class val;
            if (r1 != r2) {
                val = r1 > r2 ? 1 : 0;
            } else if (r1 == 1) {
                val = frac(1, 2);
            } else if (v1 == v2) {
                val = frac(1, 2);
            } else if (r1 == 0) {
                val = v1 > v2 ? 1 : 0;
            } else {
                val = v1 > v2 ? a[v2] : mpq_class(1 - a[v1]);
            }
            d.x[dsic_var(h, v1, v2)] = val;
        }
    }
    return d;
}

mpq_class DualCertificate::objective() const {
    mpq_class z(0);
    for (int v = 1; v <= h; ++v) z += B * Lambda[v];
    for (const auto& b : beta) z += b / 2;
    return z;
}

std::vector<mpq_class> DualCertificate::row_duals() const {
    std::vector<mpq_class> y;
    y.reserve(h + h * (h + 1) / 2 + (h - 1) * h);
    for (int v = 1; v <= h; ++v) y.push_back(Lambda[v]);
    for (int a = 1; a <= h; ++a) {
        for (int b = a; b <= h; ++b) {
            const auto& bb = beta[dsic_var(h, a, b)];
            y.push_back(a == b ? mpq_class(bb / 2) : bb);
        }
    }
    for (int v1 = 1; v1 <= h - 1; ++v1) {
        for (int v2 = 1; v2 <= h; ++v2) y.push_back(mu[dsic_var(h, v1, v2)]);
    }
    return y;
}

mpq_class z_function(int h, const mpq_class& B, int v) {
    if (v < 1 || v > h) throw DomainError("z_function: v outside 1..h");
    return 2 * v - 2 * B - 2 - harmonic_tail(h, v, h);
}

LambdaWindow lambda_window(int h, const mpq_class& B, int vlo, int vhi) {
    if (vlo >= vhi) return {mpq_class(0), mpq_class(0)}; // M empty: lambda unused
    const mpq_class z = z_function(h, B, vhi);
    LambdaWindow w;
    w.lo = std::max(mpq_class(-1), mpq_class(z - 1));
    w.hi = frac(h, vhi - 1) - 1;
    if (vlo > 1) w.hi = std::min(w.hi, z);
    return w;
}

ThresholdChoice thresholds_with_vhi(int h, int B, int vhi) {
    ThresholdChoice c;
    c.v_hi = vhi;
    c.v_lo = std::max(1, 2 * B + 2 - vhi);
    auto w = lambda_window(h, mpq_class(B), c.v_lo, c.v_hi);
    c.window_lo = w.lo;
    c.window_hi = w.hi;
    c.lambda_vpp = (w.lo + w.hi) / 2;
    return c;
}

ThresholdChoice find_thresholds(int h, int B) {
    if (B < 1 || B >= h) throw DomainError("find_thresholds: need 1 <= B < h");
    for (int v = B + 1; v <= std::min(2 * B + 1, h); ++v) {
        const mpq_class z = z_function(h, mpq_class(B), v);
        if (z >= -1 && z <= frac(h, v - 1)) return thresholds_with_vhi(h, B, v);
    }
    const int v = 2 * B + 1;
    if (v > h) {
        throw CertificationFailure("find_thresholds: no admissible v'' for h=" +
                                   std::to_string(h) + ", B=" + std::to_string(B));
    }
    if (z_function(h, mpq_class(B), v) > frac(h, v - 1)) {
        throw CertificationFailure("find_thresholds: empty-L case fails Z(v'') <= h/(v''-1)");
    }
    auto c = thresholds_with_vhi(h, B, v);
    c.empty_l_case = true;
    return c;
}

DualCertificate build_dual(int h, const mpq_class& B, const ThresholdChoice& choice) {
    auto ad = affine_dual(h, choice.v_lo, choice.v_hi);
    DualCertificate d;
    d.h = h;
    d.B = B;
    d.choice = choice;
    const auto& lam = choice.lambda_vpp;
    d.Lambda.assign(h + 1, mpq_class(0));
    for (int v = 1; v <= h; ++v) d.Lambda[v] = ad.Lambda[v].at(lam);
    d.lambda.assign(h, mpq_class(0));
    for (int v = 1; v <= h - 1; ++v) d.lambda[v] = d.Lambda[v] - d.Lambda[v + 1];
    d.beta.resize(ad.beta.size());
    d.mu.resize(ad.mu.size());
    for (std::size_t i = 0; i < ad.beta.size(); ++i) d.beta[i] = ad.beta[i].at(lam);
    for (std::size_t i = 0; i < ad.mu.size(); ++i) d.mu[i] = ad.mu[i].at(lam);
    return d;
}

std::vector<AffineConstraint> dual_constraints_affine(int h, const mpq_class& B, int vlo,
                                                      int vhi) {
    (void)B; // the dual rows do not involve B; it enters only the objective
    auto ad = affine_dual(h, vlo, vhi);
    std::vector<AffineConstraint> out;
    auto push = [&](std::string name, const Affine& f) {
        out.push_back({std::move(name), f.a, f.b});
    };
    for (int v2 = 1; v2 <= h; ++v2) {
        for (int v1 = 1; v1 <= h - 1; ++v1) {
            const int k = dsic_var(h, v1, v2);
            push("dual:" + pair_name("x", v1, v2),
                 Affine() - ad.Lambda[v2] + ad.beta[k] + ad.mu[k] - Affine(mpq_class(v1)));
        }
        Affine row = ad.Lambda[v2].scaled(mpq_class(h - 1)) + ad.beta[dsic_var(h, h, v2)];
        for (int t = 1; t <= h - 1; ++t) row = row - ad.mu[dsic_var(h, t, v2)];
        push("dual:" + pair_name("x", h, v2), row - Affine(mpq_class(h)));
    }
    for (int v = 1; v <= h; ++v) push("Lambda(" + std::to_string(v) + ")", ad.Lambda[v]);
    for (int v1 = 1; v1 <= h; ++v1) {
        for (int v2 = 1; v2 <= v1; ++v2) push(pair_name("beta", v1, v2), ad.beta[dsic_var(h, v1, v2)]);
    }
    for (int v1 = 1; v1 <= h - 1; ++v1) {
        for (int v2 = 1; v2 <= h; ++v2) push(pair_name("mu", v1, v2), ad.mu[dsic_var(h, v1, v2)]);
    }
    return out;
}

namespace {

void extract_lp_thresholds(int h, const std::vector<double>& x, VerifyReport& rep) {
    constexpr double tol = 1e-6;
    auto at = [&](int v1, int v2) { return x[dsic_var(h, v1, v2)]; };
    for (int v = 2; v <= h; ++v) {
        if (at(v, v - 1) <= 0.5 + tol) {
            rep.lp_v_lo = v - 1;
            break;
        }
    }
    if (rep.lp_v_lo) {
        for (int v = *rep.lp_v_lo + 1; v <= h; ++v) {
            if (at(v, v - 1) >= 1 - tol) {
                rep.lp_v_hi = v;
                break;
            }
        }
    }
    const auto& c = rep.choice;
    if (c.v_lo == c.v_hi) {
        rep.lp_agrees = !rep.lp_v_lo.has_value();
    } else {
        rep.lp_agrees = rep.lp_v_lo == c.v_lo && rep.lp_v_hi.value_or(h + 1) == c.v_hi;
    }
}

} // namespace

VerifyReport verify_optimal(int h, int B, const VerifyOptions& opt) {
    VerifyReport rep;
    rep.h = h;
    rep.B = B;
    rep.exact = opt.exact;
    rep.choice = opt.v_hi_override ? thresholds_with_vhi(h, B, *opt.v_hi_override)
                                   : find_thresholds(h, B);
    const auto& c = rep.choice;
    const mpq_class Bq(B);

    if (opt.solve_lp) {
        auto sol = solve(build_primal(h, static_cast<double>(B)));
        if (sol.status != LpStatus::Optimal) {
            throw NumericalFailure("verify_optimal: LP not optimal (" +
                                   std::string(to_string(sol.status)) + ")");
        }
        rep.lp_objective = sol.objective;
        rep.lp_iterations = sol.iterations;
        extract_lp_thresholds(h, sol.x, rep);
    }

    DiscreteAlloc mic;
    try {
        mic = mic_discrete(h, Bq, c.v_lo, c.v_hi);
    } catch (const InvalidThresholdsError& e) {
        rep.pivotal_failures.push_back(e.what());
        rep.pass = false;
        return rep;
    }
    auto dual = build_dual(h, Bq, c);
    rep.mic_objective = mic.objective().get_d();
    rep.dual_objective = dual.objective().get_d();

    if (opt.exact) {
        rep.certificate = check_certificate(build_primal_exact(h, Bq), mic.x, dual.row_duals());
    } else {
        std::vector<double> y;
        for (const auto& v : dual.row_duals()) y.push_back(v.get_d());
        rep.certificate = check_certificate(build_primal(h, B), mic.to_double(), y, 1e-9);
    }
    for (const auto& f : dual_constraints_affine(h, Bq, c.v_lo, c.v_hi)) {
        if (f.constant + f.slope * c.lambda_vpp < 0 && sgn(f.slope) != 0) {
            rep.pivotal_failures.push_back(f.name);
        }
    }
    bool lp_match = !rep.lp_objective || std::abs(*rep.lp_objective - rep.mic_objective) <= 1e-6;
    rep.pass = rep.certificate.ok() && rep.pivotal_failures.empty() && lp_match &&
               std::abs(rep.mic_objective - rep.dual_objective) <= 1e-6;
    return rep;
}

nlohmann::json VerifyReport::to_json() const {
    using nlohmann::json;
    auto named = [](const auto& v) {
        json a = json::array();
        for (const auto& e : v) a.push_back({{"name", e.name}, {"slack", e.slack}});
        return a;
    };
    json j;
    j["h"] = h;
    j["B"] = B;
    j["v_lo"] = choice.v_lo;
    j["v_hi"] = choice.v_hi;
    j["lambda_vpp"] = choice.lambda_vpp.get_str();
    j["lambda_window"] = {choice.window_lo.get_str(), choice.window_hi.get_str()};
    j["empty_l_case"] = choice.empty_l_case;
    j["exact"] = exact;
    j["lp_objective"] = lp_objective ? json(*lp_objective) : json(nullptr);
    j["mic_objective"] = mic_objective;
    j["dual_objective"] = dual_objective;
    j["primal_violations"] = named(certificate.primal);
    j["dual_violations"] = named(certificate.dual);
    j["complementary_slackness_violations"] = named(certificate.complementary);
    j["pivotal_failures"] = pivotal_failures;
    j["worst_primal_slack"] = certificate.worst_primal_slack;
    j["worst_dual_slack"] = certificate.worst_dual_slack;
    j["lp_thresholds"] = {{"v_lo", lp_v_lo ? json(*lp_v_lo) : json(nullptr)},
                          {"v_hi", lp_v_hi ? json(*lp_v_hi) : json(nullptr)},
                          {"agrees", lp_agrees}};
    j["pass"] = pass;
    return j;
}

double mic_welfare_continuous(double hbar, double B, double v_lo, double v_hi) {
    if (!(hbar > 0) || v_lo < 0 || v_hi < v_lo) {
        throw DomainError("mic_welfare_continuous: need hbar > 0 and 0 <= v' <= v''");
    }
    (void)B;
    const double a = std::min(v_lo, hbar);
    const double b = std::min(v_hi, hbar);
    const double h2 = hbar * hbar;
    // integrals over v1 > v2, doubled at the end
    const double low = (h2 * a - a * a * a / 3.0) / 2.0;
    const double mid = (b - a) * (b - a) / 2.0 * (a + b) / 2.0;
    const double cross = (b - a) * (h2 - b * b) / 2.0;
    double high = 0.0;
    if (b < hbar) {
        const double u = hbar - b;
        high = u * u / 2.0 * (b + hbar) / 2.0;
        const double c = v_lo * v_hi;
        if (c > 0) {
            high += c / 4.0 * (h2 * (1.0 / b - 1.0 / hbar) - 2.0 * hbar * std::log(hbar / b) + u);
        }
    }
    return 2.0 * (low + mid + cross + high) / h2;
}

} // namespace bal
