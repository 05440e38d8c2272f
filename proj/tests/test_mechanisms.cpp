#include "bal/mechanisms.hpp"

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace bal;

namespace {

double quad(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// Fixed-step ascending clinching: at every grid price each active agent in
// turn clinches the supply the others cannot demand, until nothing moves.
// Each agent's total allocation is limited to cap.
std::vector<double> grid_clinching(const std::vector<double>& vals, double B, double dp,
                                   double cap = std::numeric_limits<double>::infinity()) {
    const int n = static_cast<int>(vals.size());
    std::vector<double> alloc(n, 0), budget(n, B);
    double s = 1;
    const double vmax = *std::max_element(vals.begin(), vals.end());
    for (double p = dp; p <= vmax + 2 * dp && s > 1e-13; p += dp) {
        std::vector<int> act;
        for (int i = 0; i < n; ++i) {
            if (vals[i] >= p) act.push_back(i);
        }
        if (act.empty()) {
            // the last agent(s) left at the previous price; give the top one what it can buy
            int top = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
            const double c = std::min({s, budget[top] / (p - dp), cap - alloc[top]});
            alloc[top] += c;
            s -= c;
            break;
        }
        for (bool moved = true; moved;) {
            moved = false;
            for (int i : act) {
                double others = 0;
                for (int j : act) {
                    if (j != i) others += std::min(budget[j] / p, cap - alloc[j]);
                }
                const double own = std::min(budget[i] / p, cap - alloc[i]);
                if (s - others > 1e-15 && own > 1e-15) {
                    const double c = std::min(s - others, own);
                    alloc[i] += c;
                    budget[i] -= c * p;
                    s -= c;
                    moved = true;
                }
            }
        }
    }
    return alloc;
}

double w_allpay(double h) { return (3 * h * h * h + 6 * h * h - 12 * h + 8) / (6 * h * h); }
double w_clinch(double h) {
    return (3 * h * h * h + 6 * h * h - 3 * h - 6 * h * std::log(h) - 2) / (6 * h * h);
}

// Two-agent welfare on uniform[0,h], split at the ironing threshold.
double welfare2(const MechanismRule& r, double h) {
    auto f = [&](double v) { return v * r.interim_alloc(v) / h; };
    const double t = std::isnan(r.threshold) ? h : std::min(r.threshold, h);
    return 2 * (quad(f, 0, t) + (t < h ? quad(f, t, h) : 0.0));
}

} // namespace

TEST(Clinching, TwoAgentClosedForm) {
    auto o = clinching_expost({3, 2}, 1);
    EXPECT_NEAR(o.alloc[0], 0.5 + 1.0 / 8, 1e-14);
    EXPECT_NEAR(o.alloc[1], 0.5 - 1.0 / 8, 1e-14);
    EXPECT_NEAR(o.alloc[0] + o.alloc[1], 1.0, 1e-14);
    o = clinching_expost({3, 0.5}, 1);
    EXPECT_DOUBLE_EQ(o.alloc[0], 1.0);
    EXPECT_DOUBLE_EQ(o.alloc[1], 0.0);
    EXPECT_DOUBLE_EQ(o.pay[0], 0.5);
    EXPECT_DOUBLE_EQ(o.pay[1], 0.0);
}

TEST(Clinching, ThreeAgentsReduceToTwo) {
    const auto o = clinching_expost({5, 3, 0.5}, 1);
    EXPECT_NEAR(o.alloc[0], 0.5 + 1.0 / 18, 1e-14);
    EXPECT_NEAR(o.alloc[1], 0.5 - 1.0 / 18, 1e-14);
    EXPECT_DOUBLE_EQ(o.alloc[2], 0.0);
}

TEST(Clinching, MatchesFixedStepOracle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0, 6);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 4;
        std::vector<double> v(n);
        for (auto& x : v) x = U(rng);
        const auto o = clinching_expost(v, 1.0);
        const auto g = grid_clinching(v, 1.0, 2e-4);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(o.alloc[i], g[i], 3e-3) << trial << " " << i;
    }
}

TEST(Clinching, LemmaStructure) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 8);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 6;
        std::vector<double> v(n);
        for (auto& x : v) x = U(rng);
        const double B = 1.0;
        const auto o = clinching_expost(v, B);
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
        EXPECT_NEAR(std::accumulate(o.alloc.begin(), o.alloc.end(), 0.0), 1.0, 1e-12);
        for (int i = 0; i < n; ++i) EXPECT_LE(o.pay[i], B + 1e-9);
        int k = 1;
        for (int j = 1; j <= n; ++j) {
            if (v[idx[j - 1]] >= j * B) k = j;
        }
        // structure holds when v_(k+1) <= k B
        if (k < n && v[idx[k]] > k * B) continue;
        for (int j = 1; j + 1 < k; ++j) EXPECT_NEAR(o.alloc[idx[j]], o.alloc[idx[0]], 1e-12);
        if (k >= 2) EXPECT_GE(o.alloc[idx[0]], o.alloc[idx[k - 1]] - 1e-12);
        for (int j = k; j < n; ++j) EXPECT_LE(o.alloc[idx[j]], 1e-12);
        if (k >= 2) EXPECT_GE(o.alloc[idx[0]], 1.0 / k - 1e-12);
    }
}

TEST(Clinching, SymmetryAndTies) {
    const auto a = clinching_expost({4, 2.5, 3}, 1);
    const auto b = clinching_expost({3, 4, 2.5}, 1);
    EXPECT_NEAR(a.alloc[0], b.alloc[1], 1e-14);
    EXPECT_NEAR(a.alloc[2], b.alloc[0], 1e-14);
    const auto t = clinching_expost({3, 3}, 1);
    EXPECT_NEAR(t.alloc[0], 0.5, 1e-14);
    EXPECT_NEAR(t.alloc[1], 0.5, 1e-14);
    EXPECT_NEAR(t.pay[0], t.pay[1], 1e-14);
}

TEST(ClinchingInterim, ClosedForm) {
    const double h = 4.04;
    const Dist d = Dist::uniform(0, h);
    const auto r = clinching_interim_2agent(d, 1);
    EXPECT_NEAR(r.interim_alloc(2), (h + 2) / (2 * h) - 0.125, 1e-14);
    EXPECT_NEAR(r.interim_alloc(0.7), 0.7 / h, 1e-15);
    EXPECT_NEAR(r.interim_alloc(h), (h + 2) / (2 * h) - 1 / (2 * h * h), 1e-14);
    EXPECT_LT(r.interim_alloc(h), allpay_rule(d, 2, 1).interim_alloc(h));
    EXPECT_NEAR(welfare2(r, h), w_clinch(h), 1e-10);
}

TEST(ClinchingInterim, MatchesSimulation) {
    const Dist d = Dist::piecewise({0, 1, 3}, {0.5, 0.25});
    const double B = 0.8;
    const auto r = clinching_interim_2agent(d, B);
    std::mt19937_64 rng(21);
    for (double v : {0.5, 1.2, 2.0, 2.9}) {
        const int m = 100000;
        double s = 0, s2 = 0;
        for (int i = 0; i < m; ++i) {
            const double a = clinching_expost({v, d.sample(rng)}, B).alloc[0];
            s += a;
            s2 += a * a;
        }
        const double mean = s / m;
        const double se = std::sqrt((s2 / m - mean * mean) / m);
        EXPECT_NEAR(mean, r.interim_alloc(v), 3 * se + 1e-12) << v;
    }
}

TEST(ClinchK, Bound) {
    EXPECT_NEAR(clinch_k_allocation_bound(2, 1), 0.5, 1e-15);
    EXPECT_NEAR(clinch_k_allocation_bound(1000000, 1), std::exp(-1.0), 1e-5);
    EXPECT_NEAR(clinch_k_allocation_bound(7, 7), 1.0, 1e-14);
    // direct binomial sum
    const int n = 9;
    const double k0 = 2.5, p = k0 / n;
    double s = 0;
    for (int i = 0; i < 3; ++i) {
        s += std::tgamma(n) / (std::tgamma(i + 1) * std::tgamma(n - i)) * std::pow(p, i) *
             std::pow(1 - p, n - 1 - i);
    }
    EXPECT_NEAR(clinch_k_allocation_bound(n, k0), k0 / 3 * s, 1e-13);
    EXPECT_THROW(clinch_k_allocation_bound(3, 4), DomainError);
}

TEST(AllPay, ContinuousExamples) {
    const double h = 4.04;
    const Dist d = Dist::uniform(0, h);
    const auto r = allpay_rule(d, 2, 1);
    EXPECT_NEAR(r.threshold, 2, 1e-10);
    EXPECT_NEAR(r.interim_alloc(1.5), 1.5 / h, 1e-14);
    EXPECT_NEAR(r.interim_alloc(3), (h + 2) / (2 * h), 1e-10);
    EXPECT_NEAR(r.interim_pay(h), 1.0, 1e-9);
    EXPECT_NEAR(welfare2(r, h), w_allpay(h), 1e-9);
    const auto s = allpay_rule(d, 2, 10);
    EXPECT_NEAR(s.interim_alloc(3), 3 / h, 1e-14);
    const Dist u = Dist::uniform(0, 1);
    const auto t = allpay_rule(u, 2, 0.125);
    EXPECT_NEAR(t.threshold, 0.25, 1e-10);
    EXPECT_NEAR(t.interim_alloc(0.6), 0.625, 1e-10);
    ASSERT_TRUE(t.bid_fn.has_value());
    EXPECT_NEAR((*t.bid_fn)(1.0), 0.125, 1e-10);
}

TEST(AllPay, DiscreteExamples) {
    const int N = 100;
    const Dist d = Dist::discrete({N - 1e-6, double(N), 1e6}, {1.0 / (N + 1), (N - 1.0) / (N + 1), 1.0 / (N + 1)});
    const auto r = allpay_rule_discrete(d, N + 1, 1);
    const double delta = std::pow(1.0 / (N + 1), N + 1);
    EXPECT_NEAR(r.interim_alloc(N - 1e-6), delta, 1e-300);
    EXPECT_NEAR(r.interim_alloc(N), (1 - delta) / N, 1e-8);
    EXPECT_NEAR(r.interim_alloc(1e6), (1 - delta) / N, 1e-8);
    EXPECT_NEAR(r.interim_pay(1e6), 1, 1e-12);
    const auto one = allpay_rule(Dist::discrete({2}, {1}), 4, 1);
    EXPECT_NEAR(one.interim_alloc(2), 0.25, 1e-15);
    EXPECT_NEAR(one.interim_pay(2), 0, 1e-15);
    const auto two = allpay_rule(Dist::discrete({1, 2}, {0.5, 0.5}), 2, 10);
    EXPECT_NEAR(two.interim_alloc(1), 0.25, 1e-15);
    EXPECT_NEAR(two.interim_alloc(2), 0.75, 1e-15);
    const auto pi = payment_identity(two.interim_alloc);
    EXPECT_NEAR(pi(2), two.interim_pay(2), 1e-14);
}

TEST(MiddleIroned, Examples) {
    auto o = middle_ironed_expost(3, 5, MicParams{0, 2, 1});
    EXPECT_DOUBLE_EQ(o.alloc[0], 0.5);
    EXPECT_DOUBLE_EQ(o.alloc[1], 0.5);
    const MicParams p = MicParams::from_vlo(0.5, 1);
    EXPECT_DOUBLE_EQ(p.v_hi, 1.5);
    o = middle_ironed_expost(1.5, 0.2, p);
    EXPECT_DOUBLE_EQ(o.alloc[0], 1);
    EXPECT_DOUBLE_EQ(o.alloc[1], 0);
    EXPECT_DOUBLE_EQ(o.pay[0], 0.2);
    o = middle_ironed_expost(1.0, 1.2, p);
    EXPECT_DOUBLE_EQ(o.alloc[0], 0.5);
    EXPECT_DOUBLE_EQ(o.pay[0], 0.25);
    EXPECT_DOUBLE_EQ(o.pay[1], 0.25);
    EXPECT_THROW(MicParams::from_vlo(1.5, 1), DomainError);
    EXPECT_THROW(middle_ironed_expost(1, 2, MicParams{0.5, 1.0, 1}), DomainError);
}

TEST(MiddleIroned, DsicPaymentsAndMonotonicity) {
    const MicParams p = MicParams::from_vlo(0.6, 1);
    const double hbar = 5.5;
    for (int j = 0; j < 50; ++j) {
        const double v2 = hbar * (j + 0.37) / 50;
        auto x = [&](double t) { return middle_ironed_expost(t, v2, p).alloc[0]; };
        double prev = -1;
        for (int i = 0; i < 50; ++i) {
            const double v1 = hbar * (i + 0.61) / 50;
            const auto o = middle_ironed_expost(v1, v2, p);
            EXPECT_GE(o.alloc[0], prev - 1e-15);
            prev = o.alloc[0];
            // p = v x(v) - integral_0^v x, integrated piece by piece
            std::vector<double> cuts{0, p.v_lo, p.v_hi, v2, v1};
            std::sort(cuts.begin(), cuts.end());
            double integral = 0;
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                const double a = cuts[c], b = std::min(cuts[c + 1], v1);
                if (b > a) integral += quad(x, a, b);
            }
            EXPECT_NEAR(o.pay[0], v1 * o.alloc[0] - integral, 1e-9) << v1 << " " << v2;
            EXPECT_LE(o.pay[0], p.budget + 1e-9);
            EXPECT_LE(o.alloc[0] + o.alloc[1], 1 + 1e-12);
        }
    }
}

TEST(RevenueOptimal, SlackBudgetIsMyerson) {
    const Dist u = Dist::uniform(0, 1);
    const auto r = revenue_optimal_rule(u, 2, 10);
    EXPECT_NEAR(r.reserve, 0.5, 1e-6);
    EXPECT_DOUBLE_EQ(r.threshold, 1.0);
    EXPECT_NEAR(2 * integral_dF(r.interim_pay, u, 0, 1), 5.0 / 12, 1e-9);
    EXPECT_THROW(revenue_optimal_rule(Dist::piecewise({0, 0.5, 1}, {0.5, 1.5}), 2, 1),
                 UnsupportedError);
}

TEST(RevenueOptimal, MatchesGridSearchOracle) {
    // uniform[0,1], n = 2: z(v) = v, phi(v) = 2v - 1
    const Dist u = Dist::uniform(0, 1);
    for (double B : {0.2, 0.1, 0.3}) {
        const auto r = revenue_optimal_rule(u, 2, B);
        const double rev = 2 * integral_dF(r.interim_pay, u, 0, 1);
        double best = 0;
        for (int i = 0; i <= 400; ++i) {
            const double res = i / 400.0;
            for (int j = i; j <= 400; ++j) {
                const double vi = j / 400.0;
                const double zbar = (1 + vi) / 2;
                if (vi * zbar - (vi * vi - res * res) / 2 > B) break;
                // 2 [ integral_r^vi (2v-1) v dv + zbar integral_vi^1 (2v-1) dv ]
                const double a = 2 * (vi * vi * vi - res * res * res) / 3 - (vi * vi - res * res) / 2;
                const double b = zbar * (vi * vi - vi);
                best = std::max(best, 2 * (a - b));
            }
        }
        EXPECT_GE(rev, best - 1e-9) << B;
        EXPECT_NEAR(rev, best, 2e-3) << B;
        EXPECT_LE(r.interim_pay(1.0), B + 1e-9);
        if (B < 0.25) EXPECT_NEAR(r.interim_pay(1.0), B, 1e-8);
        EXPECT_TRUE(interim_feasible(r.interim_alloc, hbw_constraint(u, 2), u));
    }
}

TEST(ClinchingLotteries, OneLotteryIsClinching) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 4);
    for (int t = 0; t < 200; ++t) {
        const std::vector<double> v{u(rng), u(rng), u(rng), u(rng)};
        const ExPostOutcome a = clinching_lotteries_expost(v, 0.8, 1);
        const ExPostOutcome b = clinching_expost(v, 0.8);
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(a.alloc[i], b.alloc[i], 1e-12);
            EXPECT_NEAR(a.pay[i], b.pay[i], 1e-12);
        }
    }
}

TEST(ClinchingLotteries, SlackBudgetSellsToTopK) {
    const ExPostOutcome o = clinching_lotteries_expost({5, 1, 4, 3}, 10.0, 2);
    EXPECT_NEAR(o.alloc[0], 0.5, 1e-12);
    EXPECT_NEAR(o.alloc[2], 0.5, 1e-12);
    EXPECT_NEAR(o.alloc[1], 0.0, 1e-12);
    EXPECT_NEAR(o.alloc[3], 0.0, 1e-12);
    EXPECT_NEAR(o.pay[0], 1.5, 1e-12);
    EXPECT_NEAR(o.pay[2], 1.5, 1e-12);
    // Fewer agents than lotteries: everyone gets 1/k for free.
    const ExPostOutcome f = clinching_lotteries_expost({2, 3}, 1.0, 3);
    EXPECT_NEAR(f.alloc[0], 1.0 / 3, 1e-12);
    EXPECT_NEAR(f.alloc[1], 1.0 / 3, 1e-12);
    EXPECT_NEAR(f.pay[0] + f.pay[1], 0.0, 1e-12);
}

TEST(ClinchingLotteries, MatchesGridOracle) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 3);
    for (int t = 0; t < 30; ++t) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const int k = 2 + static_cast<int>(rng() % 2);
        std::vector<double> v(n);
        for (double& x : v) x = u(rng);
        const ExPostOutcome o = clinching_lotteries_expost(v, 0.5, k);
        const auto g = grid_clinching(v, 0.5, 2e-4, 1.0 / k);
        double tot = 0;
        for (int i = 0; i < n; ++i) {
            EXPECT_NEAR(o.alloc[i], g[i], 3e-3) << "k=" << k << " i=" << i;
            EXPECT_LE(o.alloc[i], 1.0 / k + 1e-12);
            EXPECT_LE(o.pay[i], 0.5 + 1e-12);
            tot += o.alloc[i];
        }
        EXPECT_LE(tot, 1.0 + 1e-12);
    }
}

TEST(ClinchingLotteries, ClinchingWelfareDominates) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 3);
    for (int t = 0; t < 500; ++t) {
        const int n = 2 + static_cast<int>(rng() % 6);
        std::vector<double> v(n);
        for (double& x : v) x = u(rng);
        const double B = 0.1 + u(rng) / 2;
        const ExPostOutcome c = clinching_expost(v, B);
        double wc = 0;
        for (int i = 0; i < n; ++i) wc += v[i] * c.alloc[i];
        for (int k = 1; k <= n; ++k) {
            const ExPostOutcome l = clinching_lotteries_expost(v, B, k);
            double wl = 0;
            for (int i = 0; i < n; ++i) wl += v[i] * l.alloc[i];
            EXPECT_GE(wc, wl - 1e-9) << "k=" << k << " B=" << B;
        }
    }
}
