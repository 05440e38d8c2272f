#include "bal/mechanisms.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace bal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

nlohmann::json ExPostOutcome::to_json() const { return {{"alloc", alloc}, {"pay", pay}}; }

nlohmann::json MechanismRule::to_json() const {
    nlohmann::json j = {{"label", label},
                        {"reserve", reserve},
                        {"interim_alloc", interim_alloc.to_json()},
                        {"interim_pay", interim_pay.to_json()}};
    j["threshold"] = std::isnan(threshold) ? nlohmann::json(nullptr) : nlohmann::json(threshold);
    if (bid_fn) j["bid_fn"] = bid_fn->to_json();
    return j;
}

MicParams MicParams::from_vlo(double v_lo, double budget) {
    MicParams p{v_lo, 2 * budget - v_lo, budget};
    p.validate();
    return p;
}

void MicParams::validate() const {
    if (!(budget > 0)) throw DomainError("MicParams: budget must be positive");
    if (!(v_lo >= 0 && v_lo <= budget)) throw DomainError("MicParams: need 0 <= v' <= B");
    if (std::abs(v_hi - (2 * budget - v_lo)) > 1e-12 * std::max(1.0, budget)) {
        throw DomainError("MicParams: need v'' = 2B - v'");
    }
}

ClinchingClock::ClinchingClock(std::vector<double> vals, double budget, double supply,
                               double agent_cap)
    : vals_(std::move(vals)), supply_(supply), budget_(budget), room_(agent_cap) {
    if (!(agent_cap > 0)) throw DomainError("clinching: agent cap must be positive");
    if (vals_.empty()) throw DomainError("clinching: no agents");
    for (double v : vals_) {
        if (!(std::isfinite(v) && v >= 0)) throw DomainError("clinching: values must be >= 0");
    }
    if (!(budget >= 0) || !(supply >= 0)) throw DomainError("clinching: negative budget or supply");
    order_.resize(vals_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return vals_[a] < vals_[b]; });
    alloc_.assign(vals_.size(), 0.0);
    pay_.assign(vals_.size(), 0.0);
}

std::vector<int> ClinchingClock::active() const {
    return {order_.begin() + first_, order_.end()};
}

void ClinchingClock::grant(int i, double amount, double p) {
    alloc_[i] += amount;
    pay_[i] += amount * p;
}

void ClinchingClock::resume(double price, int first_active, double supply, double budget) {
    price_ = price;
    first_ = first_active;
    supply_ = supply;
    budget_ = budget;
    clinching_ = false;
    done_ = false;
}

// Demand of each active agent at the current price.
double ClinchingClock::demand() const {
    const double afford = price_ > 0 ? budget_ / price_ : kInf;
    return std::min(room_, afford);
}

// Every active agent clinches what the others cannot demand at the current
// price, capped by its own demand.
void ClinchingClock::clinch_jump() {
    const int k = static_cast<int>(order_.size()) - first_;
    if (k < 2) return;
    if (budget_ <= 0 || room_ <= 0) {
        done_ = true;
        return;
    }
    const double d = demand();
    const double others = (k - 1) * d;
    const double excess = supply_ - others;
    if (excess < 0) return;
    clinching_ = true;
    if (excess == 0) return;
    const double per = std::min(excess, d);
    for (int t = first_; t < static_cast<int>(order_.size()); ++t) grant(order_[t], per, price_);
    supply_ = std::max(0.0, supply_ - k * per);
    budget_ = std::max(0.0, budget_ - price_ * per);
    room_ = std::max(0.0, room_ - per);
    if (supply_ <= 1e-15 || budget_ <= 1e-15 || room_ <= 1e-15) done_ = true;
}

// Clinching keeps supply = (k-1) b / p, so b(p) = b0 (p0/p)^(k-1). While the
// room cap is the tighter demand limit nothing is clinched.
void ClinchingClock::continuous_to(double p1) {
    const int k = static_cast<int>(order_.size()) - first_;
    if (budget_ > room_ * price_) {
        const double pb = budget_ / room_;
        if (pb >= p1) {
            price_ = p1;
            return;
        }
        price_ = pb;
    }
    const double r = price_ / p1;
    const double b1 = budget_ * std::pow(r, k - 1);
    const double dq = (k - 1.0) / k * (budget_ / price_) * (1 - std::pow(r, k));
    for (int t = first_; t < static_cast<int>(order_.size()); ++t) {
        alloc_[order_[t]] += dq;
        pay_[order_[t]] += budget_ - b1;
    }
    room_ = std::max(0.0, room_ - dq);
    budget_ = b1;
    price_ = p1;
    supply_ = (k - 1) * b1 / p1;
}

void ClinchingClock::drop_lowest() {
    ++first_;
    clinch_jump();
}

void ClinchingClock::run(double cap) {
    const int n = static_cast<int>(order_.size());
    while (!done_) {
        const int k = n - first_;
        if (k == 0 || supply_ <= 1e-15) {
            done_ = true;
            break;
        }
        if (k == 1) {
            const int i = order_[first_];
            const double amt = std::min(supply_, demand());
            grant(i, amt, price_);
            supply_ -= amt;
            budget_ -= amt * price_;
            done_ = true;
            break;
        }
        const double pd = vals_[order_[first_]];
        if (!clinching_) {
            if (budget_ <= 0) {
                done_ = true;
                break;
            }
            // Clinching starts once the others' demand falls to the supply.
            const double pc = (k - 1) * room_ <= supply_ ? price_ : (k - 1) * budget_ / supply_;
            if (pc <= price_) {
                clinch_jump();
                continue;
            }
            if (pc < pd && pc < cap) {
                price_ = pc;
                clinching_ = true;
                continue;
            }
            if (cap <= pd) {
                price_ = std::max(price_, cap);
                break;
            }
            price_ = std::max(price_, pd);
            drop_lowest();
            continue;
        }
        const double target = std::min(pd, cap);
        if (target > price_) continuous_to(target);
        if (cap <= pd) break;
        drop_lowest();
    }
}

ExPostOutcome symmetrize_ties(const std::vector<double>& vals, ExPostOutcome out) {
    std::map<double, std::vector<int>> groups;
    for (int i = 0; i < static_cast<int>(vals.size()); ++i) groups[vals[i]].push_back(i);
    for (const auto& [v, idx] : groups) {
        if (idx.size() < 2) continue;
        double a = 0, p = 0;
        for (int i : idx) {
            a += out.alloc[i];
            p += out.pay[i];
        }
        for (int i : idx) {
            out.alloc[i] = a / idx.size();
            out.pay[i] = p / idx.size();
        }
    }
    return out;
}

ExPostOutcome clinching_lotteries_expost(const std::vector<double>& vals, double B, int k) {
    if (vals.size() < 2) throw DomainError("clinching_lotteries_expost: need at least two agents");
    if (!(B > 0)) throw DomainError("clinching_lotteries_expost: budget must be positive");
    if (k < 1) throw DomainError("clinching_lotteries_expost: need k >= 1");
    ClinchingClock clock(vals, B, 1.0, 1.0 / k);
    clock.run();
    return symmetrize_ties(vals, clock.outcome());
}

ExPostOutcome clinching_expost(const std::vector<double>& vals, double B) {
    if (vals.size() < 2) throw DomainError("clinching_expost: need at least two agents");
    if (!(B > 0)) throw DomainError("clinching_expost: budget must be positive");
    ClinchingClock clock(vals, B);
    clock.run();
    return symmetrize_ties(vals, clock.outcome());
}

MechanismRule allpay_rule(const Dist& d, int n, double B) {
    if (!d.continuous()) return allpay_rule_discrete(d, n, B);
    MechanismRule r;
    r.label = "all-pay";
    const PiecewiseFn z = hbw_constraint(d, n);
    r.threshold = allpay_iron_threshold(z, d, B);
    r.interim_alloc = r.threshold < d.hbar() ? iron(z, d, r.threshold, d.hbar()) : z;
    r.interim_pay = payment_identity(r.interim_alloc);
    r.bid_fn = r.interim_pay;
    return r;
}

MechanismRule allpay_rule_discrete(const Dist& d, int n, double B) {
    const DiscreteTopIron top = discrete_top_iron(d, n, B);
    MechanismRule r;
    r.label = "all-pay";
    r.threshold = top.boundary >= 0 ? d.values()[top.boundary] : d.hbar();
    r.interim_alloc = atom_fn(d, top.x);
    r.interim_pay = atom_fn(d, top.p);
    r.bid_fn = r.interim_pay;
    return r;
}

// x(v) = F(v) for v <= B; above B the winner's and loser's closed forms
// integrated against the opponent's value.
MechanismRule clinching_interim_2agent(const Dist& d, double B) {
    if (!d.continuous()) throw UnsupportedError("clinching_interim_2agent: discrete distribution");
    if (!(B > 0)) throw DomainError("clinching_interim_2agent: budget must be positive");
    std::vector<Piece> ps;
    const auto& br = d.breaks();
    const double hbar = d.hbar();
    const double b2 = B * B;
    double acc = B < hbar ? d.cdf(B) : 1.0; // F(B) + integral_B^lo (1/2 + B^2/(2t^2)) dF
    for (int i = 0; i < d.pieces(); ++i) {
        const double f = d.densities()[i];
        const double base = d.cdf_at_break(i) - f * br[i];
        double lo = br[i];
        const double hi = br[i + 1];
        if (lo < B) {
            const double top = std::min(hi, B);
            ps.push_back(Piece{lo, top, {Term::affine_power(1.0, base, f, 1)}, {}});
            lo = top;
        }
        if (hi <= lo) continue;
        // acc + f [(v - lo)/2 - (b2/2)(1/v - 1/lo)] + (1 - base - f v)(1/2 - (b2/2) v^-2);
        // the v and 1/v terms cancel
        const double A = 1 - base;
        std::vector<Term> t{Term::constant(acc - f * lo / 2 + f * b2 / (2 * lo) + A / 2),
                            Term::monomial(-A * b2 / 2, -2)};
        ps.push_back(Piece{lo, hi, std::move(t), {}});
        acc += f * ((hi - lo) / 2 - b2 / 2 * (1 / hi - 1 / lo));
    }
    MechanismRule r;
    r.label = "clinching";
    r.interim_alloc = PiecewiseFn(std::move(ps));
    r.interim_pay = payment_identity(r.interim_alloc);
    return r;
}

double clinch_k_allocation_bound(int n, double k0) {
    if (n < 1 || !(k0 >= 1 && k0 <= n)) throw DomainError("clinch_k_allocation_bound: need 1 <= k0 <= n");
    const double k = std::ceil(k0 - 1e-12);
    const double q = std::min(1.0, k0 / n);
    if (n == 1) return k0 / k;
    const boost::math::binomial_distribution<double> bin(n - 1, q);
    return k0 / k * boost::math::cdf(bin, k - 1);
}

ExPostOutcome middle_ironed_expost(double v1, double v2, const MicParams& p) {
    p.validate();
    enum Region { L, M, H };
    auto region = [&](double v) { return v < p.v_lo ? L : v < p.v_hi ? M : H; };
    // Outcome when agent a is ranked above agent b.
    auto ordered = [&](double a, double b) {
        ExPostOutcome o{{0, 0}, {0, 0}};
        const Region rb = region(b);
        if (rb == L) {
            o.alloc = {1, 0};
            o.pay = {b, 0};
        } else if (rb == M && region(a) == M) {
            o.alloc = {0.5, 0.5};
            o.pay = {p.v_lo / 2, p.v_lo / 2};
        } else if (rb == M) {
            o.alloc = {1, 0};
            o.pay = {p.budget, 0};
        } else {
            const double c = p.v_lo * p.v_hi;
            o.alloc = {0.5 + c / (2 * b * b), 0.5 - c / (2 * b * b)};
            o.pay = {p.budget, p.budget - c / b};
        }
        return o;
    };
    if (v1 > v2) return ordered(v1, v2);
    if (v2 > v1) {
        auto o = ordered(v2, v1);
        return {{o.alloc[1], o.alloc[0]}, {o.pay[1], o.pay[0]}};
    }
    auto o = ordered(v1, v2);
    const double a = (o.alloc[0] + o.alloc[1]) / 2;
    const double q = (o.pay[0] + o.pay[1]) / 2;
    return {{a, a}, {q, q}};
}

MechanismRule iron_reserve_rule(const PiecewiseFn& z, const Dist& d, double r, double v_iron) {
    const double hbar = d.hbar();
    PiecewiseFn x = z;
    if (v_iron < hbar) {
        const double zbar = mass(d, v_iron, hbar) > 1e-14 ? f_average(z, d, v_iron, hbar) : z(hbar);
        x = x.spliced(v_iron, hbar, PiecewiseFn::constant(zbar, v_iron, hbar));
    }
    if (r > 0) x = x.spliced(0, r, PiecewiseFn::constant(0, 0, r));
    MechanismRule rule;
    rule.label = "iron+reserve";
    rule.reserve = r;
    rule.threshold = v_iron;
    rule.interim_alloc = x;
    rule.interim_pay = payment_identity(x);
    return rule;
}

MechanismRule revenue_optimal_rule(const Dist& d, int n, double B) {
    if (!d.continuous() || !check_regularity(d).revenue_regular) {
        throw UnsupportedError("revenue_optimal_rule: distribution is not revenue-regular");
    }
    if (!(B > 0)) throw DomainError("revenue_optimal_rule: budget must be positive");
    const double hbar = d.hbar();
    const PiecewiseFn z = hbw_constraint(d, n);
    const PiecewiseFn Z = z.antiderivative();
    auto zbar = [&](double v) {
        return mass(d, v, hbar) > 1e-14 ? f_average(z, d, v, hbar) : z(hbar);
    };
    // top payment v zbar(v) - integral_r^v z
    auto p_top = [&](double r, double v) { return v * zbar(v) - (Z(v) - Z(r)); };
    auto iron_point = [&](double r) {
        if (p_top(r, hbar) <= B) return hbar;
        double lo = r, hi = hbar;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hbar); ++it) {
            const double mid = (lo + hi) / 2;
            (p_top(r, mid) <= B ? lo : hi) = mid;
        }
        return lo;
    };
    auto revenue = [&](double r) {
        const MechanismRule rule = iron_reserve_rule(z, d, r, iron_point(r));
        return n * integral_dF(rule.interim_pay, d, 0, hbar);
    };
    // reserves are feasible while full ironing above r stays within budget
    double r_max = hbar;
    if (p_top(hbar, hbar) > B) {
        double lo = 0, hi = hbar;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hbar); ++it) {
            const double mid = (lo + hi) / 2;
            (mid * zbar(mid) <= B ? lo : hi) = mid;
        }
        r_max = lo;
    }
    const int grid = 200;
    int best = 0;
    double best_rev = -kInf;
    for (int k = 0; k <= grid; ++k) {
        const double rev = revenue(r_max * k / grid);
        if (rev > best_rev) {
            best_rev = rev;
            best = k;
        }
    }
    double a = r_max * std::max(0, best - 1) / grid;
    double b = r_max * std::min(grid, best + 1) / grid;
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double c = b - phi * (b - a), e = a + phi * (b - a);
    double fc = revenue(c), fe = revenue(e);
    for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, hbar); ++it) {
        if (fc >= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - phi * (b - a);
            fc = revenue(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + phi * (b - a);
            fe = revenue(e);
        }
    }
    double r = (a + b) / 2;
    if (revenue(r) < best_rev) r = r_max * best / grid;
    MechanismRule rule = iron_reserve_rule(z, d, r, iron_point(r));
    rule.label = "revenue-optimal";
    return rule;
}

} // namespace bal
