#include "bal/lp.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <type_traits>
#include <unordered_map>

namespace bal {

const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

const char* to_string(Rel r) {
    switch (r) {
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ge: return ">=";
    }
    return "?";
}

namespace {

// Comparison helpers so one simplex body serves double and mpq_class.
struct DoubleArith {
    double eps;
    bool pos(double v) const { return v > eps; }
    bool neg(double v) const { return v < -eps; }
    bool zero(double v) const { return std::abs(v) <= eps; }
    bool nonzero_entry(double v) const { return v != 0.0; }
    static double tidy(double v) { return std::abs(v) < 1e-13 ? 0.0 : v; }
    static double mag(double v) { return std::abs(v); }
};

struct ExactArith {
    bool pos(const mpq_class& v) const { return sgn(v) > 0; }
    bool neg(const mpq_class& v) const { return sgn(v) < 0; }
    bool zero(const mpq_class& v) const { return sgn(v) == 0; }
    bool nonzero_entry(const mpq_class& v) const { return sgn(v) != 0; }
    static const mpq_class& tidy(const mpq_class& v) { return v; }
    static mpq_class mag(const mpq_class& v) { return abs(v); }
};

template <class T, class A>
class Simplex {
public:
    Simplex(const BasicLp<T>& lp, const SolveOptions& opt, A arith)
        : lp_(lp), opt_(opt), ar_(arith) {}

    BasicLpSolution<T> run() {
        build();
        BasicLpSolution<T> sol;
        if (num_art_ > 0) {
            set_phase1_objective();
            auto st = iterate(true);
            if (st != LpStatus::Optimal || ar_.neg(z0_)) {
                sol.status = LpStatus::Infeasible;
                sol.iterations = iters_;
                return sol;
            }
            drive_out_artificials();
        }
        set_phase2_objective();
        if constexpr (std::is_same_v<T, double>) perturb();
        auto st = iterate(false);
        if constexpr (std::is_same_v<T, double>) {
            // Rebuild the final basis from the original data (this also drops
            // the perturbation) and clean up with dual or primal pivots until
            // the basis checks out.
            bool confirmed = false;
            for (int round = 0; st == LpStatus::Optimal && round < 8; ++round) {
                const auto chk = refactor();
                if ((confirmed = chk.primal_ok && chk.dual_ok)) break;
                if (chk.dual_ok) {
                    st = dual_iterate();
                } else {
                    for (auto& v : beta_) v = std::max(v, 0.0);
                    st = iterate(false);
                }
            }
            if (st == LpStatus::Optimal && !confirmed) {
                throw NumericalFailure("simplex basis not confirmed optimal after refactoring");
            }
        }
        sol.iterations = iters_;
        sol.status = st;
        if (st != LpStatus::Optimal) return sol;
        extract(sol);
        return sol;
    }

private:
    struct VarMap {
        int col = -1;
        int col_neg = -1; // free variables: x = x+ - x-
        T shift{};
        bool mirrored = false; // x = hi - x'
    };

    const BasicLp<T>& lp_;
    SolveOptions opt_;
    A ar_;

    std::vector<VarMap> vmap_;
    int ns_ = 0;   // structural columns
    int nsur_ = 0; // surplus columns
    int m_ = 0;
    int ncol_ = 0;
    std::vector<T> cost_;      // per structural column (max sense)
    std::vector<bool> flipped_;
    std::vector<bool> is_art_; // by variable id
    std::vector<T> a_;         // m x ncol, row major
    std::vector<T> beta_;
    std::vector<T> d_;
    T z0_{};
    std::vector<int> basis_;
    std::vector<int> nonbasic_;
    std::vector<int> col_of_; // var id -> nonbasic column or -1
    std::vector<int> row_of_; // var id -> basis row or -1
    int num_art_ = 0;
    long iters_ = 0;

    std::vector<T> a0_; // original tableau, kept for refactoring
    std::vector<T> b0_;

    T& at(int i, int j) { return a_[static_cast<std::size_t>(i) * ncol_ + j]; }

    // Column of the original system for variable id k (slack/artificial ids
    // are unit columns).
    void original_column(int k, std::vector<T>& col) const {
        col.assign(m_, T(0));
        if (k >= ncol_) {
            col[k - ncol_] = T(1);
            return;
        }
        for (int i = 0; i < m_; ++i) col[i] = a0_[static_cast<std::size_t>(i) * ncol_ + k];
    }

    struct BasisCheck {
        bool primal_ok = true;
        bool dual_ok = true;
    };

    // Recomputes the whole tableau, basic values and reduced costs from the
    // original data through a fresh inverse of the basis.
    BasisCheck refactor() {
        const std::size_t m = static_cast<std::size_t>(m_);
        std::vector<double> binv(m * m, 0.0);
        {
            std::vector<double> bm(m * m, 0.0);
            std::vector<T> col;
            for (int i = 0; i < m_; ++i) {
                original_column(basis_[i], col);
                for (int r = 0; r < m_; ++r) bm[r * m + i] = to_double(col[r]);
            }
            for (std::size_t i = 0; i < m; ++i) binv[i * m + i] = 1.0;
            // Gauss-Jordan with partial pivoting
            for (std::size_t c = 0; c < m; ++c) {
                std::size_t p = c;
                for (std::size_t r = c + 1; r < m; ++r) {
                    if (std::abs(bm[r * m + c]) > std::abs(bm[p * m + c])) p = r;
                }
                if (bm[p * m + c] == 0.0) throw NumericalFailure("singular basis on refactor");
                if (p != c) {
                    std::swap_ranges(bm.begin() + p * m, bm.begin() + (p + 1) * m,
                                     bm.begin() + c * m);
                    std::swap_ranges(binv.begin() + p * m, binv.begin() + (p + 1) * m,
                                     binv.begin() + c * m);
                }
                const double inv = 1.0 / bm[c * m + c];
                for (std::size_t j = 0; j < m; ++j) {
                    bm[c * m + j] *= inv;
                    binv[c * m + j] *= inv;
                }
                for (std::size_t r = 0; r < m; ++r) {
                    if (r == c) continue;
                    const double f = bm[r * m + c];
                    if (f == 0.0) continue;
                    double* br = &bm[r * m];
                    double* ir = &binv[r * m];
                    const double* bc = &bm[c * m];
                    const double* ic = &binv[c * m];
                    for (std::size_t j = c; j < m; ++j) br[j] -= f * bc[j];
                    for (std::size_t j = 0; j < m; ++j) ir[j] -= f * ic[j];
                }
            }
        }
        BasisCheck chk;
        std::vector<double> y(m, 0.0);
        z0_ = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double v = 0, w = 0;
            for (std::size_t r = 0; r < m; ++r) {
                v += binv[i * m + r] * to_double(b0_[r]);
                w += to_double(var_cost(basis_[r])) * binv[r * m + i];
            }
            if (v < -opt_.eps) chk.primal_ok = false;
            if (v < 0 && v >= -opt_.eps) v = 0;
            beta_[i] = v;
            y[i] = w;
            z0_ += to_double(var_cost(basis_[i])) * v;
        }
        std::vector<T> col;
        for (int j = 0; j < ncol_; ++j) {
            const int k = nonbasic_[j];
            original_column(k, col);
            double dj = to_double(var_cost(k));
            for (std::size_t i = 0; i < m; ++i) at(static_cast<int>(i), j) = 0;
            for (int r = 0; r < m_; ++r) {
                const double a = to_double(col[r]);
                if (a == 0) continue;
                dj -= y[r] * a;
                for (std::size_t i = 0; i < m; ++i) {
                    at(static_cast<int>(i), j) += binv[i * m + r] * a;
                }
            }
            for (std::size_t i = 0; i < m; ++i) {
                at(static_cast<int>(i), j) = A::tidy(at(static_cast<int>(i), j));
            }
            d_[j] = dj;
            if (!is_art_[k] && ar_.pos(dj)) chk.dual_ok = false;
        }
        return chk;
    }

    // Deterministic right-hand side shift against degenerate stalling.
    void perturb() {
        std::uint64_t state = 0x9e3779b97f4a7c15ULL;
        for (int i = 0; i < m_; ++i) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
            const double scale = std::max(1.0, std::abs(to_double(beta_[i])));
            beta_[i] += (1.0 + u) * 1e-7 * scale;
        }
    }

    // Dual simplex on a dual-feasible tableau with some negative basics.
    LpStatus dual_iterate() {
        const double piv_tol = 1e-9;
        long cap = opt_.max_iterations > 0 ? opt_.max_iterations : 50L * (m_ + ncol_) + 1000;
        for (;;) {
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (beta_[i] < -opt_.eps && (r < 0 || beta_[i] < beta_[r])) r = i;
            }
            if (r < 0) return LpStatus::Optimal;
            int s = -1;
            double best = 0;
            for (int j = 0; j < ncol_; ++j) {
                if (is_art_[nonbasic_[j]]) continue;
                const double arj = at(r, j);
                if (arj >= -piv_tol) continue;
                const double ratio = std::min(0.0, to_double(d_[j])) / arj;
                if (s < 0 || ratio < best || (ratio == best && arj < at(r, s))) {
                    s = j;
                    best = ratio;
                }
            }
            if (s < 0) throw NumericalFailure("dual simplex cleanup found no entering column");
            pivot(r, s);
            if (++iters_ > cap) throw NumericalFailure("dual simplex iteration cap exceeded");
        }
    }

    void build() {
        const int nv = lp_.num_vars();
        vmap_.resize(nv);
        struct SRow {
            std::vector<std::pair<int, T>> c;
            Rel rel;
            T rhs;
        };
        std::vector<SRow> srows;

        for (int j = 0; j < nv; ++j) {
            auto& vm = vmap_[j];
            const auto& l = lp_.lo[j];
            const auto& u = lp_.hi[j];
            if (l) {
                vm.col = ns_++;
                vm.shift = *l;
            } else if (u) {
                vm.col = ns_++;
                vm.shift = *u;
                vm.mirrored = true;
            } else {
                vm.col = ns_++;
                vm.col_neg = ns_++;
            }
        }
        cost_.assign(ns_, T(0));
        const T sgn_obj = lp_.sense == Sense::Max ? T(1) : T(-1);
        for (int j = 0; j < nv; ++j) {
            const auto& vm = vmap_[j];
            T c = sgn_obj * lp_.obj[j];
            cost_[vm.col] = vm.mirrored ? T(-c) : c;
            if (vm.col_neg >= 0) cost_[vm.col_neg] = -c;
        }
        for (const auto& row : lp_.rows) {
            SRow s{{}, row.rel, row.rhs};
            for (const auto& [j, v] : row.coeffs) {
                const auto& vm = vmap_[j];
                s.rhs -= v * vm.shift;
                s.c.emplace_back(vm.col, vm.mirrored ? T(-v) : v);
                if (vm.col_neg >= 0) s.c.emplace_back(vm.col_neg, T(-v));
            }
            srows.push_back(std::move(s));
        }
        for (int j = 0; j < nv; ++j) {
            const auto& vm = vmap_[j];
            if (lp_.lo[j] && lp_.hi[j]) {
                srows.push_back({{{vm.col, T(1)}}, Rel::Le, T(*lp_.hi[j] - *lp_.lo[j])});
            }
        }
        m_ = static_cast<int>(srows.size());
        flipped_.assign(m_, false);
        for (int i = 0; i < m_; ++i) {
            auto& s = srows[i];
            if (s.rhs < 0) {
                s.rhs = -s.rhs;
                for (auto& e : s.c) e.second = -e.second;
                if (s.rel == Rel::Le) s.rel = Rel::Ge;
                else if (s.rel == Rel::Ge) s.rel = Rel::Le;
                flipped_[i] = true;
            }
            if (s.rel == Rel::Ge) ++nsur_;
        }
        ncol_ = ns_ + nsur_;
        const int nvar = ncol_ + m_;
        is_art_.assign(nvar, false);
        a_.assign(static_cast<std::size_t>(m_) * ncol_, T(0));
        beta_.assign(m_, T(0));
        basis_.assign(m_, -1);
        nonbasic_.resize(ncol_);
        col_of_.assign(nvar, -1);
        row_of_.assign(nvar, -1);
        for (int j = 0; j < ncol_; ++j) {
            nonbasic_[j] = j;
            col_of_[j] = j;
        }
        int sur = ns_;
        for (int i = 0; i < m_; ++i) {
            auto& s = srows[i];
            for (const auto& [c, v] : s.c) at(i, c) += v;
            beta_[i] = s.rhs;
            const int rv = ncol_ + i;
            basis_[i] = rv;
            row_of_[rv] = i;
            if (s.rel == Rel::Ge) at(i, sur++) = T(-1);
            if (s.rel != Rel::Le) {
                is_art_[rv] = true;
                ++num_art_;
            }
        }
        a0_ = a_;
        b0_ = beta_;
    }

    void set_phase1_objective() {
        d_.assign(ncol_, T(0));
        z0_ = T(0);
        for (int i = 0; i < m_; ++i) {
            if (!is_art_[basis_[i]]) continue;
            z0_ -= beta_[i];
            for (int j = 0; j < ncol_; ++j) d_[j] += at(i, j);
        }
    }

    T var_cost(int id) const { return id < ns_ ? cost_[id] : T(0); }

    void set_phase2_objective() {
        d_.assign(ncol_, T(0));
        z0_ = T(0);
        for (int j = 0; j < ncol_; ++j) d_[j] = var_cost(nonbasic_[j]);
        for (int i = 0; i < m_; ++i) {
            T cb = var_cost(basis_[i]);
            if (ar_.zero(cb)) continue;
            z0_ += cb * beta_[i];
            for (int j = 0; j < ncol_; ++j) {
                if (ar_.nonzero_entry(at(i, j))) d_[j] -= cb * at(i, j);
            }
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (!is_art_[basis_[i]]) continue;
            int best = -1;
            for (int j = 0; j < ncol_; ++j) {
                if (is_art_[nonbasic_[j]]) continue;
                if (!ar_.zero(at(i, j))) {
                    if (best < 0 || A::mag(at(i, j)) > A::mag(at(i, best))) best = j;
                }
            }
            if (best >= 0) pivot(i, best);
        }
    }

    LpStatus iterate(bool phase1) {
        long cap = opt_.max_iterations > 0 ? opt_.max_iterations
                                           : 50L * (m_ + ncol_) + 1000;
        int degenerate_run = 0;
        bool bland = false;
        (void)phase1;
        for (;;) {
            int s = -1;
            for (int j = 0; j < ncol_; ++j) {
                if (is_art_[nonbasic_[j]] || !ar_.pos(d_[j])) continue;
                if (s < 0) {
                    s = j;
                } else if (bland) {
                    if (nonbasic_[j] < nonbasic_[s]) s = j;
                } else if (d_[j] > d_[s]) {
                    s = j;
                }
            }
            if (s < 0) return LpStatus::Optimal;

            int r = -1;
            T best_ratio{};
            if constexpr (std::is_same_v<T, double>) {
                r = harris_row(s, bland, best_ratio);
            } else {
                for (int i = 0; i < m_; ++i) {
                    const T& ais = at(i, s);
                    if (!ar_.pos(ais)) continue;
                    T ratio = beta_[i] / ais;
                    if (r < 0 || ratio < best_ratio ||
                        (ratio == best_ratio && bland && basis_[i] < basis_[r])) {
                        r = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (r < 0) return LpStatus::Unbounded;

            if (ar_.pos(best_ratio)) {
                degenerate_run = 0;
                bland = false;
            } else if (++degenerate_run > opt_.degenerate_limit) {
                bland = true;
            }
            pivot(r, s);
            if (++iters_ > cap) {
                throw NumericalFailure("simplex iteration cap exceeded (" +
                                       std::to_string(cap) + ")");
            }
        }
    }

    // Two-pass ratio test: bound the step using rows relaxed by the
    // feasibility tolerance, then take the largest pivot within that bound.
    int harris_row(int s, bool bland, T& ratio_out) {
        const double tol = opt_.eps;
        const double piv_tol = 1e-9;
        double bound = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m_; ++i) {
            const double ais = at(i, s);
            if (ais <= piv_tol) continue;
            bound = std::min(bound, (beta_[i] + tol) / ais);
        }
        if (!std::isfinite(bound)) return -1;
        int r = -1;
        for (int i = 0; i < m_; ++i) {
            const double ais = at(i, s);
            if (ais <= piv_tol) continue;
            if (beta_[i] / ais > bound) continue;
            if (r < 0) {
                r = i;
            } else if (bland) {
                if (basis_[i] < basis_[r]) r = i;
            } else if (ais > at(r, s)) {
                r = i;
            }
        }
        ratio_out = std::max(0.0, beta_[r] / at(r, s));
        return r;
    }

    void pivot(int r, int s) {
        const T p = at(r, s);
        T* rowr = &a_[static_cast<std::size_t>(r) * ncol_];
        for (int j = 0; j < ncol_; ++j) {
            if (j != s && ar_.nonzero_entry(rowr[j])) rowr[j] = A::tidy(T(rowr[j] / p));
        }
        rowr[s] = T(1) / p;
        beta_[r] = A::tidy(T(beta_[r] / p));
        if constexpr (std::is_same_v<T, double>) {
            if (beta_[r] < 0) beta_[r] = 0;
        }

        std::vector<int> nz;
        nz.reserve(ncol_);
        for (int j = 0; j < ncol_; ++j) {
            if (j != s && ar_.nonzero_entry(rowr[j])) nz.push_back(j);
        }
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            T* rowi = &a_[static_cast<std::size_t>(i) * ncol_];
            const T f = rowi[s];
            if (!ar_.nonzero_entry(f)) continue;
            for (int j : nz) rowi[j] = A::tidy(T(rowi[j] - f * rowr[j]));
            rowi[s] = A::tidy(T(-f * rowr[s]));
            beta_[i] = A::tidy(T(beta_[i] - f * beta_[r]));
            if constexpr (std::is_same_v<T, double>) {
                if (beta_[i] < 0 && beta_[i] > -1e-11) beta_[i] = 0;
            }
        }
        const T ds = d_[s];
        if (ar_.nonzero_entry(ds)) {
            for (int j : nz) d_[j] = A::tidy(T(d_[j] - ds * rowr[j]));
            d_[s] = A::tidy(T(-ds * rowr[s]));
            z0_ += ds * beta_[r];
        }
        const int entering = nonbasic_[s];
        const int leaving = basis_[r];
        basis_[r] = entering;
        nonbasic_[s] = leaving;
        row_of_[entering] = r;
        col_of_[entering] = -1;
        row_of_[leaving] = -1;
        col_of_[leaving] = s;
    }

    void extract(BasicLpSolution<T>& sol) {
        std::vector<T> col_val(ns_, T(0));
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < ns_) col_val[basis_[i]] = beta_[i];
        }
        const int nv = lp_.num_vars();
        sol.x.assign(nv, T(0));
        for (int j = 0; j < nv; ++j) {
            const auto& vm = vmap_[j];
            T v = col_val[vm.col];
            if (vm.col_neg >= 0) v -= col_val[vm.col_neg];
            sol.x[j] = vm.mirrored ? T(vm.shift - v) : T(vm.shift + v);
        }
        sol.objective = objective_value(lp_, sol.x);
        const T sgn_obj = lp_.sense == Sense::Max ? T(1) : T(-1);
        sol.row_duals.assign(lp_.num_rows(), T(0));
        for (int i = 0; i < lp_.num_rows(); ++i) {
            const int rv = ncol_ + i;
            if (col_of_[rv] < 0) continue;
            T y = -d_[col_of_[rv]];
            if (flipped_[i]) y = -y;
            sol.row_duals[i] = sgn_obj * y;
        }
    }
};

template <class T>
std::vector<RowViolation> check_rows(const BasicLp<T>& lp, const std::vector<T>& x,
                                     const T& tol) {
    if (static_cast<int>(x.size()) != lp.num_vars()) {
        throw DomainError("check_point: point has wrong dimension");
    }
    std::vector<RowViolation> out;
    for (const auto& row : lp.rows) {
        T act(0);
        for (const auto& [j, v] : row.coeffs) act += v * x[j];
        T slack(0);
        switch (row.rel) {
        case Rel::Le: slack = row.rhs - act; break;
        case Rel::Ge: slack = act - row.rhs; break;
        case Rel::Eq: {
            T d = act - row.rhs;
            slack = d < 0 ? d : T(-d);
            break;
        }
        }
        if (slack < -tol) {
            out.push_back({row.name, to_double(T(act)), to_double(T(row.rhs)),
                           to_double(T(slack))});
        }
    }
    for (int j = 0; j < lp.num_vars(); ++j) {
        if (lp.lo[j] && x[j] < *lp.lo[j] - tol) {
            out.push_back({"bound:" + lp.var_names[j], to_double(T(x[j])),
                           to_double(T(*lp.lo[j])),
                           to_double(T(x[j] - *lp.lo[j]))});
        }
        if (lp.hi[j] && x[j] > *lp.hi[j] + tol) {
            out.push_back({"bound:" + lp.var_names[j], to_double(T(x[j])),
                           to_double(T(*lp.hi[j])),
                           to_double(T(*lp.hi[j] - x[j]))});
        }
    }
    return out;
}

} // namespace

LpSolution solve(const Lp& lp, const SolveOptions& opt) {
    Simplex<double, DoubleArith> s(lp, opt, DoubleArith{opt.eps});
    return s.run();
}

ExactLpSolution solve(const ExactLp& lp, const SolveOptions& opt) {
    Simplex<mpq_class, ExactArith> s(lp, opt, ExactArith{});
    return s.run();
}

ExactLp to_exact(const Lp& lp) {
    ExactLp e;
    e.sense = lp.sense;
    for (int j = 0; j < lp.num_vars(); ++j) {
        std::optional<mpq_class> l, u;
        if (lp.lo[j]) l = mpq_class(*lp.lo[j]);
        if (lp.hi[j]) u = mpq_class(*lp.hi[j]);
        e.add_var(lp.var_names[j], mpq_class(lp.obj[j]), l, u);
    }
    for (const auto& r : lp.rows) {
        std::vector<std::pair<int, mpq_class>> c;
        c.reserve(r.coeffs.size());
        for (const auto& [j, v] : r.coeffs) c.emplace_back(j, mpq_class(v));
        e.add_row(r.name, std::move(c), r.rel, mpq_class(r.rhs));
    }
    return e;
}

std::vector<RowViolation> check_point(const Lp& lp, const std::vector<double>& x, double tol) {
    return check_rows(lp, x, tol);
}

std::vector<RowViolation> check_point(const ExactLp& lp, const std::vector<mpq_class>& x) {
    return check_rows(lp, x, mpq_class(0));
}

nlohmann::json to_json(const Lp& lp) {
    nlohmann::json j;
    j["sense"] = lp.sense == Sense::Max ? "max" : "min";
    auto vars = nlohmann::json::array();
    for (int v = 0; v < lp.num_vars(); ++v) {
        nlohmann::json e{{"name", lp.var_names[v]}, {"obj", lp.obj[v]}};
        e["lo"] = lp.lo[v] ? nlohmann::json(*lp.lo[v]) : nlohmann::json(nullptr);
        e["hi"] = lp.hi[v] ? nlohmann::json(*lp.hi[v]) : nlohmann::json(nullptr);
        vars.push_back(std::move(e));
    }
    j["vars"] = std::move(vars);
    auto rows = nlohmann::json::array();
    for (const auto& r : lp.rows) {
        nlohmann::json c = nlohmann::json::object();
        for (const auto& [v, a] : r.coeffs) c[lp.var_names[v]] = a;
        rows.push_back({{"name", r.name}, {"rel", to_string(r.rel)}, {"rhs", r.rhs},
                        {"coeffs", std::move(c)}});
    }
    j["rows"] = std::move(rows);
    return j;
}

Lp lp_from_json(const nlohmann::json& j) {
    Lp lp;
    try {
        const std::string sense = j.at("sense").get<std::string>();
        if (sense == "max") lp.sense = Sense::Max;
        else if (sense == "min") lp.sense = Sense::Min;
        else throw ConfigError("lp json: bad sense '" + sense + "'");
        std::unordered_map<std::string, int> index;
        for (const auto& v : j.at("vars")) {
            std::optional<double> lo, hi;
            if (!v.at("lo").is_null()) lo = v.at("lo").get<double>();
            if (!v.at("hi").is_null()) hi = v.at("hi").get<double>();
            const auto name = v.at("name").get<std::string>();
            index[name] = lp.add_var(name, v.at("obj").get<double>(), lo, hi);
        }
        for (const auto& r : j.at("rows")) {
            const auto rel = r.at("rel").get<std::string>();
            Rel rr = rel == "<=" ? Rel::Le : rel == ">=" ? Rel::Ge : Rel::Eq;
            if (rel != "<=" && rel != ">=" && rel != "=") {
                throw ConfigError("lp json: bad relation '" + rel + "'");
            }
            std::vector<std::pair<int, double>> c;
            for (const auto& [name, a] : r.at("coeffs").items()) {
                auto it = index.find(name);
                if (it == index.end()) throw ConfigError("lp json: unknown variable " + name);
                c.emplace_back(it->second, a.get<double>());
            }
            lp.add_row(r.at("name").get<std::string>(), std::move(c), rr,
                       r.at("rhs").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("lp json: ") + e.what());
    }
    return lp;
}

} // namespace bal

namespace bal {

namespace {

template <class T>
CertificateReport certify(const BasicLp<T>& lp, const std::vector<T>& x,
                          const std::vector<T>& y, const T& tol) {
    if (lp.sense != Sense::Max) throw UnsupportedError("check_certificate: max-sense LPs only");
    for (int j = 0; j < lp.num_vars(); ++j) {
        if (!lp.lo[j] || *lp.lo[j] != 0 || lp.hi[j]) {
            throw UnsupportedError("check_certificate: variables must have bounds [0, inf)");
        }
    }
    if (static_cast<int>(y.size()) != lp.num_rows()) {
        throw DomainError("check_certificate: dual vector has wrong dimension");
    }
    CertificateReport rep;
    rep.primal = check_rows(lp, x, tol);
    std::vector<T> aty(lp.num_vars(), T(0));
    std::vector<T> act(lp.num_rows(), T(0));
    T dual_obj(0);
    for (int i = 0; i < lp.num_rows(); ++i) {
        const auto& row = lp.rows[i];
        for (const auto& [j, a] : row.coeffs) {
            aty[j] += a * y[i];
            act[i] += a * x[j];
        }
        dual_obj += row.rhs * y[i];
        const bool sign_ok = row.rel == Rel::Le ? !(y[i] < -tol)
                           : row.rel == Rel::Ge ? !(y[i] > tol)
                                                : true;
        if (!sign_ok) rep.dual.push_back({"sign:" + row.name, to_double(T(y[i]))});
        T slack = row.rhs - act[i];
        if (row.rel == Rel::Ge) slack = -slack;
        const bool y_active = y[i] > tol || y[i] < -tol;
        const bool row_loose = slack > tol;
        if (y_active && row_loose) {
            rep.complementary.push_back({"row:" + row.name, to_double(slack)});
        }
        rep.worst_primal_slack = std::min(rep.worst_primal_slack, to_double(slack));
    }
    for (int j = 0; j < lp.num_vars(); ++j) {
        T red = aty[j] - lp.obj[j];
        rep.worst_dual_slack = std::min(rep.worst_dual_slack, to_double(red));
        if (red < -tol) rep.dual.push_back({"dual:" + lp.var_names[j], to_double(red)});
        if (x[j] > tol && red > tol) {
            rep.complementary.push_back({"var:" + lp.var_names[j], to_double(red)});
        }
    }
    T primal_obj = objective_value(lp, x);
    rep.primal_objective = to_double(primal_obj);
    rep.dual_objective = to_double(dual_obj);
    T gap = dual_obj - primal_obj;
    rep.objectives_equal = !(gap > tol) && !(gap < -tol);
    return rep;
}

} // namespace

CertificateReport check_certificate(const ExactLp& lp, const std::vector<mpq_class>& x,
                                    const std::vector<mpq_class>& y) {
    return certify(lp, x, y, mpq_class(0));
}

CertificateReport check_certificate(const Lp& lp, const std::vector<double>& x,
                                    const std::vector<double>& y, double tol) {
    return certify(lp, x, y, tol);
}

} // namespace bal
