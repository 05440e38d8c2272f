#include "bal/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace bal {

namespace {

double safe_pow(double base, double e) {
    if (e == 0) return 1.0;
    if (base < 0 && base > -1e-12) base = 0; // rounding below a zero of the base
    return std::pow(base, e);
}

// Collect like terms and drop zeros.
std::vector<Term> normalize(std::vector<Term> t) {
    for (auto& x : t) {
        if (x.beta == 0) { // constant base
            x.c *= safe_pow(x.alpha, x.e);
            x.alpha = 0;
            x.beta = 1;
            x.e = 0;
        }
    }
    auto key = [](const Term& x) { return std::tie(x.alpha, x.beta, x.e, x.log_pow); };
    std::sort(t.begin(), t.end(), [&](const Term& a, const Term& b) { return key(a) < key(b); });
    std::vector<Term> out;
    for (const auto& x : t) {
        if (!out.empty() && key(out.back()) == key(x)) {
            out.back().c += x.c;
        } else {
            out.push_back(x);
        }
    }
    std::erase_if(out, [](const Term& x) { return x.c == 0; });
    return out;
}

void antiderivative_into(const Term& t, std::vector<Term>& out) {
    if (t.c == 0) return;
    if (t.is_monomial()) {
        if (t.e == -1) {
            out.push_back(Term::monomial(t.c / (t.log_pow + 1), 0, t.log_pow + 1));
            return;
        }
        const double k = t.e + 1;
        out.push_back(Term::monomial(t.c / k, k, t.log_pow));
        if (t.log_pow > 0) {
            antiderivative_into(Term::monomial(-t.c * t.log_pow / k, t.e, t.log_pow - 1), out);
        }
        return;
    }
    if (t.beta == 0) {
        out.push_back(Term::monomial(t.c * safe_pow(t.alpha, t.e), 1));
        return;
    }
    if (t.e == -1) throw UnsupportedError("antiderivative of (alpha + beta v)^-1");
    out.push_back(Term::affine_power(t.c / (t.beta * (t.e + 1)), t.alpha, t.beta, t.e + 1));
}

std::vector<Term> antiderivative_terms(const std::vector<Term>& terms) {
    std::vector<Term> out;
    for (const auto& t : terms) antiderivative_into(t, out);
    return normalize(std::move(out));
}

std::vector<Term> times_v_terms(const std::vector<Term>& terms) {
    std::vector<Term> out;
    for (const auto& t : terms) {
        if (t.is_monomial()) {
            out.push_back(Term::monomial(t.c, t.e + 1, t.log_pow));
        } else if (t.beta == 0) {
            out.push_back(Term::monomial(t.c * safe_pow(t.alpha, t.e), 1));
        } else {
            // v (a + b v)^e = ((a + b v)^(e+1) - a (a + b v)^e) / b
            out.push_back(Term::affine_power(t.c / t.beta, t.alpha, t.beta, t.e + 1));
            out.push_back(Term::affine_power(-t.c * t.alpha / t.beta, t.alpha, t.beta, t.e));
        }
    }
    return normalize(std::move(out));
}

double sum_terms(const std::vector<Term>& terms, double v) {
    double s = 0;
    for (const auto& t : terms) s += t(v);
    return s;
}

Piece tabulated_piece(const std::function<double(double)>& f, double lo, double hi, int nodes) {
    Piece p;
    p.lo = lo;
    p.hi = hi;
    nodes = std::max(nodes, 2);
    p.grid.resize(nodes);
    for (int k = 0; k < nodes; ++k) {
        const double v = k + 1 == nodes ? hi : lo + (hi - lo) * k / (nodes - 1);
        p.grid[k] = f(v);
    }
    return p;
}

} // namespace

double Term::operator()(double v) const {
    if (c == 0) return 0.0;
    double r = c * safe_pow(alpha + beta * v, e);
    if (log_pow != 0) r *= std::pow(std::log(v), log_pow);
    return r;
}

double Piece::operator()(double v) const {
    if (!tabulated()) return sum_terms(terms, v);
    const int n = static_cast<int>(grid.size());
    if (hi <= lo) return grid.front();
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0) * (n - 1);
    const int k = std::min(static_cast<int>(t), n - 2);
    const double w = t - k;
    return grid[k] * (1 - w) + grid[k + 1] * w;
}

double Piece::integral(double a, double b) const {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (b <= a) return 0.0;
    if (!tabulated()) {
        double s = 0;
        for (const auto& t : antiderivative_terms(terms)) s += t(b) - t(a);
        return s;
    }
    // exact integral of the linear interpolant
    const int n = static_cast<int>(grid.size());
    const double h = (hi - lo) / (n - 1);
    double s = 0;
    const int k0 = std::clamp(static_cast<int>((a - lo) / h), 0, n - 2);
    for (int k = k0; k < n - 1; ++k) {
        const double x0 = lo + k * h;
        const double x1 = k + 2 == n ? hi : lo + (k + 1) * h;
        const double u = std::max(a, x0);
        const double w = std::min(b, x1);
        if (w > u) s += (w - u) * ((*this)(u) + (*this)(w)) / 2;
        if (x1 >= b) break;
    }
    return s;
}

PiecewiseFn::PiecewiseFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw DomainError("PiecewiseFn: no pieces");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (pieces_[i].hi < pieces_[i].lo) throw DomainError("PiecewiseFn: piece with hi < lo");
        if (i > 0 && std::abs(pieces_[i].lo - pieces_[i - 1].hi) >
                         1e-12 * std::max(1.0, std::abs(pieces_[i].lo))) {
            throw DomainError("PiecewiseFn: pieces are not contiguous");
        }
        if (i > 0) pieces_[i].lo = pieces_[i - 1].hi;
        if (!pieces_[i].tabulated()) pieces_[i].terms = normalize(std::move(pieces_[i].terms));
    }
}

PiecewiseFn PiecewiseFn::constant(double c, double lo, double hi) {
    return PiecewiseFn({Piece{lo, hi, {Term::constant(c)}, {}}});
}

PiecewiseFn PiecewiseFn::tabulate(const std::function<double(double)>& f, double lo, double hi,
                                  int nodes) {
    return PiecewiseFn({tabulated_piece(f, lo, hi, nodes)});
}

PiecewiseFn PiecewiseFn::steps(double lo, const std::vector<double>& points,
                               const std::vector<double>& values) {
    if (points.empty() || points.size() != values.size()) {
        throw DomainError("PiecewiseFn::steps: need one value per point");
    }
    std::vector<Piece> ps;
    double prev = lo;
    for (std::size_t j = 0; j < points.size(); ++j) {
        ps.push_back(Piece{prev, points[j], {Term::constant(values[j])}, {}});
        prev = points[j];
    }
    return PiecewiseFn(std::move(ps));
}

std::vector<double> PiecewiseFn::breakpoints() const {
    std::vector<double> b;
    for (const auto& p : pieces_) b.push_back(p.lo);
    b.push_back(hi());
    return b;
}

int PiecewiseFn::find(double v) const {
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), v,
                               [](const Piece& p, double x) { return p.hi < x; });
    if (it == pieces_.end()) return static_cast<int>(pieces_.size()) - 1;
    return static_cast<int>(it - pieces_.begin());
}

double PiecewiseFn::operator()(double v) const { return pieces_[find(v)](v); }

double PiecewiseFn::right_limit(double v) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), v,
                               [](double x, const Piece& p) { return x < p.lo; });
    int i = static_cast<int>(it - pieces_.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(pieces_.size()) - 1);
    while (i + 1 < static_cast<int>(pieces_.size()) && pieces_[i].hi <= v) ++i;
    return pieces_[i](v);
}

double PiecewiseFn::integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    double s = 0;
    for (const auto& p : pieces_) {
        if (p.hi <= a) continue;
        if (p.lo >= b) break;
        s += p.integral(a, b);
    }
    return s;
}

PiecewiseFn PiecewiseFn::antiderivative() const {
    std::vector<Piece> out;
    double acc = 0;
    for (const auto& p : pieces_) {
        Piece q;
        q.lo = p.lo;
        q.hi = p.hi;
        if (p.tabulated()) {
            const int n = static_cast<int>(p.grid.size());
            q.grid.resize(n);
            q.grid[0] = acc;
            const double h = (p.hi - p.lo) / (n - 1);
            for (int k = 1; k < n; ++k) q.grid[k] = q.grid[k - 1] + h * (p.grid[k - 1] + p.grid[k]) / 2;
        } else {
            q.terms = antiderivative_terms(p.terms);
            const double at_lo = p.hi > p.lo ? sum_terms(q.terms, p.lo) : 0.0;
            q.terms.push_back(Term::constant(acc - at_lo));
            if (p.hi <= p.lo) q.terms = {Term::constant(acc)};
        }
        acc += p.integral(p.lo, p.hi);
        out.push_back(std::move(q));
    }
    return PiecewiseFn(std::move(out));
}

PiecewiseFn PiecewiseFn::times_v() const {
    std::vector<Piece> out;
    for (const auto& p : pieces_) {
        Piece q{p.lo, p.hi, {}, {}};
        if (p.tabulated()) {
            const int n = static_cast<int>(p.grid.size());
            q.grid.resize(n);
            for (int k = 0; k < n; ++k) {
                const double v = k + 1 == n ? p.hi : p.lo + (p.hi - p.lo) * k / (n - 1);
                q.grid[k] = v * p.grid[k];
            }
        } else {
            q.terms = times_v_terms(p.terms);
        }
        out.push_back(std::move(q));
    }
    return PiecewiseFn(std::move(out));
}

PiecewiseFn PiecewiseFn::scaled(double k) const {
    auto out = pieces_;
    for (auto& p : out) {
        for (auto& t : p.terms) t.c *= k;
        for (auto& g : p.grid) g *= k;
    }
    return PiecewiseFn(std::move(out));
}

PiecewiseFn PiecewiseFn::operator+(const PiecewiseFn& o) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(hi()));
    if (std::abs(lo() - o.lo()) > tol || std::abs(hi() - o.hi()) > tol) {
        throw DomainError("PiecewiseFn::+: domains differ");
    }
    std::vector<double> cuts = breakpoints();
    for (double b : o.breakpoints()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double a, double b) { return std::abs(a - b) <= tol; }),
               cuts.end());
    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double mid = (a + b) / 2;
        const Piece& p = pieces_[find(mid)];
        const Piece& q = o.pieces_[o.find(mid)];
        if (!p.tabulated() && !q.tabulated()) {
            std::vector<Term> t = p.terms;
            t.insert(t.end(), q.terms.begin(), q.terms.end());
            out.push_back(Piece{a, b, std::move(t), {}});
        } else {
            const int nodes =
                static_cast<int>(std::max({p.grid.size(), q.grid.size(), std::size_t{65}}));
            out.push_back(tabulated_piece([&](double v) { return p(v) + q(v); }, a, b, nodes));
        }
    }
    return PiecewiseFn(std::move(out));
}

PiecewiseFn PiecewiseFn::restricted(double a, double b) const {
    std::vector<Piece> out;
    for (const auto& p : pieces_) {
        const double l = std::max(p.lo, a);
        const double h = std::min(p.hi, b);
        if (h > l || (p.hi == p.lo && p.lo >= a && p.lo <= b)) {
            Piece q = p;
            if (q.tabulated() && (l > p.lo || h < p.hi)) {
                q = tabulated_piece([&](double v) { return p(v); }, l, h,
                                    static_cast<int>(p.grid.size()));
            }
            q.lo = l;
            q.hi = h;
            out.push_back(std::move(q));
        }
    }
    return PiecewiseFn(std::move(out));
}

PiecewiseFn PiecewiseFn::spliced(double a, double b, const PiecewiseFn& g) const {
    std::vector<Piece> out;
    if (a > lo()) {
        auto left = restricted(lo(), a).pieces_;
        out.insert(out.end(), left.begin(), left.end());
    }
    auto mid = g.restricted(a, b).pieces_;
    out.insert(out.end(), mid.begin(), mid.end());
    if (b < hi()) {
        auto right = restricted(b, hi()).pieces_;
        out.insert(out.end(), right.begin(), right.end());
    }
    return PiecewiseFn(std::move(out));
}

nlohmann::json PiecewiseFn::to_json() const {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& p : pieces_) {
        nlohmann::json jp;
        if (p.tabulated()) {
            jp = {{"form", "grid"}, {"params", p.grid}};
        } else if (p.terms.empty()) {
            jp = {{"form", "constant"}, {"params", {0.0}}};
        } else if (p.terms.size() == 1 && p.terms[0].is_monomial() && p.terms[0].e == 0 &&
                   p.terms[0].log_pow == 0) {
            jp = {{"form", "constant"}, {"params", {p.terms[0].c}}};
        } else {
            nlohmann::json ts = nlohmann::json::array();
            for (const auto& t : p.terms) ts.push_back({t.c, t.alpha, t.beta, t.e, t.log_pow});
            jp = {{"form", "terms"}, {"params", ts}};
        }
        pieces.push_back(std::move(jp));
    }
    return {{"breaks", breakpoints()}, {"pieces", pieces}};
}

} // namespace bal
