#pragma once

#include "bal/common.hpp"

#include <json.hpp>

#include <functional>
#include <vector>

namespace bal {

// c * (alpha + beta v)^e * (ln v)^log_pow. Log factors only appear with the
// plain monomial base (alpha = 0, beta = 1).
struct Term {
    double c = 0;
    double alpha = 0;
    double beta = 1;
    double e = 0;
    int log_pow = 0;

    static Term monomial(double c, double e, int log_pow = 0) { return {c, 0, 1, e, log_pow}; }
    static Term affine_power(double c, double alpha, double beta, double e) {
        return {c, alpha, beta, e, 0};
    }
    static Term constant(double c) { return monomial(c, 0); }

    bool is_monomial() const { return alpha == 0 && beta == 1; }
    double operator()(double v) const;
};

// One piece on [lo, hi]. When `grid` is nonempty the piece is tabulated on
// grid.size() equally spaced nodes and interpolated linearly; otherwise it
// is the sum of `terms`.
struct Piece {
    double lo = 0;
    double hi = 0;
    std::vector<Term> terms;
    std::vector<double> grid;

    bool tabulated() const { return !grid.empty(); }
    double operator()(double v) const;
    // Integral over [a, b] within the piece.
    double integral(double a, double b) const;
};

// Function on [lo, hi] made of contiguous pieces. Evaluation is
// left-continuous: a breakpoint takes the value of the piece ending there.
class PiecewiseFn {
public:
    PiecewiseFn() = default;
    explicit PiecewiseFn(std::vector<Piece> pieces);

    static PiecewiseFn constant(double c, double lo, double hi);
    static PiecewiseFn tabulate(const std::function<double(double)>& f, double lo, double hi,
                                int nodes);
    // Constant value values[j] on (points[j-1], points[j]], the first piece
    // starting at lo.
    static PiecewiseFn steps(double lo, const std::vector<double>& points,
                             const std::vector<double>& values);

    bool empty() const { return pieces_.empty(); }
    double lo() const { return pieces_.front().lo; }
    double hi() const { return pieces_.back().hi; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    std::vector<double> breakpoints() const;

    double operator()(double v) const;
    double right_limit(double v) const;
    double integral(double a, double b) const;

    // P(v) = integral of this function from lo() to v.
    PiecewiseFn antiderivative() const;
    PiecewiseFn times_v() const;
    PiecewiseFn scaled(double k) const;
    PiecewiseFn operator+(const PiecewiseFn& o) const;
    PiecewiseFn operator-(const PiecewiseFn& o) const { return *this + o.scaled(-1.0); }
    // Replace the function on [a, b] by `g` (which must cover [a, b]).
    PiecewiseFn spliced(double a, double b, const PiecewiseFn& g) const;
    PiecewiseFn restricted(double a, double b) const;

    nlohmann::json to_json() const;

private:
    std::vector<Piece> pieces_;
    int find(double v) const;
};

} // namespace bal
