#pragma once

#include "bal/common.hpp"

#include <json.hpp>

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bal {

enum class DistKind { Continuous, Discrete };

// Value distribution on [0, hbar]. Continuous distributions have a
// piecewise-constant density on breaks[0]=0 < ... < breaks[m]=hbar;
// discrete ones carry explicit masses on ascending support values.
class Dist {
public:
    static Dist uniform(double lo, double hi);
    static Dist piecewise(std::vector<double> breaks, std::vector<double> densities);
    static Dist discrete(std::vector<double> values, std::vector<double> masses);

    static Dist from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    DistKind kind() const { return kind_; }
    bool continuous() const { return kind_ == DistKind::Continuous; }
    double hbar() const;
    double lowest() const; // lowest point of the support

    // Continuous accessors.
    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<double>& densities() const { return dens_; }
    int pieces() const { return static_cast<int>(dens_.size()); }
    double cdf_at_break(int i) const { return cum_[i]; }
    // Piece containing v; a breakpoint belongs to the piece on its right
    // except hbar, which belongs to the last piece.
    int piece_of(double v) const;
    double pdf(double v) const;

    // Discrete accessors.
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& masses() const { return masses_; }
    int atoms() const { return static_cast<int>(values_.size()); }
    double cdf_before_atom(int j) const { return cum_[j]; } // F(<v_j)
    double cdf_at_atom(int j) const { return cum_[j + 1]; } // F(v_j)

    double cdf(double v) const;
    double cdf_below(double v) const; // P(V < v)
    // v(q) = F^{-1}(1 - q), the value at quantile q counted from the top.
    double quantile_value(double q) const;
    double virtual_value(double v) const;
    double mean() const;
    // E[V; a < V <= b] as an integral of v dF.
    double partial_mean(double a, double b) const;

    double sample(std::mt19937_64& rng) const;
    // Inverse-CDF transform of a uniform draw u in [0,1).
    double from_uniform(double u) const;

private:
    DistKind kind_ = DistKind::Continuous;
    std::vector<double> breaks_;
    std::vector<double> dens_;
    std::vector<double> values_;
    std::vector<double> masses_;
    std::vector<double> cum_; // continuous: F at breaks; discrete: F(<v_j), then 1
};

struct RegularityReport {
    bool welfare_regular = false;
    bool revenue_regular = false;
    std::optional<double> witness;
};

RegularityReport check_regularity(const Dist& d);

// Parses either a path to a JSON file or an inline JSON document.
Dist load_dist(const std::string& file_or_json);

} // namespace bal
