#include "bal/dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bal {

namespace {

constexpr double kMassTol = 1e-9;

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

double edge_tol(double hbar) { return 1e-12 * std::max(1.0, hbar); }

} // namespace

Dist Dist::uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0 && hi > lo,
            "uniform: need 0 <= lo < hi");
    if (lo == 0) return piecewise({0.0, hi}, {1.0 / hi});
    return piecewise({0.0, lo, hi}, {0.0, 1.0 / (hi - lo)});
}

Dist Dist::piecewise(std::vector<double> breaks, std::vector<double> densities) {
    require(breaks.size() >= 2 && densities.size() + 1 == breaks.size(),
            "piecewise: need m+1 breaks for m densities");
    require(breaks.front() == 0.0, "piecewise: first break must be 0");
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        require(std::isfinite(breaks[i + 1]) && breaks[i + 1] > breaks[i],
                "piecewise: breaks must be strictly increasing");
    }
    double total = 0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
        require(std::isfinite(densities[i]) && densities[i] >= 0,
                "piecewise: densities must be nonnegative");
        total += densities[i] * (breaks[i + 1] - breaks[i]);
    }
    require(std::abs(total - 1.0) <= kMassTol, "piecewise: density must integrate to 1");
    for (double& f : densities) f /= total;
    while (densities.size() > 1 && densities.back() == 0.0) {
        densities.pop_back();
        breaks.pop_back();
    }
    Dist d;
    d.kind_ = DistKind::Continuous;
    d.breaks_ = std::move(breaks);
    d.dens_ = std::move(densities);
    d.cum_.assign(d.breaks_.size(), 0.0);
    for (std::size_t i = 0; i < d.dens_.size(); ++i) {
        d.cum_[i + 1] = d.cum_[i] + d.dens_[i] * (d.breaks_[i + 1] - d.breaks_[i]);
    }
    d.cum_.back() = 1.0;
    return d;
}

Dist Dist::discrete(std::vector<double> values, std::vector<double> masses) {
    require(!values.empty() && values.size() == masses.size(),
            "discrete: values and masses must have equal nonzero length");
    double total = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        require(std::isfinite(values[j]) && values[j] >= 0, "discrete: values must be >= 0");
        if (j > 0) require(values[j] > values[j - 1], "discrete: values must be strictly increasing");
        require(std::isfinite(masses[j]) && masses[j] >= 0, "discrete: masses must be nonnegative");
        total += masses[j];
    }
    require(std::abs(total - 1.0) <= kMassTol, "discrete: masses must sum to 1");
    require(values.back() > 0, "discrete: highest value must be positive");
    for (double& m : masses) m /= total;
    Dist d;
    d.kind_ = DistKind::Discrete;
    d.values_ = std::move(values);
    d.masses_ = std::move(masses);
    d.cum_.assign(d.values_.size() + 1, 0.0);
    for (std::size_t j = 0; j < d.masses_.size(); ++j) d.cum_[j + 1] = d.cum_[j] + d.masses_[j];
    d.cum_.back() = 1.0;
    return d;
}

double Dist::hbar() const { return continuous() ? breaks_.back() : values_.back(); }

double Dist::lowest() const {
    if (!continuous()) return values_.front();
    for (int i = 0; i < pieces(); ++i) {
        if (dens_[i] > 0) return breaks_[i];
    }
    return 0.0;
}

int Dist::piece_of(double v) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), v);
    int i = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(i, 0, pieces() - 1);
}

double Dist::pdf(double v) const {
    if (!continuous()) throw UnsupportedError("pdf: discrete distribution");
    return dens_[piece_of(v)];
}

double Dist::cdf(double v) const {
    const double tol = edge_tol(hbar());
    if (!(v >= -tol && v <= hbar() + tol)) throw DomainError("cdf: value outside [0, hbar]");
    if (continuous()) {
        if (v <= 0) return 0.0;
        if (v >= hbar()) return 1.0;
        const int i = piece_of(v);
        return std::min(1.0, cum_[i] + dens_[i] * (v - breaks_[i]));
    }
    auto it = std::upper_bound(values_.begin(), values_.end(), v);
    return cum_[it - values_.begin()];
}

double Dist::cdf_below(double v) const {
    if (continuous()) return cdf(v);
    const double tol = edge_tol(hbar());
    if (!(v >= -tol && v <= hbar() + tol)) throw DomainError("cdf: value outside [0, hbar]");
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    return cum_[it - values_.begin()];
}

double Dist::from_uniform(double u) const {
    if (continuous()) {
        if (u <= 0) return lowest();
        if (u >= 1) return hbar();
        auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        int i = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, pieces() - 1);
        while (dens_[i] == 0 && i + 1 < pieces()) ++i;
        return std::min(breaks_[i + 1], breaks_[i] + (u - cum_[i]) / dens_[i]);
    }
    auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), u);
    int j = static_cast<int>(it - cum_.begin()) - 1;
    return values_[std::clamp(j, 0, atoms() - 1)];
}

double Dist::quantile_value(double q) const {
    if (!(q >= 0 && q <= 1)) throw DomainError("quantile_value: q outside [0,1]");
    const double p = 1.0 - q;
    if (q == 0) return hbar();
    if (continuous()) {
        if (p <= 0) return lowest();
        // smallest v with F(v) >= p
        auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
        int i = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, pieces() - 1);
        while (dens_[i] == 0 && i + 1 < pieces()) ++i;
        return std::clamp(breaks_[i] + (p - cum_[i]) / dens_[i], breaks_[i], breaks_[i + 1]);
    }
    for (int j = 0; j < atoms(); ++j) {
        if (cum_[j + 1] >= p - 1e-15) return values_[j];
    }
    return hbar();
}

double Dist::virtual_value(double v) const {
    if (!continuous()) throw UnsupportedError("virtual_value: discrete distribution");
    const double f = pdf(v);
    if (f <= 0) throw SingularityError("virtual_value: zero density at v");
    return v - (1.0 - cdf(v)) / f;
}

double Dist::mean() const { return partial_mean(-1.0, hbar()); }

double Dist::partial_mean(double a, double b) const {
    double s = 0;
    if (continuous()) {
        for (int i = 0; i < pieces(); ++i) {
            const double lo = std::max(a, breaks_[i]);
            const double hi = std::min(b, breaks_[i + 1]);
            if (hi > lo) s += dens_[i] * (hi * hi - lo * lo) / 2;
        }
        return s;
    }
    for (int j = 0; j < atoms(); ++j) {
        if (values_[j] > a && values_[j] <= b) s += masses_[j] * values_[j];
    }
    return s;
}

double Dist::sample(std::mt19937_64& rng) const {
    // 53 random bits mapped to [0,1); identical across standard libraries
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return from_uniform(u);
}

nlohmann::json Dist::to_json() const {
    if (continuous()) return {{"kind", "piecewise"}, {"breaks", breaks_}, {"densities", dens_}};
    return {{"kind", "discrete"}, {"values", values_}, {"masses", masses_}};
}

Dist Dist::from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& m) { throw ConfigError("dist: " + m); };
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) fail("missing \"kind\"");
    const std::string kind = j["kind"];
    auto check_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : j.items()) {
            bool ok = k == "kind";
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) fail("unknown key \"" + k + "\"");
        }
        for (const char* a : allowed) {
            if (!j.contains(a)) fail(std::string("missing \"") + a + "\"");
        }
    };
    try {
        if (kind == "uniform") {
            check_keys({"lo", "hi"});
            return uniform(j["lo"].get<double>(), j["hi"].get<double>());
        }
        if (kind == "piecewise") {
            check_keys({"breaks", "densities"});
            return piecewise(j["breaks"].get<std::vector<double>>(),
                             j["densities"].get<std::vector<double>>());
        }
        if (kind == "discrete") {
            check_keys({"values", "masses"});
            return discrete(j["values"].get<std::vector<double>>(),
                            j["masses"].get<std::vector<double>>());
        }
    } catch (const nlohmann::json::exception& e) {
        fail(e.what());
    } catch (const DomainError& e) {
        fail(e.what());
    }
    fail("unknown kind \"" + kind + "\"");
    return {};
}

Dist load_dist(const std::string& file_or_json) {
    std::string text = file_or_json;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ConfigError("dist: empty specification");
    if (text[first] != '{') {
        std::ifstream in(file_or_json);
        if (!in) throw ConfigError("dist: cannot open " + file_or_json);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("dist: ") + e.what());
    }
    return Dist::from_json(j);
}

RegularityReport check_regularity(const Dist& d) {
    if (!d.continuous()) throw UnsupportedError("check_regularity: discrete distribution");
    RegularityReport rep;
    const auto& f = d.densities();
    const auto& b = d.breaks();
    rep.welfare_regular = true;
    for (int i = 1; i < d.pieces(); ++i) {
        if (f[i] > f[i - 1] * (1 + 1e-12)) {
            rep.welfare_regular = false;
            rep.witness = b[i];
            break;
        }
    }
    // virtual value on a grid inside every positive-density piece plus the
    // one-sided limits at each interior break
    bool phi_monotone = true;
    std::optional<double> phi_witness;
    double prev = -std::numeric_limits<double>::infinity();
    const int per_piece = 200;
    for (int i = 0; i < d.pieces() && phi_monotone; ++i) {
        if (f[i] <= 0) continue;
        for (int k = 0; k <= per_piece; ++k) {
            const double v = b[i] + (b[i + 1] - b[i]) * k / per_piece;
            const double phi = v - (1.0 - d.cdf(v)) / f[i];
            if (phi < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
                phi_monotone = false;
                phi_witness = v;
                break;
            }
            prev = phi;
        }
    }
    rep.revenue_regular = rep.welfare_regular && phi_monotone;
    if (rep.welfare_regular && !phi_monotone) rep.witness = phi_witness;
    return rep;
}

} // namespace bal
