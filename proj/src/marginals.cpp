#include "fdkl/marginals.hpp"

#include "fdkl/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fdkl {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw ArgumentError("normal quantile needs u in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

double beta_quantile(double p, double q, double u, bool upper) {
    if (!(p > 0.0 && q > 0.0)) throw ArgumentError("beta shape parameters must be positive");
    if (!(u >= 0.0 && u <= 1.0)) throw ArgumentError("beta quantile needs a probability in [0, 1]");
    if (u == 0.0) return upper ? 1.0 : 0.0;
    if (u == 1.0) return upper ? 0.0 : 1.0;
    return upper ? boost::math::ibetac_inv(p, q, u) : boost::math::ibeta_inv(p, q, u);
}

std::string to_string(MarginalFamily family) {
    switch (family) {
    case MarginalFamily::StandardNormal: return "standard_normal";
    case MarginalFamily::Gumbel: return "gumbel";
    case MarginalFamily::ScaledBeta: return "scaled_beta";
    }
    return "unknown";
}

MarginalFamily marginal_family_from_string(const std::string& name) {
    if (name == "standard_normal") return MarginalFamily::StandardNormal;
    if (name == "gumbel") return MarginalFamily::Gumbel;
    if (name == "scaled_beta") return MarginalFamily::ScaledBeta;
    throw ArgumentError("unknown marginal family '" + name + "'");
}

Marginal::Marginal(MarginalFamily family, double a, double b, double c, double d) : family_(family), params_{a, b, c, d} {}

Marginal Marginal::standard_normal() { return Marginal(MarginalFamily::StandardNormal, 0, 1, 0, 0); }

Marginal Marginal::gumbel(double location, double scale) {
    if (!std::isfinite(location) || !(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("Gumbel needs finite location and scale > 0");
    return Marginal(MarginalFamily::Gumbel, location, scale, 0, 0);
}

Marginal Marginal::scaled_beta(double p, double q, double lower, double upper) {
    if (!(p > 0.0) || !(q > 0.0)) throw ArgumentError("Beta shape parameters must be positive");
    if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) throw ArgumentError("scaled Beta needs finite lower < upper");
    return Marginal(MarginalFamily::ScaledBeta, p, q, lower, upper);
}

double Marginal::cdf(double x) const {
    switch (family_) {
    case MarginalFamily::StandardNormal: return normal_cdf(x);
    case MarginalFamily::Gumbel: return std::exp(-std::exp(-(x - params_[0]) / params_[1]));
    case MarginalFamily::ScaledBeta: {
        const double y = (x - params_[2]) / (params_[3] - params_[2]);
        if (y <= 0.0) return 0.0;
        if (y >= 1.0) return 1.0;
        return boost::math::ibeta(params_[0], params_[1], y);
    }
    }
    return 0.0;
}

double Marginal::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw ArgumentError("quantile needs u in (0, 1)");
    switch (family_) {
    case MarginalFamily::StandardNormal: return normal_quantile(u);
    case MarginalFamily::Gumbel: return params_[0] - params_[1] * std::log(-std::log(u));
    case MarginalFamily::ScaledBeta: return params_[2] + (params_[3] - params_[2]) * beta_quantile(params_[0], params_[1], u);
    }
    return 0.0;
}

double Marginal::mean() const {
    switch (family_) {
    case MarginalFamily::StandardNormal: return 0.0;
    case MarginalFamily::Gumbel: return params_[0] + params_[1] * std::numbers::egamma;
    case MarginalFamily::ScaledBeta: return params_[2] + (params_[3] - params_[2]) * params_[0] / (params_[0] + params_[1]);
    }
    return 0.0;
}

double Marginal::from_gaussian(double g) const {
    if (!std::isfinite(g)) throw ArgumentError("translation map received a non-finite value");
    switch (family_) {
    case MarginalFamily::StandardNormal: return g;
    case MarginalFamily::Gumbel: {
        // -ln(u) with u = Phi(g), via the tail that is not rounded to 1
        const double minus_log_u = g <= 0.0 ? -std::log(normal_cdf(g)) : -std::log1p(-normal_cdf(-g));
        return params_[0] - params_[1] * std::log(minus_log_u);
    }
    case MarginalFamily::ScaledBeta: {
        const double y = g <= 0.0 ? beta_quantile(params_[0], params_[1], normal_cdf(g))
                                  : beta_quantile(params_[0], params_[1], normal_cdf(-g), true);
        return std::clamp(params_[2] + (params_[3] - params_[2]) * y, params_[2], params_[3]);
    }
    }
    return 0.0;
}

} // namespace fdkl
