#pragma once

#include <string>

namespace fdkl {

/// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double u);

/// Quantile of Beta(p, q) at lower-tail probability u, or at upper-tail
/// probability u when `upper` is set. Safeguarded Newton on the regularized
/// incomplete beta, falling back to bisection; |dx| < 1e-12.
double beta_quantile(double p, double q, double u, bool upper = false);

enum class MarginalFamily { StandardNormal, Gumbel, ScaledBeta };

std::string to_string(MarginalFamily family);
MarginalFamily marginal_family_from_string(const std::string& name);

/// Continuous, strictly increasing target marginal of a translation process.
class Marginal {
public:
    static Marginal standard_normal();
    /// F(x) = exp(-exp(-(x - location)/scale))
    static Marginal gumbel(double location, double scale);
    /// lower + (upper - lower) * Beta(p, q)
    static Marginal scaled_beta(double p, double q, double lower, double upper);

    MarginalFamily family() const { return family_; }
    double param(std::size_t i) const { return params_[i]; }

    double cdf(double x) const;
    double quantile(double u) const;
    double mean() const;

    /// F^{-1}(Phi(g)), evaluated through the upper tail for g > 0 so that large
    /// arguments keep full precision.
    double from_gaussian(double g) const;

private:
    Marginal(MarginalFamily family, double a, double b, double c, double d);
    MarginalFamily family_;
    double params_[4];
};

} // namespace fdkl
