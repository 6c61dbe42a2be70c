#pragma once

#include "fdkl/ensemble.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fdkl {

/// Per sample: max over grid nodes of |X_c(t)|.
std::vector<double> sup_abs(const PathEnsemble& ensemble, std::size_t component);

/// Per sample: max over grid nodes and the listed components of |X_c(t)|.
std::vector<double> sup_vector_norm(const PathEnsemble& ensemble, const std::vector<std::size_t>& components);

/// Empirical P(sup > x) at ascending thresholds, with binomial standard errors.
struct ExceedanceCurve {
    std::vector<double> thresholds;
    std::vector<double> probabilities;
    std::vector<double> std_errors;
    std::size_t n_samples = 0;
    std::string label;
    std::size_t d = 0; ///< truncation level; 0 for target data
};

ExceedanceCurve exceedance(const std::vector<double>& values, const std::vector<double>& thresholds, std::string label = {},
                           std::size_t d = 0);

/// count log-spaced thresholds from the 10th percentile to the maximum
/// (linear spacing if the percentile is not positive).
std::vector<double> default_thresholds(const std::vector<double>& values, std::size_t count = 64);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);
double median(const std::vector<double>& values);
double sample_std(const std::vector<double>& values);
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// One-sample KS statistic against a continuous CDF.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value for statistic D with effective size n.
double ks_pvalue(double statistic, double n);

/// Paired target/FD statistics at one truncation level.
struct ConvergenceInput {
    std::size_t d = 0;
    std::vector<double> fd_sup;      ///< sup functional of the FD samples
    std::vector<double> discrepancy; ///< sup |X_d - X| per sample
};

struct ConvergenceRow {
    std::size_t d = 0;
    double median_discrepancy = 0.0;
    double ks = 0.0;
    std::vector<double> epsilons;
    std::vector<double> exceed_probability; ///< fraction of samples with discrepancy > epsilon
};

/// {0.05, 0.1, 0.25, 0.5} times the sample standard deviation of the target sup.
std::vector<double> default_epsilons(const std::vector<double>& target_sup);

std::vector<ConvergenceRow> convergence_report(const std::vector<double>& target_sup, const std::vector<ConvergenceInput>& levels,
                                               const std::vector<double>& epsilons);

} // namespace fdkl
