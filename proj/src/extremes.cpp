#include "fdkl/extremes.hpp"

#include "fdkl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fdkl {

std::vector<double> sup_abs(const PathEnsemble& ensemble, std::size_t component) {
    if (component >= ensemble.n_components()) throw ArgumentError("component index out of range");
    const auto& x = ensemble.component(component);
    std::vector<double> out(ensemble.n_samples());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = x.col(static_cast<Eigen::Index>(s)).cwiseAbs().maxCoeff();
    return out;
}

std::vector<double> sup_vector_norm(const PathEnsemble& ensemble, const std::vector<std::size_t>& components) {
    if (components.empty()) throw ArgumentError("sup_vector_norm needs at least one component");
    std::vector<double> out(ensemble.n_samples(), 0.0);
    for (std::size_t c : components) {
        const auto part = sup_abs(ensemble, c);
        for (std::size_t s = 0; s < out.size(); ++s) out[s] = std::max(out[s], part[s]);
    }
    return out;
}

ExceedanceCurve exceedance(const std::vector<double>& values, const std::vector<double>& thresholds, std::string label, std::size_t d) {
    if (values.empty()) throw ArgumentError("exceedance needs at least one value");
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw ArgumentError("thresholds must be ascending");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    ExceedanceCurve curve;
    curve.thresholds = thresholds;
    curve.n_samples = sorted.size();
    curve.label = std::move(label);
    curve.d = d;
    for (double x : thresholds) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
        const double p = static_cast<double>(above) / n;
        curve.probabilities.push_back(p);
        curve.std_errors.push_back(std::sqrt(p * (1.0 - p) / n));
    }
    return curve;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ArgumentError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double f = pos - static_cast<double>(lo);
    return (1.0 - f) * values[lo] + f * values[hi];
}

double median(const std::vector<double>& values) { return quantile(values, 0.5); }

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw ArgumentError("correlation needs two equal-length samples of size >= 2");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> default_thresholds(const std::vector<double>& values, std::size_t count) {
    if (values.empty()) throw ArgumentError("thresholds need at least one value");
    if (count < 2) throw ArgumentError("threshold count must be at least 2");
    const double lo = quantile(values, 0.1);
    const double hi = *std::max_element(values.begin(), values.end());
    std::vector<double> out(count);
    if (!(hi > lo)) {
        std::fill(out.begin(), out.end(), lo);
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = lo > 0.0 ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
    }
    out.back() = hi;
    return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ArgumentError("KS distance needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return best;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw ArgumentError("KS statistic needs a nonempty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double best = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        best = std::max({best, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return best;
}

double ks_pvalue(double statistic, double n) {
    // Kolmogorov limit with the Stephens small-sample correction
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

std::vector<double> default_epsilons(const std::vector<double>& target_sup) {
    const double s = sample_std(target_sup);
    return {0.05 * s, 0.1 * s, 0.25 * s, 0.5 * s};
}

std::vector<ConvergenceRow> convergence_report(const std::vector<double>& target_sup, const std::vector<ConvergenceInput>& levels,
                                               const std::vector<double>& epsilons) {
    std::vector<ConvergenceRow> rows;
    for (const auto& level : levels) {
        if (level.fd_sup.size() != target_sup.size() || level.discrepancy.size() != target_sup.size())
            throw ArgumentError("convergence inputs must be paired with the target samples");
        ConvergenceRow row;
        row.d = level.d;
        row.median_discrepancy = median(level.discrepancy);
        row.ks = ks_distance(target_sup, level.fd_sup);
        row.epsilons = epsilons;
        for (double eps : epsilons) {
            const auto count = std::count_if(level.discrepancy.begin(), level.discrepancy.end(), [&](double v) { return v > eps; });
            row.exceed_probability.push_back(static_cast<double>(count) / static_cast<double>(target_sup.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace fdkl
