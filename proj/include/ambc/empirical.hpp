#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ambc {

/// Monte Carlo draws with an on-demand ascending sort.
class EmpiricalSample {
public:
    EmpiricalSample() = default;
    explicit EmpiricalSample(std::vector<double> values);

    std::size_t count() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    std::span<const double> values() const { return values_; }
    /// Ascending order statistics (sorts once, then cached).
    std::span<const double> sorted() const;

    double mean() const;
    /// Unbiased sample variance; zero for a single draw.
    double variance() const;
    double min() const;
    double max() const;

private:
    std::vector<double> values_;
    mutable std::vector<double> sorted_;
    mutable bool sorted_valid_ = false;
};

/// Threshold gamma with empirical P[X >= gamma] = level, linearly
/// interpolated between order statistics. Throws DomainError for an empty
/// sample or level outside (0, 1).
double empirical_quantile(const EmpiricalSample& sample, double level);

/// log(mean(exp(v))) evaluated with a max shift.
double log_mean_exp(std::span<const double> log_values);

}  // namespace ambc
