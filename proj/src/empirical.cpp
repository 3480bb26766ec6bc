#include "ambc/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ambc/errors.hpp"

namespace ambc {

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {}

std::span<const double> EmpiricalSample::sorted() const {
    if (!sorted_valid_) {
        sorted_ = values_;
        std::sort(sorted_.begin(), sorted_.end());
        sorted_valid_ = true;
    }
    return sorted_;
}

double EmpiricalSample::mean() const {
    if (values_.empty()) throw DomainError("EmpiricalSample::mean: empty sample");
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

double EmpiricalSample::variance() const {
    if (values_.size() < 2) return 0.0;
    const double mu = mean();
    double acc = 0.0;
    for (double v : values_) acc += (v - mu) * (v - mu);
    return acc / static_cast<double>(values_.size() - 1);
}

double EmpiricalSample::min() const {
    if (values_.empty()) throw DomainError("EmpiricalSample::min: empty sample");
    return sorted().front();
}

double EmpiricalSample::max() const {
    if (values_.empty()) throw DomainError("EmpiricalSample::max: empty sample");
    return sorted().back();
}

double empirical_quantile(const EmpiricalSample& sample, double level) {
    if (sample.empty()) throw DomainError("empirical_quantile: empty sample");
    if (!(level > 0.0 && level < 1.0))
        throw DomainError("empirical_quantile: level must lie in (0, 1)");
    const auto xs = sample.sorted();
    // Fraction at or above gamma equals level <=> lower quantile at 1 - level.
    const double h = (static_cast<double>(xs.size()) - 1.0) * (1.0 - level);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double log_mean_exp(std::span<const double> log_values) {
    if (log_values.empty()) return -std::numeric_limits<double>::infinity();
    const double hi = *std::max_element(log_values.begin(), log_values.end());
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double v : log_values) acc += std::exp(v - hi);
    return hi + std::log(acc / static_cast<double>(log_values.size()));
}

}  // namespace ambc
