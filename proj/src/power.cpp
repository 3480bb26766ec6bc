#include "ambc/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ambc/errors.hpp"

namespace ambc {

PowerAllocation waterfill(const std::vector<double>& g, double total_power) {
    if (!(total_power > 0.0) || !std::isfinite(total_power))
        throw DomainError("waterfill: total power must be positive and finite");
    for (double gj : g)
        if (!(gj >= 0.0) || !std::isfinite(gj))
            throw DomainError("waterfill: eigenvalues must be finite and >= 0");

    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
    if (order.empty() || g[order.front()] <= 0.0)
        throw DomainError("waterfill: spectrum has no usable eigenmode");

    // Largest prefix k whose common level exceeds 1/g of its weakest member.
    double inv_sum = 0.0;
    double level = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double gk = g[order[k]];
        if (gk <= 0.0) break;
        const double candidate = (total_power + inv_sum + 1.0 / gk) / static_cast<double>(k + 1);
        if (candidate <= 1.0 / gk) break;
        inv_sum += 1.0 / gk;
        level = candidate;
        active = k + 1;
    }

    PowerAllocation out;
    out.p.assign(g.size(), 0.0);
    out.water_level = level;
    out.total_power = total_power;
    for (std::size_t k = 0; k < active; ++k) {
        const std::size_t j = order[k];
        out.p[j] = std::max(level - 1.0 / g[j], 0.0);
    }
    return out;
}

PowerAllocation waterfill(const EigenSpectrum& spectrum, double total_power) {
    return waterfill(spectrum.g, total_power);
}

std::vector<double> mode_snr(const std::vector<double>& g, const PowerAllocation& alloc) {
    if (g.size() != alloc.p.size()) throw DomainError("mode_snr: length mismatch");
    std::vector<double> x(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) x[j] = g[j] * alloc.p[j];
    return x;
}

}  // namespace ambc
