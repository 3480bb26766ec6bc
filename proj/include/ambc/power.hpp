#pragma once

#include <vector>

#include "ambc/channel.hpp"

namespace ambc {

struct PowerAllocation {
    std::vector<double> p;
    double water_level = 0.0;
    double total_power = 0.0;

    std::size_t modes() const { return p.size(); }
};

/// p_j = max(lambda - 1/g_j, 0) with sum p_j = P. The water level comes from
/// the sorted-prefix closed form. All-zero spectra throw DomainError.
PowerAllocation waterfill(const EigenSpectrum& spectrum, double total_power);
PowerAllocation waterfill(const std::vector<double>& g, double total_power);

/// Products g_j p_j, the per-mode SNRs.
std::vector<double> mode_snr(const std::vector<double>& g, const PowerAllocation& alloc);

}  // namespace ambc
