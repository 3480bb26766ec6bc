#pragma once

#include <cstddef>

#include "ambc/channel.hpp"
#include "ambc/rng.hpp"

namespace ambc {

/// Scalar reductions of the composite pair used by the MRC tag detector.
struct TagErrorModel {
    ComplexMatrix h0;
    ComplexMatrix h1;
    double norm_h1 = 0.0;
    double cross_term = 0.0;  // rho = Re tr(H1^H H0) / ||H1||^2

    /// eps_d at eps = 0 and eps = 1.
    double floor() const;
    double ceiling() const;
};

/// Throws DomainError when H1 vanishes.
TagErrorModel make_tag_model(const ComplexMatrix& h0, const ComplexMatrix& h1);
TagErrorModel make_tag_model(const CompositePair& pair);

/// (1 - eps) Q(sqrt2 |H1|) + eps [Q(sqrt2 |H1| (2 rho - 1)) + Q(-sqrt2 |H1| (2 rho + 1))] / 2.
double tag_error_given_eps(const TagErrorModel& model, double eps);

/// Inverse of the affine map above. Residue within 1e-12 of [0, 1] is
/// clamped; targets outside the attainable interval throw
/// InfeasibleTargetError.
double eps_given_tag_error(const TagErrorModel& model, double eps_d);

/// Z = Re tr(H1^H Xe^H (Y - Xe H0)) / ||H1||^2.
double mrc_statistic(const ComplexMatrix& y, const ComplexMatrix& x_est, const ComplexMatrix& h0,
                     const ComplexMatrix& h1);

/// sign(Z), ties to +1.
TagSymbol mrc_decision(double z);

struct TagSimulation {
    double error_rate = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

/// Symbol-level trials with X = I (n = t, so X^H X = I), d equiprobable,
/// unit-variance receiver noise and Xe = -X with probability eps.
TagSimulation simulate_tag_error(const TagErrorModel& model, double eps, SeededRng& rng, int trials);

}  // namespace ambc
