#include "ambc/tag.hpp"

#include <cmath>
#include <numbers>

#include "ambc/errors.hpp"
#include "ambc/numerics.hpp"

namespace ambc {

namespace {

constexpr double kClampSlack = 1e-12;

}  // namespace

double TagErrorModel::floor() const { return gaussian_q(std::numbers::sqrt2 * norm_h1); }

double TagErrorModel::ceiling() const {
    const double s = std::numbers::sqrt2 * norm_h1;
    return 0.5 * gaussian_q(s * (-1.0 + 2.0 * cross_term)) +
           0.5 * gaussian_q(s * (-1.0 - 2.0 * cross_term));
}

TagErrorModel make_tag_model(const ComplexMatrix& h0, const ComplexMatrix& h1) {
    if (h0.rows() != h1.rows() || h0.cols() != h1.cols())
        throw DomainError("make_tag_model: H0 and H1 must have equal dimensions");
    const double norm_sq = h1.squaredNorm();
    if (!(norm_sq > 0.0)) throw DomainError("make_tag_model: H1 is zero; tag symbol undetectable");
    TagErrorModel model;
    model.h0 = h0;
    model.h1 = h1;
    model.norm_h1 = std::sqrt(norm_sq);
    model.cross_term = (h1.adjoint() * h0).trace().real() / norm_sq;
    return model;
}

TagErrorModel make_tag_model(const CompositePair& pair) { return make_tag_model(pair.h0, pair.h1); }

double tag_error_given_eps(const TagErrorModel& model, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("tag_error_given_eps: eps must lie in [0, 1]");
    if (!(model.norm_h1 > 0.0)) throw DomainError("tag_error_given_eps: H1 is zero");
    return (1.0 - eps) * model.floor() + eps * model.ceiling();
}

double eps_given_tag_error(const TagErrorModel& model, double eps_d) {
    if (!(model.norm_h1 > 0.0)) throw DomainError("eps_given_tag_error: H1 is zero");
    if (!(eps_d >= 0.0 && eps_d <= 1.0))
        throw DomainError("eps_given_tag_error: eps_d must lie in [0, 1]");
    const double a = model.floor();
    const double b = model.ceiling();
    if (b == a) {
        if (eps_d == a) return 0.0;
        throw InfeasibleTargetError("eps_given_tag_error: tag error does not depend on eps here");
    }
    double eps = (eps_d - a) / (b - a);
    if (eps < 0.0 && eps >= -kClampSlack) eps = 0.0;
    if (eps > 1.0 && eps <= 1.0 + kClampSlack) eps = 1.0;
    if (!(eps >= 0.0 && eps <= 1.0))
        throw InfeasibleTargetError("eps_given_tag_error: target outside the attainable interval");
    return eps;
}

double mrc_statistic(const ComplexMatrix& y, const ComplexMatrix& x_est, const ComplexMatrix& h0,
                     const ComplexMatrix& h1) {
    if (x_est.cols() != h0.rows() || y.rows() != x_est.rows() || y.cols() != h0.cols() ||
        h1.rows() != h0.rows() || h1.cols() != h0.cols())
        throw DomainError("mrc_statistic: inconsistent dimensions");
    const double norm_sq = h1.squaredNorm();
    if (!(norm_sq > 0.0)) throw DomainError("mrc_statistic: H1 is zero");
    const ComplexMatrix residual = y - x_est * h0;
    return (h1.adjoint() * x_est.adjoint() * residual).trace().real() / norm_sq;
}

TagSymbol mrc_decision(double z) { return z >= 0.0 ? TagSymbol::Plus : TagSymbol::Minus; }

TagSimulation simulate_tag_error(const TagErrorModel& model, double eps, SeededRng& rng, int trials) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("simulate_tag_error: eps must lie in [0, 1]");
    if (trials < 1) throw DomainError("simulate_tag_error: trials must be >= 1");
    const auto t = model.h0.rows();
    const auto r = model.h0.cols();
    const ComplexMatrix x = ComplexMatrix::Identity(t, t);
    const ComplexMatrix x_wrong = -x;
    ComplexMatrix noise(t, r);
    std::size_t errors = 0;
    for (int k = 0; k < trials; ++k) {
        const double d = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const bool wrong = rng.uniform() < eps;
        for (Eigen::Index i = 0; i < t; ++i)
            for (Eigen::Index j = 0; j < r; ++j) noise(i, j) = rng.complex_normal();
        const ComplexMatrix y = x * (model.h0 + d * model.h1) + noise;
        const double z = mrc_statistic(y, wrong ? x_wrong : x, model.h0, model.h1);
        if (sign_of(mrc_decision(z)) != d) ++errors;
    }
    TagSimulation out;
    out.trials = static_cast<std::size_t>(trials);
    out.error_rate = static_cast<double>(errors) / trials;
    out.std_error = std::sqrt(out.error_rate * (1.0 - out.error_rate) / trials);
    return out;
}

}  // namespace ambc
