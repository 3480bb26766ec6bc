#include "ambc/bounds_conv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ambc/errors.hpp"
#include "ambc/info_density.hpp"
#include "ambc/meijer.hpp"
#include "ambc/numerics.hpp"

namespace ambc {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ConverseBeta lower_bound_beta(const EmpiricalSample& draws, double eps) {
    const auto xs = draws.sorted();
    const double total = static_cast<double>(xs.size());
    ConverseBeta best;
    best.method = ConverseBetaMethod::LowerBound;
    best.log_beta = -std::numeric_limits<double>::infinity();
    // At lambda = xs[k], P[H > lambda] counts draws strictly above it.
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k + 1 < xs.size() && xs[k + 1] == xs[k]) continue;
        const double above = (total - static_cast<double>(k + 1)) / total;
        const double slack = 1.0 - eps - above;
        if (slack <= 0.0) continue;
        const double candidate = -xs[k] + std::log(slack);
        if (candidate > best.log_beta) {
            best.log_beta = candidate;
            best.eta = xs[k];
            best.rel_se = std::sqrt(above * (1.0 - above) / total) / slack;
        }
    }
    if (!std::isfinite(best.log_beta))
        throw InsufficientSamplesError("np_beta_converse: no threshold gives a valid lower bound");
    best.beta = std::exp(best.log_beta);
    return best;
}

}  // namespace

EmpiricalSample sample_converse_density(int n, const EigenSpectrum& g, const PowerAllocation& p,
                                        SeededRng& rng, int num_samples) {
    return sample_info_density(DensityKind::UnderConditional, n, g, p, rng, num_samples).draws;
}

ConverseBeta np_beta_converse(const EmpiricalSample& draws, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("np_beta_converse: eps must lie in (0, 1)");
    if (draws.empty()) throw DomainError("np_beta_converse: empty sample");
    const auto xs = draws.sorted();
    const std::size_t total = xs.size();
    const double accept = (1.0 - eps) * static_cast<double>(total);
    const auto whole = static_cast<std::size_t>(std::floor(accept));
    const double frac = accept - static_cast<double>(whole);

    // Accepted draws are the largest ones, xs[total - 1] down.
    std::vector<double> log_terms;
    log_terms.reserve(whole + 1);
    for (std::size_t k = 0; k < whole; ++k) log_terms.push_back(-xs[total - 1 - k]);
    double eta = whole > 0 ? xs[total - whole] : xs[total - 1];
    if (frac > 0.0 && whole < total) {
        log_terms.push_back(-xs[total - 1 - whole] + std::log(frac));
        eta = xs[total - 1 - whole];
    }
    if (log_terms.empty()) return lower_bound_beta(draws, eps);

    const double shift = *std::max_element(log_terms.begin(), log_terms.end());
    double sum = 0.0;
    for (double lt : log_terms) sum += std::exp(lt - shift);
    const double nn = static_cast<double>(total);
    const double mean_w = sum / nn;
    // Influence of one draw, threshold estimate included:
    // (exp(-H) - exp(-eta)) 1{H >= eta}.
    const double edge = std::exp(-eta - shift);
    double acc = 0.0;
    double acc_sq = 0.0;
    for (std::size_t k = 0; k < whole; ++k) {
        const double v = std::exp(-xs[total - 1 - k] - shift) - edge;
        acc += v;
        acc_sq += v * v;
    }
    const double mean_v = acc / nn;
    const double var_v = total > 1 ? std::max(acc_sq / nn - mean_v * mean_v, 0.0) * nn / (nn - 1.0) : 0.0;

    ConverseBeta out;
    out.method = ConverseBetaMethod::ChangeOfMeasure;
    out.log_beta = shift + std::log(mean_w);
    out.beta = std::exp(out.log_beta);
    out.eta = eta;
    out.rel_se = std::sqrt(var_v / nn) / mean_w;
    if (kZ95 * out.rel_se > 0.5) return lower_bound_beta(draws, eps);
    return out;
}

double log_ball_volume_bound(int m, double total_power) {
    if (m < 1) throw DomainError("ball_volume_bound: m must be >= 1");
    if (!(total_power > 0.0)) throw DomainError("ball_volume_bound: power must be > 0");
    const double half = 0.5 * m;
    return half * std::log(std::numbers::pi) - log_gamma(half + 1.0) +
           m * std::log(total_power + 0.5);
}

double ball_volume_bound(int m, double total_power) {
    return std::exp(log_ball_volume_bound(m, total_power));
}

double log_pdf_sup(int n, const std::vector<double>& snr) {
    if (n < 2) throw DomainError("pdf_sup_bound: blocklength must be >= 2");
    if (snr.empty()) throw DomainError("pdf_sup_bound: no modes");
    const int m = static_cast<int>(snr.size());
    // Only the product of the scales matters, so use their geometric mean.
    double log_theta = 0.0;
    for (double x : snr) log_theta += std::log((1.0 + x) / (2.0 * n));
    log_theta /= m;
    const double theta = std::exp(log_theta);

    auto objective = [&](double u) { return log_product_gamma_pdf(std::exp(u), m, n, theta); };
    const double u0 = m * (std::log(n - 1.0) + log_theta);
    const double width = 6.0 * std::sqrt(m * trigamma(n)) + 0.5;
    double lo = u0 - width;
    double hi = u0 + width;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, std::abs(u0)); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(x1);
        }
    }
    return std::max(f1, f2);
}

double pdf_sup_bound(int m, int n, const EigenSpectrum& g, const PowerAllocation& p) {
    const std::vector<double> snr = mode_snr(g.g, p);
    if (static_cast<int>(snr.size()) != m) throw DomainError("pdf_sup_bound: m must equal the mode count");
    return std::exp(log_pdf_sup(n, snr) - std::log(static_cast<double>(m) * n));
}

ConverseConstants converse_constants(int n, const EigenSpectrum& g, const PowerAllocation& p,
                                     double total_power) {
    ConverseConstants c;
    c.m = static_cast<int>(g.modes());
    c.n = n;
    c.log_k1 = log_pdf_sup(n, mode_snr(g.g, p)) - std::log(static_cast<double>(c.m) * n);
    c.log_k2 = log_ball_volume_bound(c.m, total_power);
    c.k1 = std::exp(c.log_k1);
    c.k2 = std::exp(c.log_k2);
    c.k = c.k1 * c.k2;
    return c;
}

ConverseResult converse_rate_given(int n, const EigenSpectrum& g, double total_power, double eps,
                                   SeededRng& rng, int num_samples) {
    const PowerAllocation alloc = waterfill(g, total_power);
    SeededRng h_rng = rng.substream(with_purpose(rng.stream_id(), StreamPurpose::ConverseLaw));
    const EmpiricalSample draws = sample_converse_density(n, g, alloc, h_rng, num_samples);
    const ConverseBeta beta = np_beta_converse(draws, eps);
    const ConverseConstants k = converse_constants(n, g, alloc, total_power);

    ConverseResult res;
    res.log_k = k.log_k1 + k.log_k2;
    res.k = std::exp(res.log_k);
    res.rate_nats = (res.log_k + std::log(static_cast<double>(k.m) * n) - beta.log_beta) / n;
    res.rate_bits = res.rate_nats / std::numbers::ln2;
    res.beta = beta.beta;
    res.log_beta = beta.log_beta;
    res.eta = beta.eta;
    res.method = beta.method;
    res.ci_halfwidth = kZ95 * beta.rel_se / n;
    res.n = n;
    res.eps = eps;
    res.d = static_cast<int>(g.d);
    return res;
}

ConverseMixture converse_rate(int n, const EigenSpectrum& g_plus, const EigenSpectrum& g_minus,
                              double total_power, double eps, SeededRng& rng, int num_samples) {
    SeededRng plus_rng = rng.substream(with_tag_symbol(rng.stream_id(), +1));
    SeededRng minus_rng = rng.substream(with_tag_symbol(rng.stream_id(), -1));
    ConverseMixture out;
    out.minus = converse_rate_given(n, g_minus, total_power, eps, minus_rng, num_samples);
    out.plus = converse_rate_given(n, g_plus, total_power, eps, plus_rng, num_samples);
    ConverseResult& mix = out.mixed;
    mix.rate_nats = 0.5 * (out.minus.rate_nats + out.plus.rate_nats);
    mix.rate_bits = mix.rate_nats / std::numbers::ln2;
    mix.ci_halfwidth = 0.5 * std::hypot(out.minus.ci_halfwidth, out.plus.ci_halfwidth);
    mix.beta = mix.log_beta = mix.eta = mix.k = mix.log_k = kNaN;
    mix.n = n;
    mix.eps = eps;
    mix.d = 0;
    return out;
}

}  // namespace ambc
