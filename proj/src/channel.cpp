#include "ambc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ambc/errors.hpp"
#include "ambc/numerics.hpp"

namespace ambc {

namespace {

ComplexMatrix draw_links(SeededRng& rng, Eigen::Index rows, Eigen::Index cols,
                         const Fading& fading) {
    double los = 0.0;
    double scatter = 1.0;
    if (fading.kind == FadingKind::Rician) {
        const double k = std::pow(10.0, fading.k_factor_db / 10.0);
        if (std::isinf(k)) {
            los = 1.0;
            scatter = 0.0;
        } else {
            los = std::sqrt(k / (k + 1.0));
            scatter = std::sqrt(1.0 / (k + 1.0));
        }
    }
    ComplexMatrix h(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) h(i, j) = los + scatter * rng.complex_normal();
    return h;
}

}  // namespace

ChannelRealization make_channel(ComplexMatrix h_sr, ComplexMatrix h_sg, ComplexMatrix h_gr,
                                double a_coeff, Fading fading) {
    const auto t = h_sr.rows();
    const auto r = h_sr.cols();
    if (t < 1 || r < 1) throw DomainError("make_channel: empty source-receiver matrix");
    if (h_sg.rows() != t || h_sg.cols() != 1)
        throw DomainError("make_channel: source-tag link must be t x 1");
    if (h_gr.rows() != 1 || h_gr.cols() != r)
        throw DomainError("make_channel: tag-receiver link must be 1 x r");
    if (!(a_coeff >= 0.0 && a_coeff <= 1.0))
        throw DomainError("make_channel: scattering efficiency must lie in [0, 1]");
    return {std::move(h_sr), std::move(h_sg), std::move(h_gr), a_coeff, fading};
}

ChannelRealization draw_channel(SeededRng& rng, int t, int r, Fading fading, double a_coeff) {
    if (t < 1 || r < 1) throw DomainError("draw_channel: antenna counts must be >= 1");
    ComplexMatrix h_sr = draw_links(rng, t, r, fading);
    ComplexMatrix h_sg = draw_links(rng, t, 1, fading);
    ComplexMatrix h_gr = draw_links(rng, 1, r, fading);
    return make_channel(std::move(h_sr), std::move(h_sg), std::move(h_gr), a_coeff, fading);
}

CompositePair composite(const ChannelRealization& channel, TagSymbol d) {
    return {channel.h_sr, channel.a_coeff * (channel.h_sg * channel.h_gr), d};
}

EigenSpectrum eigen_spectrum(const CompositePair& pair) {
    const ComplexMatrix h = pair.effective();
    const ComplexMatrix gram = h.adjoint() * h;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("eigen_spectrum: Hermitian eigensolver did not converge");

    std::vector<double> values(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(values.begin(), values.end(), std::greater<>());
    const auto m = static_cast<std::size_t>(std::min(h.rows(), h.cols()));
    values.resize(m);

    const double scale = std::max(1.0, gram.real().trace());
    for (double& g : values) {
        if (g < 0.0) {
            if (g < -1e-12 * scale)
                throw ConvergenceError("eigen_spectrum: Gram matrix is not positive semidefinite");
            g = 0.0;
        }
    }
    return {std::move(values), pair.d};
}

double product_gaussian_pdf(double x) {
    if (x == 0.0) throw DomainError("product_gaussian_pdf: density diverges at 0");
    return 2.0 * bessel_k0(2.0 * std::abs(x)) / std::numbers::pi;
}

}  // namespace ambc
