#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ambc/rng.hpp"

namespace ambc {

using ComplexMatrix = Eigen::MatrixXcd;

enum class TagSymbol : int { Minus = -1, Plus = 1 };

inline double sign_of(TagSymbol d) { return d == TagSymbol::Plus ? 1.0 : -1.0; }

enum class FadingKind { Rayleigh, Rician };

struct Fading {
    FadingKind kind = FadingKind::Rayleigh;
    double k_factor_db = 0.0;  // only meaningful for Rician

    static Fading rayleigh() { return {}; }
    static Fading rician(double k_factor_db) { return {FadingKind::Rician, k_factor_db}; }
};

/// Source-receiver (t x r), source-tag (t x 1) and tag-receiver (1 x r)
/// links plus the tag scattering efficiency.
struct ChannelRealization {
    ComplexMatrix h_sr;
    ComplexMatrix h_sg;
    ComplexMatrix h_gr;
    double a_coeff = 0.5;
    Fading fading;

    int transmit_antennas() const { return static_cast<int>(h_sr.rows()); }
    int receive_antennas() const { return static_cast<int>(h_sr.cols()); }
    int modes() const { return std::min(transmit_antennas(), receive_antennas()); }
};

/// Validating constructor: dimensions must be t x r, t x 1, 1 x r and
/// a_coeff in [0, 1].
ChannelRealization make_channel(ComplexMatrix h_sr, ComplexMatrix h_sg, ComplexMatrix h_gr,
                                double a_coeff, Fading fading = Fading::rayleigh());

/// Direct path h0 = H_sr and backscatter path h1 = A H_sg H_gr for a given
/// tag symbol.
struct CompositePair {
    ComplexMatrix h0;
    ComplexMatrix h1;
    TagSymbol d = TagSymbol::Plus;

    /// H_0 + d H_1.
    ComplexMatrix effective() const { return h0 + sign_of(d) * h1; }
};

/// The m = min(t, r) largest eigenvalues of the composite Gram matrix,
/// descending.
struct EigenSpectrum {
    std::vector<double> g;
    TagSymbol d = TagSymbol::Plus;

    std::size_t modes() const { return g.size(); }
};

/// Rayleigh: i.i.d. CN(0, 1) entries. Rician with linear K-factor k:
/// sqrt(k / (k + 1)) + sqrt(1 / (k + 1)) CN(0, 1), line-of-sight phase 0.
/// Entries are drawn in the order H_sr (row-major), H_sg, H_gr.
ChannelRealization draw_channel(SeededRng& rng, int t, int r, Fading fading, double a_coeff);

CompositePair composite(const ChannelRealization& channel, TagSymbol d);

/// Hermitian eigendecomposition of (H0 + d H1)^H (H0 + d H1). Eigenvalues in
/// [-1e-12 scale, 0) are clamped to zero; solver failure throws
/// ConvergenceError.
EigenSpectrum eigen_spectrum(const CompositePair& pair);

/// Density 2 K0(2|x|) / pi of the product of two independent N(0, 1/2)
/// variables. Throws DomainError at x = 0 where it diverges.
double product_gaussian_pdf(double x);

}  // namespace ambc
