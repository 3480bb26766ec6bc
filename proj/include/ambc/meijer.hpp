#pragma once

namespace ambc {

/// log G^{m,0}_{0,m}(y | b, ..., b) for y > 0, b >= 0, by trapezoidal
/// quadrature of the Mellin-Barnes integral along a vertical line through the
/// real saddle point of y^{-s} Gamma(s + b)^m. Throws ConvergenceError when
/// step halving cannot bring the quadrature residual under tolerance.
double log_meijer_g_equal(double y, int copies, double b);

/// Density of the product of `copies` independent Gamma(shape, scale)
/// variables at z, in log-domain. Requires copies <= 8 and shape <= 4096.
double log_product_gamma_pdf(double z, int copies, int shape, double scale);

double product_gamma_pdf(double z, int copies, int shape, double scale);

}  // namespace ambc
