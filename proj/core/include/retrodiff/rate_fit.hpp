#pragma once

#include <vector>

namespace retrodiff {

/// Ordinary least-squares line fit.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t points = 0;
};

/// OLS of y against x; throws InvalidInputError with fewer than 2 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log(y) against log(x); requires >= 4 points, all positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Single-constant fit y ~ c * shape with the relative RMS residual
/// |y - c*shape| / |c*shape|.
struct ShapeFit {
    double constant = 0.0;
    double relative_residual = 0.0;
};

ShapeFit fit_shape(const std::vector<double>& shape, const std::vector<double>& y);

} // namespace retrodiff
