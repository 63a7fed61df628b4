#include "retrodiff/rate_fit.hpp"

#include "retrodiff/errors.hpp"

#include <cmath>

namespace retrodiff {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidInputError("fit inputs differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw InvalidInputError("line fit needs at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit fit;
    fit.points = n;
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    if (n > 2) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += r * r;
        }
        const double var = ss_res / (n - 2);
        fit.slope_stderr = std::sqrt(var * n / det);
    }
    return fit;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 4) throw InvalidInputError("rate fits need at least 4 sweep points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw InvalidInputError("log-log fit needs positive samples");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

ShapeFit fit_shape(const std::vector<double>& shape, const std::vector<double>& y) {
    if (shape.size() != y.size() || shape.empty())
        throw InvalidInputError("shape fit inputs differ in length or are empty");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        num += shape[i] * y[i];
        den += shape[i] * shape[i];
    }
    if (den == 0.0) throw InvalidInputError("shape fit against the zero shape");
    ShapeFit fit;
    fit.constant = num / den;
    double res = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const double model = fit.constant * shape[i];
        res += (y[i] - model) * (y[i] - model);
        ref += model * model;
    }
    fit.relative_residual = ref > 0.0 ? std::sqrt(res / ref) : 0.0;
    return fit;
}

} // namespace retrodiff
