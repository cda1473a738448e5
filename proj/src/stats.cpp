#include "pathmc/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace pathmc {

double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    out.n = v.size();
    if (v.empty()) return out;
    out.mean = pairwise_sum(v) / double(v.size());
    if (v.size() < 2) return out;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double dd = v[i] - out.mean;
        sq[i] = dd * dd;
    }
    const double var = pairwise_sum(sq) / double(v.size() - 1);
    out.se = std::sqrt(var / double(v.size()));
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    LineFit fit;
    fit.n = int(x.size());
    if (x.size() < 2) return fit;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / double(x.size());
    const double my = sy / double(x.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += r * r;
        }
        fit.slope_se = std::sqrt(ss_res / double(x.size() - 2) / sxx);
    }
    fit.valid = true;
    return fit;
}

} // namespace pathmc
