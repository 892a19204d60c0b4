#include "mehler/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mehler {

MeanSE mean_with_se(const std::vector<std::complex<double>>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("mean_with_se: need at least two samples");
    MeanSE r;
    r.count = samples.size();
    std::complex<double> acc{0.0, 0.0};
    for (const auto& z : samples) acc += z;
    r.mean = acc / static_cast<double>(samples.size());
    double ss = 0.0;
    for (const auto& z : samples) ss += std::norm(z - r.mean);
    r.se = std::sqrt(ss / (static_cast<double>(samples.size()) - 1.0)) /
           std::sqrt(static_cast<double>(samples.size()));
    return r;
}

MeanSE mean_with_se_real(const std::vector<double>& samples) {
    std::vector<std::complex<double>> z(samples.begin(), samples.end());
    return mean_with_se(z);
}

namespace {
double ks_p_asymptotic(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, sum));
}
}  // namespace

KSResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 8 || b.size() < 8) throw std::invalid_argument("ks_two_sample: samples too small");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double va = a[i], vb = b[j];
        double v = std::min(va, vb);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    KSResult r;
    r.statistic = d;
    double ne = std::sqrt(na * nb / (na + nb));
    r.p_value = ks_p_asymptotic((ne + 0.12 + 0.11 / ne) * d);
    return r;
}

}  // namespace mehler
