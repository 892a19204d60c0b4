#pragma once

#include <complex>
#include <vector>

namespace mehler {

struct MeanSE {
    std::complex<double> mean{0.0, 0.0};
    double se = 0.0;  // standard error of the complex mean
    std::size_t count = 0;
};

// Sample mean with jackknife-free standard error s / sqrt(N),
// s^2 = sum |z_i - mean|^2 / (N - 1).
MeanSE mean_with_se(const std::vector<std::complex<double>>& samples);
MeanSE mean_with_se_real(const std::vector<double>& samples);

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
struct KSResult {
    double statistic = 0.0;
    double p_value = 0.0;
};
KSResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace mehler
