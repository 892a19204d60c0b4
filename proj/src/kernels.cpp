#include "mehler/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace mehler {

namespace {
constexpr double two_pi = 6.28318530717958647692;

void check_s(double s) {
    if (!(s > 0.0)) throw std::domain_error("kernel: time parameter must be positive");
}
}  // namespace

double kernel_g1(double s, double x) {
    check_s(s);
    return std::exp(-x * x / (2.0 * s)) / std::sqrt(two_pi * s);
}

double kernel_g2(double s, double x0, double x1) {
    check_s(s);
    return std::exp(-(x0 * x0 + x1 * x1) / (2.0 * s)) / (two_pi * s);
}

double kernel_g1_ds(double s, double x) {
    check_s(s);
    return kernel_g1(s, x) * (x * x / s - 1.0) / (2.0 * s);
}

double kernel_p(double s, double x, double y) {
    check_s(s);
    return kernel_g1(s, y - x) - kernel_g1(s, y + x);
}

double kernel_p_ds(double s, double x, double y) {
    check_s(s);
    return kernel_g1_ds(s, y - x) - kernel_g1_ds(s, y + x);
}

double kernel_k(double s, double y) {
    check_s(s);
    return y * kernel_g1(s, y) / s;
}

double kernel_k_ds(double s, double y) {
    check_s(s);
    return kernel_k(s, y) * (y * y / s - 3.0) / (2.0 * s);
}

double absorbing_mass(double s, double x) {
    check_s(s);
    return std::erf(x / std::sqrt(2.0 * s));
}

}  // namespace mehler
