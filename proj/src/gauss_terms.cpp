#include "mehler/gauss_terms.hpp"

#include <cmath>
#include <stdexcept>

namespace mehler {

namespace {
constexpr double pi = 3.14159265358979323846;

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

double odd_double_factorial(int j) {
    // (j - 1)!! for even j
    double r = 1.0;
    for (int v = j - 1; v > 1; v -= 2) r *= v;
    return r;
}

// E[(mu + sigma Z)^m] for standard normal Z, and the Gaussian normalization,
// with the exponential part beta^2/(4 alpha) returned separately.
void factor_moment(const GaussFactor& f, double& mantissa, double& expo) {
    if (!(f.alpha > 0.0)) throw std::domain_error("gauss term integral: alpha must be positive");
    double mu = f.beta / (2.0 * f.alpha);
    double sigma2 = 1.0 / (2.0 * f.alpha);
    double moment = 0.0;
    for (int j = 0; j <= f.m; j += 2)
        moment += binom(f.m, j) * std::pow(mu, f.m - j) * std::pow(sigma2, j / 2) *
                  odd_double_factorial(j);
    mantissa = std::sqrt(pi / f.alpha) * moment;
    expo = f.beta * f.beta / (4.0 * f.alpha) + f.cexp;
}
}  // namespace

GaussTerm term_product(const GaussTerm& a, const GaussTerm& b) {
    if (a.ndim != b.ndim) throw std::invalid_argument("term_product: dimension mismatch");
    GaussTerm r;
    r.coef = a.coef * b.coef;
    r.ndim = a.ndim;
    for (int d = 0; d < a.ndim; ++d) {
        r.fac[d].m = a.fac[d].m + b.fac[d].m;
        r.fac[d].alpha = a.fac[d].alpha + b.fac[d].alpha;
        r.fac[d].beta = a.fac[d].beta + b.fac[d].beta;
        r.fac[d].cexp = a.fac[d].cexp + b.fac[d].cexp;
    }
    return r;
}

double term_eval(const GaussTerm& t, const double* y) {
    double mant = t.coef;
    double expo = 0.0;
    for (int d = 0; d < t.ndim; ++d) {
        const GaussFactor& f = t.fac[d];
        double v = y[d];
        for (int j = 0; j < f.m; ++j) mant *= v;
        expo += -f.alpha * v * v + f.beta * v + f.cexp;
    }
    return mant * std::exp(expo);
}

double term_integral_full(const GaussTerm& t) {
    if (t.coef == 0.0) return 0.0;
    double mant = t.coef;
    double expo = 0.0;
    for (int d = 0; d < t.ndim; ++d) {
        double m, e;
        factor_moment(t.fac[d], m, e);
        mant *= m;
        expo += e;
    }
    return mant * std::exp(expo);
}

double term_integral_gamma_half(const GaussTerm& t) {
    if (t.ndim != 1) throw std::invalid_argument("gamma half integral: 1-d only");
    GaussTerm shifted = t;
    shifted.fac[0].alpha += 1.0;
    return 0.5 * (term_integral_full(t) - term_integral_full(shifted));
}

double sum_integral_full(const GaussSum& s) {
    double acc = 0.0;
    for (const auto& t : s) acc += term_integral_full(t);
    return acc;
}

double sum_integral_gamma_half(const GaussSum& s) {
    double acc = 0.0;
    for (const auto& t : s) acc += term_integral_gamma_half(t);
    return acc;
}

double sum_eval(const GaussSum& s, const double* y) {
    double acc = 0.0;
    for (const auto& t : s) acc += term_eval(t, y);
    return acc;
}

GaussSum sum_product(const GaussSum& a, const GaussSum& b) {
    GaussSum r;
    r.reserve(a.size() * b.size());
    for (const auto& ta : a)
        for (const auto& tb : b) r.push_back(term_product(ta, tb));
    return r;
}

}  // namespace mehler
