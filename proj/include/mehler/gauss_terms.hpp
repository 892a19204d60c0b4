#pragma once

#include <array>
#include <vector>

namespace mehler {

// One coordinate factor y^m exp(-alpha y^2 + beta y + cexp).
struct GaussFactor {
    int m = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double cexp = 0.0;
};

// coef * prod over the first ndim coordinates of fac[d](y_d).
// Kernel sections and their time derivatives are finite sums of these, so
// sections pair in closed form: products stay in the family and Gaussian
// moments integrate them exactly. Exponents are combined before a single
// exp call to dodge overflow from large individual constants.
struct GaussTerm {
    double coef = 1.0;
    int ndim = 1;
    std::array<GaussFactor, 2> fac{};
};

using GaussSum = std::vector<GaussTerm>;

GaussTerm term_product(const GaussTerm& a, const GaussTerm& b);
double term_eval(const GaussTerm& t, const double* y);

// Integral over R^ndim; each factor needs alpha > 0.
double term_integral_full(const GaussTerm& t);

// Halfline integral against the weight (1 - e^{-y^2}) for 1-d terms that are
// products of two odd sections (whole-line extension is even):
// int_0^inf = 1/2 [ I_full(t) - I_full(t with alpha + 1) ].
double term_integral_gamma_half(const GaussTerm& t);

double sum_integral_full(const GaussSum& s);
double sum_integral_gamma_half(const GaussSum& s);
double sum_eval(const GaussSum& s, const double* y);

GaussSum sum_product(const GaussSum& a, const GaussSum& b);

}  // namespace mehler
