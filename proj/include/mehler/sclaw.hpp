#pragma once

#include <complex>
#include <vector>

#include "mehler/entrance.hpp"

namespace mehler {

// Infinitely divisible law: centered Gaussian directions plus a compound
// Poisson part with compensated jumps. Elements are stored as paths; laws
// carried by the flat space use embedded elements and pair through their
// values, laws carried by the entrance space pair through sections.
struct GaussDirection {
    double sigma = 1.0;
    EntrancePath element;
};
struct JumpEntry {
    double rate = 1.0;
    EntrancePath element;
};

struct IDLaw {
    enum class Carrier { OnSpace, OnPaths };
    Carrier carrier = Carrier::OnSpace;
    std::vector<GaussDirection> gaussians;
    std::vector<JumpEntry> jumps;
    int dim() const { return static_cast<int>(gaussians.size() + jumps.size()); }
};

// psi(a) = 1/2 sum sigma^2 p_i^2 - sum lambda (e^{i q_k} - 1 - i q_k) for
// pairings p, q of the elements with the functional.
std::complex<double> psi_of_pairings(const IDLaw& law, const std::vector<double>& pairings);

// Pair elements with a flat-space functional (OnSpace laws).
std::complex<double> id_exponent(const IDLaw& law, const GridFunction& a);
// Pair elements with an entrance-space functional (OnPaths laws).
std::complex<double> id_exponent_paths(const IDLaw& law, const EntrancePath& a,
                                       const EntranceParams& p);

// A skew convolution family over the semigroup: the cumulant of mu_t is
// accumulated from the law along the adjoint flow (differentiable mode) or
// from the sections of entrance-path elements (entrance-driven mode).
struct SCSemigroupSpec {
    enum class Mode { Differentiable, EntranceDriven };
    std::shared_ptr<const SemigroupSpec> sg;
    EntranceParams params;
    Mode mode = Mode::Differentiable;
    IDLaw law;
};

// Psi_t(a): time quadrature of the generating exponent.
std::complex<double> sc_exponent(const SCSemigroupSpec& sc, double t, const GridFunction& a);

// | Psi_{r+t}(a) - Psi_r(T_t^* a) - Psi_t(a) |
double sc_identity_residual(const SCSemigroupSpec& sc, double r, double t, const GridFunction& a);

// Log-characteristic functional of the transition kernel started at x:
// i <T_t x, a> - Psi_t(a).
std::complex<double> mehler_exponent(const SCSemigroupSpec& sc, double t, const GridFunction& x,
                                     const GridFunction& a);

struct SecondMomentReport {
    double per_element = 0.0;  // element-by-element quadratures, summed
    double pooled = 0.0;       // one quadrature of the pooled integrand
    double residual = 0.0;
};
// E ||Y_t||^2 = int_0^t sum sigma^2 ||e(s)||^2 + sum lambda ||v(s)||^2 ds.
SecondMomentReport second_moment(const SCSemigroupSpec& sc, double t);

// Elements as entrance paths regardless of carrier (drivers simulate these).
IDLaw lifted_law(const SCSemigroupSpec& sc);

}  // namespace mehler
