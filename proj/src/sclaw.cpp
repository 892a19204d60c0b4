#include "mehler/sclaw.hpp"

#include <cmath>
#include <stdexcept>

namespace mehler {

std::complex<double> psi_of_pairings(const IDLaw& law, const std::vector<double>& pairings) {
    if (pairings.size() != static_cast<std::size_t>(law.dim()))
        throw std::invalid_argument("psi_of_pairings: pairing count mismatch");
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (const GaussDirection& g : law.gaussians) {
        double p = pairings[idx++];
        re += 0.5 * g.sigma * g.sigma * p * p;
    }
    for (const JumpEntry& j : law.jumps) {
        double q = pairings[idx++];
        re -= j.rate * (std::cos(q) - 1.0);
        im -= j.rate * (std::sin(q) - q);
    }
    return {re, im};
}

std::complex<double> id_exponent(const IDLaw& law, const GridFunction& a) {
    std::vector<double> pairings;
    pairings.reserve(law.dim());
    for (const GaussDirection& g : law.gaussians) pairings.push_back(inner(g.element.embedded_value(), a));
    for (const JumpEntry& j : law.jumps) pairings.push_back(inner(j.element.embedded_value(), a));
    return psi_of_pairings(law, pairings);
}

std::complex<double> id_exponent_paths(const IDLaw& law, const EntrancePath& a,
                                       const EntranceParams& p) {
    std::vector<double> pairings;
    pairings.reserve(law.dim());
    for (const GaussDirection& g : law.gaussians) pairings.push_back(entrance_inner(g.element, a, p));
    for (const JumpEntry& j : law.jumps) pairings.push_back(entrance_inner(j.element, a, p));
    return psi_of_pairings(law, pairings);
}

namespace {

// Pairings of all law elements against a at path time s (section route).
std::vector<double> section_pairings(const IDLaw& law, const GridFunction& a, double s) {
    std::vector<double> out;
    out.reserve(law.dim());
    for (const GaussDirection& g : law.gaussians) out.push_back(g.element.pair_with(a, s));
    for (const JumpEntry& j : law.jumps) out.push_back(j.element.pair_with(a, s));
    return out;
}

}  // namespace

std::complex<double> sc_exponent(const SCSemigroupSpec& sc, double t, const GridFunction& a) {
    if (!(t >= 0.0)) throw std::domain_error("sc_exponent: time must be nonnegative");
    if (t == 0.0) return {0.0, 0.0};
    QuadPlan plan = plan_uniform(0.0, t, 16, 8);
    std::complex<double> acc{0.0, 0.0};
    if (sc.mode == SCSemigroupSpec::Mode::Differentiable) {
        for (std::size_t q = 0; q < plan.nodes.size(); ++q) {
            GridFunction as = sc.sg->adjoint_apply(plan.nodes[q], a);
            acc += plan.weights[q] * id_exponent(sc.law, as);
        }
    } else {
        for (std::size_t q = 0; q < plan.nodes.size(); ++q)
            acc += plan.weights[q] * psi_of_pairings(sc.law, section_pairings(sc.law, a, plan.nodes[q]));
    }
    return acc;
}

double sc_identity_residual(const SCSemigroupSpec& sc, double r, double t, const GridFunction& a) {
    std::complex<double> whole = sc_exponent(sc, r + t, a);
    GridFunction b = sc.sg->adjoint_apply(t, a);
    std::complex<double> parts = sc_exponent(sc, r, b) + sc_exponent(sc, t, a);
    return std::abs(whole - parts);
}

std::complex<double> mehler_exponent(const SCSemigroupSpec& sc, double t, const GridFunction& x,
                                     const GridFunction& a) {
    std::complex<double> drift{0.0, inner(sc.sg->apply(t, x), a)};
    return drift - sc_exponent(sc, t, a);
}

SecondMomentReport second_moment(const SCSemigroupSpec& sc, double t) {
    if (!(t > 0.0)) throw std::domain_error("second_moment: time must be positive");
    SecondMomentReport r;
    IDLaw law = lifted_law(sc);
    const QuadPlan fine = plan_uniform(0.0, t, 12, 8);
    const QuadPlan coarse = plan_uniform(0.0, t, 20, 6);
    auto weighted_norm2 = [&](const EntrancePath& e, double scale, const QuadPlan& plan) {
        PathCombo c = PathCombo::single(e);
        return scale * plan.integrate([&](double s) { return combo_section_inner(c, s, c, s); });
    };
    for (const GaussDirection& g : law.gaussians)
        r.per_element += weighted_norm2(g.element, g.sigma * g.sigma, fine);
    for (const JumpEntry& j : law.jumps)
        r.per_element += weighted_norm2(j.element, j.rate, fine);
    for (const GaussDirection& g : law.gaussians)
        r.pooled += weighted_norm2(g.element, g.sigma * g.sigma, coarse);
    for (const JumpEntry& j : law.jumps)
        r.pooled += weighted_norm2(j.element, j.rate, coarse);
    r.residual = std::abs(r.per_element - r.pooled);
    return r;
}

IDLaw lifted_law(const SCSemigroupSpec& sc) {
    if (sc.law.carrier == IDLaw::Carrier::OnPaths) return sc.law;
    IDLaw out = sc.law;
    out.carrier = IDLaw::Carrier::OnPaths;
    for (GaussDirection& g : out.gaussians)
        g.element = EntrancePath::embedded(sc.sg, g.element.embedded_value());
    for (JumpEntry& j : out.jumps)
        j.element = EntrancePath::embedded(sc.sg, j.element.embedded_value());
    return out;
}

}  // namespace mehler
