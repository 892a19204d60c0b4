#pragma once

#include <complex>
#include <vector>

namespace mehler {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Cached rule; n >= 1. Nodes found by Newton iteration on the Legendre
// polynomial, accurate to machine precision for the n used here (<= 64).
const GaussRule& gauss_rule(int n);

// A one-dimensional quadrature plan: absolute nodes and weights. Keeping
// the plan explicit lets callers evaluate several integrands on the same
// node set and keeps summation order deterministic.
struct QuadPlan {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <typename F>
    auto integrate(F&& f) const {
        using R = decltype(f(0.0));
        R acc{};
        for (std::size_t q = 0; q < nodes.size(); ++q)
            acc += weights[q] * f(nodes[q]);
        return acc;
    }
};

// Single Gauss-Legendre rule mapped to [a, b].
QuadPlan plan_gauss(double a, double b, int gl_points);

// Composite rule: [a, b] split into `cells` equal cells, gl_points each.
QuadPlan plan_uniform(double a, double b, int cells, int gl_points);

// Geometric cells [s0 rho^j, s0 rho^{j+1}] covering [s_lo, s_hi], each with a
// Gauss-Legendre rule. Resolves power-law behaviour near zero at uniform
// relative resolution.
QuadPlan plan_geometric(double s_lo, double s_hi, double rho, int gl_points);

// Head plan for integrable endpoint singularities at 0 no worse than s^{-1/2}:
// substitute s = u^2 and integrate 2 u f(u^2) du over [0, sqrt(s_hi)] with a
// single dense rule. The plan stores s-nodes; the Jacobian is folded into the
// weights.
QuadPlan plan_sqrt_head(double s_hi, int gl_points = 32);

template <typename F>
auto integrate_plan(const QuadPlan& p, F&& f) {
    return p.integrate(std::forward<F>(f));
}

}  // namespace mehler
