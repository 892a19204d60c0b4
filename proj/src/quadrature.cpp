#include "mehler/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mehler {

namespace {

GaussRule compute_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n and its derivative at x.
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[k] = -x;
        r.weights[k] = w;
        r.nodes[n - 1 - k] = x;
        r.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
    if (n < 1 || n > 128) throw std::invalid_argument("gauss_rule: order out of range");
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

QuadPlan plan_gauss(double a, double b, int gl_points) {
    const GaussRule& r = gauss_rule(gl_points);
    QuadPlan p;
    p.nodes.reserve(gl_points);
    p.weights.reserve(gl_points);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < gl_points; ++q) {
        p.nodes.push_back(mid + half * r.nodes[q]);
        p.weights.push_back(half * r.weights[q]);
    }
    return p;
}

QuadPlan plan_uniform(double a, double b, int cells, int gl_points) {
    if (cells < 1) throw std::invalid_argument("plan_uniform: cells < 1");
    QuadPlan p;
    const double h = (b - a) / cells;
    for (int c = 0; c < cells; ++c) {
        QuadPlan cell = plan_gauss(a + c * h, a + (c + 1) * h, gl_points);
        p.nodes.insert(p.nodes.end(), cell.nodes.begin(), cell.nodes.end());
        p.weights.insert(p.weights.end(), cell.weights.begin(), cell.weights.end());
    }
    return p;
}

QuadPlan plan_geometric(double s_lo, double s_hi, double rho, int gl_points) {
    if (!(s_lo > 0.0) || !(s_hi > s_lo)) throw std::invalid_argument("plan_geometric: bad interval");
    if (!(rho > 1.0)) throw std::invalid_argument("plan_geometric: rho must exceed 1");
    QuadPlan p;
    double lo = s_lo;
    while (lo < s_hi) {
        double hi = std::min(lo * rho, s_hi);
        QuadPlan cell = plan_gauss(lo, hi, gl_points);
        p.nodes.insert(p.nodes.end(), cell.nodes.begin(), cell.nodes.end());
        p.weights.insert(p.weights.end(), cell.weights.begin(), cell.weights.end());
        lo = hi;
    }
    return p;
}

QuadPlan plan_sqrt_head(double s_hi, int gl_points) {
    if (!(s_hi > 0.0)) throw std::invalid_argument("plan_sqrt_head: bad endpoint");
    QuadPlan u = plan_gauss(0.0, std::sqrt(s_hi), gl_points);
    QuadPlan p;
    p.nodes.reserve(u.nodes.size());
    p.weights.reserve(u.nodes.size());
    for (std::size_t q = 0; q < u.nodes.size(); ++q) {
        p.nodes.push_back(u.nodes[q] * u.nodes[q]);
        p.weights.push_back(2.0 * u.nodes[q] * u.weights[q]);
    }
    return p;
}

}  // namespace mehler
