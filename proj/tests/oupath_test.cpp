#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mehler/oupath.hpp"
#include "mehler/rng.hpp"

using namespace mehler;

namespace {

std::shared_ptr<const SemigroupSpec> scalar_sg() {
    Eigen::MatrixXd A(1, 1);
    A << -1.0;
    return SemigroupSpec::matrix(A);
}

GridFunction scalar_fn(const std::shared_ptr<const SemigroupSpec>& sg, double v) {
    GridFunction f = zero_function(sg->space());
    f.values << v;
    return f;
}

SCSemigroupSpec scalar_jump_sc() {
    auto sg = scalar_sg();
    SCSemigroupSpec sc;
    sc.sg = sg;
    sc.params = EntranceParams::defaults_for(*sg);
    sc.mode = SCSemigroupSpec::Mode::Differentiable;
    sc.law.carrier = IDLaw::Carrier::OnSpace;
    sc.law.jumps.push_back({1.0, EntrancePath::embedded(sg, scalar_fn(sg, 1.0))});
    return sc;
}

SCSemigroupSpec scalar_gauss_sc() {
    auto sg = scalar_sg();
    SCSemigroupSpec sc;
    sc.sg = sg;
    sc.params = EntranceParams::defaults_for(*sg);
    sc.mode = SCSemigroupSpec::Mode::Differentiable;
    sc.law.carrier = IDLaw::Carrier::OnSpace;
    sc.law.gaussians.push_back({1.0, EntrancePath::embedded(sg, scalar_fn(sg, 1.0))});
    return sc;
}

// Single jump of height h at tau plus the unit-rate compensator drift.
DriverPath unit_jump_driver(const std::vector<double>& grid, double tau, double h = 1.0) {
    DriverPath d;
    d.times = grid;
    d.coeffs = Eigen::MatrixXd::Zero(static_cast<int>(grid.size()), 1);
    for (std::size_t j = 0; j < grid.size(); ++j)
        d.coeffs(static_cast<int>(j), 0) = (grid[j] >= tau ? h : 0.0) - grid[j];
    return d;
}

double scheme_value(const SCSemigroupSpec& sc, int substeps, double tau) {
    DriverPath d = unit_jump_driver(refined_grid({1.0}, substeps), tau);
    OUPathRecord rec = construct_ou(sc, nullptr, d, {1.0});
    PathCombo c = state_combo(rec, rec.states[0]);
    return combo_eval(c, 1e-9).values[0];
}

}  // namespace

TEST_SUITE("oupath") {
    TEST_CASE("refined grid hits output times exactly") {
        std::vector<double> g = refined_grid({0.5, 1.0}, 4);
        REQUIRE(g.size() == 9);
        CHECK(g[0] == 0.0);
        CHECK(g[4] == 0.5);
        CHECK(g[8] == 1.0);
        CHECK(g[3] == doctest::Approx(0.375).epsilon(1e-15));
        CHECK(grid_index_of(g, 0.5) == 4);
        CHECK(grid_index_of(g, 0.5 + 1e-12) == 4);
        CHECK_THROWS_AS(grid_index_of(g, 0.3), std::invalid_argument);
        CHECK_THROWS_AS(refined_grid({1.0, 0.5}, 4), std::invalid_argument);
        CHECK_THROWS_AS(refined_grid({}, 4), std::invalid_argument);
    }

    TEST_CASE("path rng is reproducible and stream-separated") {
        PathRng a(42, 7), b(42, 7), c(42, 8);
        bool same = true, differ = false;
        for (int i = 0; i < 16; ++i) {
            std::uint64_t u = a.next_u64();
            same = same && (u == b.next_u64());
            differ = differ || (u != c.next_u64());
        }
        CHECK(same);
        CHECK(differ);

        PathRng n(5, 0);
        double m1 = 0.0, m2 = 0.0;
        const int N = 20000;
        for (int i = 0; i < N; ++i) {
            double z = n.normal();
            m1 += z;
            m2 += z * z;
        }
        CHECK(std::abs(m1 / N) < 0.03);
        CHECK(m2 / N == doctest::Approx(1.0).epsilon(0.03));

        PathRng p(5, 1);
        double pm = 0.0;
        for (int i = 0; i < N; ++i) pm += p.poisson(3.0);
        CHECK(pm / N == doctest::Approx(3.0).epsilon(0.02));

        PathRng u(5, 2);
        for (int i = 0; i < 1000; ++i) {
            double v = u.uniform();
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }

    TEST_CASE("driver columns carry the right first two moments") {
        auto sg = scalar_sg();
        IDLaw law;
        law.gaussians.push_back({2.0, EntrancePath::embedded(sg, scalar_fn(sg, 1.0))});
        law.jumps.push_back({1.5, EntrancePath::embedded(sg, scalar_fn(sg, 1.0))});
        std::vector<double> grid = refined_grid({1.0}, 64);
        const int last = static_cast<int>(grid.size()) - 1;

        const int N = 4000;
        double gm = 0.0, gv = 0.0, jm = 0.0, jv = 0.0;
        for (int p = 0; p < N; ++p) {
            DriverPath d = simulate_driver(law, grid, 77, p);
            CHECK(d.coeffs(0, 0) == 0.0);
            CHECK(d.coeffs(0, 1) == 0.0);
            gm += d.coeffs(last, 0);
            gv += d.coeffs(last, 0) * d.coeffs(last, 0);
            jm += d.coeffs(last, 1);
            jv += d.coeffs(last, 1) * d.coeffs(last, 1);
        }
        CHECK(std::abs(gm / N) < 4.0 * 2.0 / std::sqrt(double(N)));
        CHECK(gv / N == doctest::Approx(4.0).epsilon(0.1));
        CHECK(std::abs(jm / N) < 4.0 * std::sqrt(1.5 / N));
        CHECK(jv / N == doctest::Approx(1.5).epsilon(0.1));

        DriverPath d1 = simulate_driver(law, grid, 77, 5);
        DriverPath d2 = simulate_driver(law, grid, 77, 5);
        CHECK((d1.coeffs - d2.coeffs).norm() == 0.0);

        CHECK_THROWS_AS(simulate_driver(law, {0.5, 1.0}, 1, 0), std::invalid_argument);
    }

    TEST_CASE("variation-of-constants scheme converges to the closed form") {
        SCSemigroupSpec sc = scalar_jump_sc();
        const double tau = 0.25;
        const double exact = std::exp(-(1.0 - tau)) - (1.0 - std::exp(-1.0));
        double e8 = std::abs(scheme_value(sc, 8, tau) - exact);
        double e16 = std::abs(scheme_value(sc, 16, tau) - exact);
        double e32 = std::abs(scheme_value(sc, 32, tau) - exact);
        CHECK(e32 < 0.03);
        CHECK(e16 < 0.7 * e8);
        CHECK(e32 < 0.7 * e16);
    }

    TEST_CASE("state terms stay one per step plus the driver term") {
        SCSemigroupSpec sc = scalar_jump_sc();
        DriverPath d = unit_jump_driver(refined_grid({1.0}, 8), 0.25, 2.0);
        OUPathRecord rec = construct_ou(sc, nullptr, d, {1.0});
        REQUIRE(rec.states.size() == 1);
        CHECK(rec.states[0].terms.size() == 9);
        CHECK_FALSE(rec.flattened);

        EntrancePath x0 = EntrancePath::embedded(sc.sg, scalar_fn(sc.sg, 3.0));
        OUPathRecord ri = construct_ou(sc, &x0, d, {1.0});
        CHECK(ri.has_initial);
        CHECK(ri.states[0].terms.size() == 10);
        double with = combo_eval(state_combo(ri, ri.states[0]), 1e-9).values[0];
        double without = combo_eval(state_combo(rec, rec.states[0]), 1e-9).values[0];
        CHECK(with - without == doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-9));

        CHECK_THROWS_AS(
            construct_ou(sc, nullptr,
                         unit_jump_driver(refined_grid({1.0}, 8), 0.25), {0.3}),
            std::invalid_argument);
    }

    TEST_CASE("term cap flattens to a sampled path") {
        SCSemigroupSpec sc = scalar_jump_sc();
        DriverPath d = unit_jump_driver(refined_grid({1.0}, 8), 0.25);
        OUPathRecord rec = construct_ou(sc, nullptr, d, {1.0}, 3);
        CHECK(rec.flattened);
        CHECK(rec.states[0].terms.size() == 1);
        CHECK(rec.flatten_error >= 0.0);
        CHECK(rec.flatten_error < 0.1);
        OUPathRecord full = construct_ou(sc, nullptr, d, {1.0});
        double a = combo_eval(state_combo(rec, rec.states[0]), 0.5).values[0];
        double b = combo_eval(state_combo(full, full.states[0]), 0.5).values[0];
        CHECK(a == doctest::Approx(b).epsilon(0.05));
    }

    TEST_CASE("ensemble is deterministic across thread counts") {
        SCSemigroupSpec sc = scalar_gauss_sc();
        sc.law.jumps.push_back({0.8, EntrancePath::embedded(sc.sg, scalar_fn(sc.sg, 0.5))});
        OUEnsemble e1(sc, nullptr, {0.5, 1.0}, 8, 50, 99);
        OUEnsemble e3(sc, nullptr, {0.5, 1.0}, 8, 50, 99);
        e1.run(1);
        e3.run(3);
        GridFunction a = scalar_fn(sc.sg, 1.0);
        std::vector<double> s1 = e1.pair_samples(1.0, a, true, 0.0);
        std::vector<double> s3 = e3.pair_samples(1.0, a, true, 0.0);
        REQUIRE(s1.size() == 50);
        bool identical = true;
        for (std::size_t i = 0; i < s1.size(); ++i) identical = identical && (s1[i] == s3[i]);
        CHECK(identical);

        OUPathRecord rec = e1.record(7);
        DriverPath d = simulate_driver(e1.law(), e1.grid(), 99, 7);
        CHECK((rec.driver.coeffs - d.coeffs).norm() == 0.0);
        CHECK(e1.closable_states());
    }

    TEST_CASE("ensemble matches the analytic transition laws") {
        SCSemigroupSpec sc = scalar_gauss_sc();
        OUEnsemble ens(sc, nullptr, {0.5, 1.0}, 256, 20000, 4242);
        ens.run(1);
        GridFunction a = scalar_fn(sc.sg, 1.0);

        CharfnResult cf = empirical_charfn(ens, 1.0, a, true, 0.0);
        CHECK(cf.se_multiples < 4.0);

        CharfnResult dc = driver_charfn(ens, 1.0, a, true, 0.0);
        CHECK(dc.se_multiples < 4.0);

        MarkovResult mk = markov_increment_check(ens, 0.5, 0.5, a, true, 0.0);
        CHECK(mk.se_multiples < 4.0);

        std::vector<double> pr = ens.pair_samples(1.0, a, true, 0.0);
        std::vector<double> n2 = ens.state_norm2_samples(1.0);
        REQUIRE(pr.size() == n2.size());
        for (int i = 0; i < 5; ++i)
            CHECK(n2[i] == doctest::Approx(pr[i] * pr[i]).epsilon(1e-10));

        CHECK_THROWS_AS(empirical_charfn(OUEnsemble(sc, nullptr, {1.0}, 4, 50, 1), 1.0, a,
                                         true, 0.0),
                        std::invalid_argument);
    }

    TEST_CASE("driver second moment matches the element norms") {
        auto sg = scalar_sg();
        SCSemigroupSpec sc;
        sc.sg = sg;
        sc.params = EntranceParams::defaults_for(*sg);
        sc.params.b = 0.5;
        sc.params.alpha = 1.0;
        sc.mode = SCSemigroupSpec::Mode::Differentiable;
        sc.law.gaussians.push_back({1.0, EntrancePath::embedded(sg, scalar_fn(sg, 1.0))});
        sc.law.jumps.push_back({2.0, EntrancePath::embedded(sg, scalar_fn(sg, 0.5))});

        OUEnsemble ens(sc, nullptr, {1.0}, 32, 4000, 11);
        ens.run(1);
        DriverMomentResult r = driver_second_moment(ens, 1.0, sc.params);
        CHECK(r.analytic == doctest::Approx(0.5).epsilon(1e-4));
        CHECK(r.se_multiples < 4.0);

        std::vector<double> ep = ens.element_pairings(scalar_fn(sg, 1.0), true, 0.0);
        REQUIRE(ep.size() == 2);
        CHECK(ep[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ep[1] == doctest::Approx(0.5).epsilon(1e-9));

        std::vector<std::vector<double>> w = ens.window_increments(4, {1.0, 1.0});
        REQUIRE(w.size() == 4);
        for (const auto& col : w) CHECK(col.size() == 4000);
        CHECK_THROWS_AS(ens.window_increments(1, {1.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(ens.window_increments(4, {1.0}), std::invalid_argument);
    }
}
