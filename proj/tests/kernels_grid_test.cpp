#include <doctest.h>

#include <cmath>

#include "mehler/grid.hpp"
#include "mehler/kernels.hpp"
#include "mehler/quadrature.hpp"

using namespace mehler;

TEST_SUITE("kernels") {
    TEST_CASE("closed-form point values") {
        CHECK(kernel_g1(1.0, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
        CHECK(kernel_g1(1.0, 1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
        CHECK(kernel_g2(1.0, 1.0, -1.0) == doctest::Approx(0.05854983152431917).epsilon(1e-14));
        CHECK(kernel_p(1.0, 1.0, 1.0) == doctest::Approx(0.3449513138882446).epsilon(1e-14));
        CHECK(kernel_p(0.7, 1.0, 0.5) == doctest::Approx(0.30326439041613514).epsilon(1e-13));
        CHECK(kernel_k(1.0, 1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
        CHECK(kernel_k(0.5, 2.0) == doctest::Approx(0.041333970708184106).epsilon(1e-13));
        CHECK(absorbing_mass(1.0, 0.5) == doctest::Approx(0.3829249225480262).epsilon(1e-14));
    }

    TEST_CASE("kernel symmetries and positivity") {
        for (double s : {0.3, 1.7}) {
            CHECK(kernel_g1(s, 0.8) == kernel_g1(s, -0.8));
            CHECK(kernel_p(s, 0.9, 1.7) == doctest::Approx(kernel_p(s, 1.7, 0.9)).epsilon(1e-14));
            CHECK(kernel_p(s, 0.9, 1.7) > 0.0);
            CHECK(kernel_p(s, 1.0, 0.0) == doctest::Approx(0.0));
            CHECK(kernel_k(s, 0.0) == doctest::Approx(0.0));
        }
    }

    TEST_CASE("time derivatives match difference quotients") {
        auto dq = [](auto f, double s) { return (f(s + 1e-6) - f(s - 1e-6)) / 2e-6; };
        for (double s : {0.4, 1.3}) {
            CHECK(kernel_g1_ds(s, 0.7) ==
                  doctest::Approx(dq([](double u) { return kernel_g1(u, 0.7); }, s)).epsilon(1e-6));
            CHECK(kernel_p_ds(s, 0.8, 1.2) ==
                  doctest::Approx(dq([](double u) { return kernel_p(u, 0.8, 1.2); }, s))
                      .epsilon(1e-6));
            CHECK(kernel_k_ds(s, 0.9) ==
                  doctest::Approx(dq([](double u) { return kernel_k(u, 0.9); }, s)).epsilon(1e-6));
        }
    }

    TEST_CASE("squared norm of the heat kernel") {
        // ||g1(s, .)||^2 = 1/(2 sqrt(pi s)), checked by grid quadrature
        auto space = SpaceSpec::line(-12.0, 12.0, 481);
        for (double s : {0.25, 1.0, 4.0}) {
            GridFunction f = zero_function(space);
            for (int i = 0; i < f.size(); ++i) f.values[i] = kernel_g1(s, space->node1(i));
            double expect = 1.0 / (2.0 * std::sqrt(M_PI * s));
            CHECK(inner(f, f) == doctest::Approx(expect).epsilon(1e-9));
        }
    }

    TEST_CASE("flux kernel time integral") {
        // int_0^inf k_s(y)^2 ds = 1/(2 pi y^2)
        for (double y : {0.5, 1.0, 2.0}) {
            QuadPlan plan = plan_geometric(1e-7 * y * y, 30000.0 * y * y, 1.08, 6);
            double acc = 0.0;
            for (std::size_t q = 0; q < plan.nodes.size(); ++q) {
                double k = kernel_k(plan.nodes[q], y);
                acc += plan.weights[q] * k * k;
            }
            CHECK(acc == doctest::Approx(1.0 / (2.0 * M_PI * y * y)).epsilon(1e-8));
        }
    }
}

TEST_SUITE("grid") {
    TEST_CASE("weights are flat cell volumes") {
        auto line = SpaceSpec::line(-2.0, 2.0, 401);
        CHECK(line->weights().sum() == doctest::Approx(401 * 0.01).epsilon(1e-12));
        auto plane = SpaceSpec::plane(-1.0, 1.0, 21);
        CHECK(plane->weights().sum() == doctest::Approx(441 * 0.01).epsilon(1e-12));
        auto fin = SpaceSpec::finite_dim(5);
        CHECK(fin->weights().sum() == doctest::Approx(5.0));
    }

    TEST_CASE("half line carries the gamma weight") {
        // gamma(dy) = (1 - e^{-y^2}) dy: total over (0, U] is U - sqrt(pi)/2 + tail
        auto hl = SpaceSpec::half_line(12.0, 480);
        double expect = 12.0 - std::sqrt(M_PI) / 2.0;
        CHECK(hl->weights().sum() == doctest::Approx(expect).epsilon(2e-3));
        CHECK(hl->node1(0) > 0.0);
    }

    TEST_CASE("plane node indexing is row major") {
        auto plane = SpaceSpec::plane(0.0, 1.0, 3);
        auto xy = plane->node2(5);
        CHECK(xy[0] == doctest::Approx(1.0));
        CHECK(xy[1] == doctest::Approx(0.5));
    }

    TEST_CASE("inner products respect weights") {
        auto line = SpaceSpec::line(0.0, 1.0, 101);
        GridFunction f = zero_function(line), g = zero_function(line);
        for (int i = 0; i < f.size(); ++i) {
            double x = line->node1(i);
            f.values[i] = x;
            g.values[i] = 1.0;
        }
        CHECK(inner(f, g) == doctest::Approx(0.505).epsilon(1e-12));
        CHECK(norm(g) == doctest::Approx(std::sqrt(1.01)).epsilon(1e-12));
    }
}
