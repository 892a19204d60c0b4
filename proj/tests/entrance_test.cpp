#include <doctest.h>

#include <cmath>

#include "mehler/entrance.hpp"
#include "mehler/quadrature.hpp"

using namespace mehler;

namespace {

std::shared_ptr<const SemigroupSpec> scalar_sg() {
    Eigen::MatrixXd A(1, 1);
    A << -1.0;
    return SemigroupSpec::matrix(A);
}

EntranceParams unit_params() {
    EntranceParams p;
    p.b = 1.0;
    p.alpha = 1.0;
    return p;
}

}  // namespace

TEST_SUITE("entrance") {
    TEST_CASE("scalar embedding norms in closed form") {
        auto sg = scalar_sg();
        EntranceParams p = unit_params();
        GridFunction one = zero_function(sg->space());
        one.values << 1.0;
        EntrancePath j1 = embed_J(sg, one);
        // ||J 1||~^2 = int_0^inf e^{-2s} e^{-2s} ds = 1/4
        CHECK(entrance_inner(j1, j1, p) == doctest::Approx(0.25).epsilon(1e-9));
        // U_1 J1(s) = e^{-s}/2, so the weak norm squared is 1/16
        CHECK(minus_inner(j1, j1, 1.0, p) == doctest::Approx(0.0625).epsilon(1e-7));
        CHECK(entrance_norm(j1, p) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(minus_norm(j1, 1.0, p) == doctest::Approx(0.25).epsilon(1e-7));
    }

    TEST_CASE("embedding bound and shift growth, scalar") {
        auto sg = scalar_sg();
        EntranceParams p = unit_params();
        GrowthBound gb = sg->growth();
        GridFunction x = zero_function(sg->space());
        x.values << -1.7;
        EntrancePath jx = embed_J(sg, x);
        CHECK(entrance_norm(jx, p) <= gb.c0 / std::sqrt(2.0 * (p.b - gb.b0)) * norm(x) * (1 + 1e-12));
        // b0 = -1: the shift contracts at rate e^{-t} here
        CHECK(entrance_norm(jx.shifted(0.8), p) ==
              doctest::Approx(std::exp(-0.8) * entrance_norm(jx, p)).epsilon(1e-9));
        CHECK(minus_norm(jx.shifted(0.8), 1.0, p) <=
              std::exp(p.b * 0.8) * minus_norm(jx, 1.0, p) * (1 + 1e-9));
    }

    TEST_CASE("point-mass path has the inverse square root norm trace") {
        auto sg = SemigroupSpec::heat_line(-12.0, 12.0, 481);
        EntrancePath d0 = EntrancePath::heat_atoms(sg, {{0.0, 0.0, 1.0}});
        for (double s : {0.05, 0.4, 1.1}) {
            double expect = 1.0 / (2.0 * std::sqrt(M_PI * s));
            CHECK(section_inner(d0, s, d0, s) == doctest::Approx(expect).epsilon(1e-10));
        }
        // entrance norm^2 = int_0^inf e^{-2bs} (4 pi s)^{-1/2} ds = 1/(2 sqrt(2b))
        EntranceParams p = unit_params();
        CHECK(entrance_inner(d0, d0, p) ==
              doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-6));
    }

    TEST_CASE("entrance inner agrees with direct quadrature for atom pairs") {
        auto sg = SemigroupSpec::heat_line(-12.0, 12.0, 481);
        EntranceParams p = unit_params();
        EntrancePath x = EntrancePath::heat_atoms(sg, {{-0.5, 0.0, 1.0}, {1.0, 0.0, -0.4}});
        EntrancePath y = EntrancePath::heat_atoms(sg, {{0.3, 0.0, 0.7}});
        QuadPlan plan = plan_geometric(1e-9, 30.0, 1.02, 8);
        double oracle = plan.integrate(
            [&](double s) { return std::exp(-2.0 * p.b * s) * section_inner(x, s, y, s); });
        CHECK(entrance_inner(x, y, p) == doctest::Approx(oracle).epsilon(1e-6));
    }

    TEST_CASE("closability dichotomy") {
        auto sg = SemigroupSpec::heat_line(-12.0, 12.0, 481);
        GridFunction x0 = zero_function(sg->space());
        for (int i = 0; i < x0.size(); ++i)
            x0.values[i] = std::exp(-0.5 * sg->space()->node1(i) * sg->space()->node1(i));
        ProbeReport pr = closability_probe(PathCombo::single(EntrancePath::embedded(sg, x0)));
        REQUIRE(pr.verdict == ProbeReport::Verdict::Closable);
        REQUIRE(pr.x0.has_value());
        CHECK(norm({x0.space, pr.x0->values - x0.values}) / norm(x0) < 1e-8);

        ProbeReport bad =
            closability_probe(PathCombo::single(EntrancePath::heat_atoms(sg, {{0.0, 0.0, 1.0}})));
        REQUIRE(bad.verdict == ProbeReport::Verdict::Blowup);
        for (std::size_t k = bad.ratios.size() - 4; k < bad.ratios.size(); ++k)
            CHECK(bad.ratios[k] == doctest::Approx(2.0).epsilon(0.1));
    }

    TEST_CASE("flux path blows up at the same rate") {
        auto sg = SemigroupSpec::absorbing_half_line(12.0, 480);
        ProbeReport pr =
            closability_probe(PathCombo::single(EntrancePath::absorbing_atoms(sg, 1.0, {})));
        REQUIRE(pr.verdict == ProbeReport::Verdict::Blowup);
        for (std::size_t k = pr.ratios.size() - 4; k < pr.ratios.size(); ++k)
            CHECK(pr.ratios[k] == doctest::Approx(2.0).epsilon(0.1));
    }

    TEST_CASE("local square integrability analysis") {
        auto sg = SemigroupSpec::heat_line(-12.0, 12.0, 481);
        LocalL2Report ok =
            local_l2_check(PathCombo::single(EntrancePath::heat_atoms(sg, {{0.0, 0.0, 1.0}})), 1.0);
        CHECK(ok.finite == Verdict3::Yes);
        // int_0^1 (4 pi s)^{-1/2} ds = 1/sqrt(pi)
        CHECK(ok.value == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-3));

        auto flux_sg = SemigroupSpec::absorbing_half_line(12.0, 480);
        LocalL2Report flux = local_l2_check(
            PathCombo::single(EntrancePath::absorbing_atoms(flux_sg, 1.0, {})), 1.0);
        CHECK(flux.finite == Verdict3::Yes);
        CHECK(flux.value == doctest::Approx(0.1556793377575186).epsilon(0.02));
        CHECK(flux.value < 1.0 / (2.0 * std::sqrt(M_PI)));
    }

    TEST_CASE("measure admissibility by dimension") {
        auto line = SemigroupSpec::heat_line(-12.0, 12.0, 481);
        MeasurePathResult one = from_measure_heat(line, {{0.0, 0.0, 1.0}});
        CHECK(one.report.accepted);
        CHECK(one.report.pairsum_value == doctest::Approx(1.0));
        MeasurePathResult two = from_measure_heat(line, {{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}});
        CHECK(two.report.accepted);
        CHECK(two.report.pairsum_value == doctest::Approx(3.55760156614281).epsilon(1e-12));

        auto plane = SemigroupSpec::heat_plane(-8.0, 8.0, 65);
        MeasurePathResult rejected = from_measure_heat(plane, {{0.0, 0.0, 1.0}});
        CHECK_FALSE(rejected.report.accepted);
        CHECK_FALSE(rejected.path.has_value());
    }

    TEST_CASE("nonrepresentable Cauchy sequence") {
        auto sg = SemigroupSpec::heat_line(-12.0, 12.0, 481);
        EntranceParams p = unit_params();
        std::vector<double> a;
        for (int k = 1; k <= 10; ++k) a.push_back(k);
        NonrepResult nr = nonrepresentable_example(sg, a, 10, p);
        REQUIRE(nr.path.has_value());
        REQUIRE(nr.increment_norm2.size() == 10);
        const double sq2b = std::sqrt(2.0 * p.b);
        for (int k = 0; k < 10; ++k) {
            CHECK(nr.increment_norm2[k] <= nr.increment_bound[k]);
            // closed-form dipole norm oracle at the chosen separation
            double ak = a[k];
            double oracle = ak * ak * (1.0 - std::exp(-nr.eps[k] * sq2b)) / sq2b;
            CHECK(nr.increment_norm2[k] == doctest::Approx(oracle).epsilon(0.35));
        }
        for (std::size_t k = 1; k < nr.pairsum_partial.size(); ++k)
            CHECK(nr.pairsum_partial[k] - nr.pairsum_partial[k - 1] >= 1.0);
    }

    TEST_CASE("generator path differentiates the flow") {
        auto sg = scalar_sg();
        GridFunction x = zero_function(sg->space());
        x.values << 2.0;
        EntrancePath jx = embed_J(sg, x);
        EntrancePath ax = generator_path(jx);
        // d/ds 2 e^{-s} = -2 e^{-s}
        CHECK(ax.eval(0.5).values[0] == doctest::Approx(-2.0 * std::exp(-0.5)).epsilon(1e-10));
        double fd = (jx.eval(0.5 + 1e-6).values[0] - jx.eval(0.5 - 1e-6).values[0]) / 2e-6;
        CHECK(ax.eval(0.5).values[0] == doctest::Approx(fd).epsilon(1e-6));
    }

    TEST_CASE("sampled paths interpolate and pair") {
        auto sg = scalar_sg();
        std::vector<double> times{0.1, 0.2, 0.4, 0.8, 1.6};
        std::vector<GridFunction> vals;
        for (double t : times) {
            GridFunction v = zero_function(sg->space());
            v.values << 3.0 * std::exp(-t);
            vals.push_back(v);
        }
        EntrancePath s = EntrancePath::sampled(sg, times, vals);
        CHECK(s.min_time() == doctest::Approx(0.1));
        CHECK(s.eval(0.4).values[0] == doctest::Approx(3.0 * std::exp(-0.4)).epsilon(1e-12));
        CHECK(s.eval(0.3).values[0] == doctest::Approx(3.0 * std::exp(-0.3)).epsilon(5e-3));
        CHECK_THROWS_AS((void)s.eval(0.05), std::domain_error);
    }

    TEST_CASE("pair_with recovers point evaluation for narrow sections") {
        auto sg = SemigroupSpec::heat_line(-12.0, 12.0, 481);
        EntrancePath d0 = EntrancePath::heat_atoms(sg, {{0.4, 0.0, 1.0}});
        GridFunction a = zero_function(sg->space());
        for (int i = 0; i < a.size(); ++i) {
            double x = sg->space()->node1(i);
            a.values[i] = std::cos(0.7 * x) * std::exp(-0.1 * x * x);
        }
        // s far below the grid scale: <g_s(. - 0.4), a> -> a(0.4)
        double expect = std::cos(0.7 * 0.4) * std::exp(-0.1 * 0.16);
        CHECK(d0.pair_with(a, 1e-8) == doctest::Approx(expect).epsilon(1e-6));
    }
}
