#include <doctest.h>

#include <functional>
#include <string>

#include "mehler/config.hpp"

using namespace mehler;

namespace {

std::string base_cfg() {
    return "semigroup.kind = matrix\n"
           "semigroup.matrix = -1\n"
           "law.gauss.1.sigma = 1.0\n"
           "law.gauss.1.element = vector 1\n"
           "simulation.times = 0.5 1.0\n"
           "simulation.paths = 100\n";
}

bool fails_mentioning(const std::string& text, const std::string& needle) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("minimal config parses with defaults") {
        ExperimentConfig cfg = parse_config(base_cfg());
        CHECK(cfg.semigroup_kind == "matrix");
        REQUIRE(cfg.matrix_rows.size() == 1);
        CHECK(cfg.matrix_rows[0][0] == -1.0);
        CHECK(cfg.law_gauss.size() == 1);
        CHECK(cfg.sim_times == std::vector<double>{0.5, 1.0});
        CHECK(cfg.sim_paths == 100);
        CHECK(cfg.out_format == "csv");
        CHECK(cfg.entrance_defaulted);
        CHECK(cfg.entrance.b > -1.0);
    }

    TEST_CASE("canonical text reparses byte for byte") {
        ExperimentConfig cfg = parse_config(base_cfg());
        std::string one = canonical_text(cfg);
        ExperimentConfig again = parse_config(one);
        CHECK(canonical_text(again) == one);

        std::string rich =
            "semigroup.kind = heat_line\n"
            "semigroup.grid.lower = -9.5\n"
            "semigroup.grid.upper = 9.5\n"
            "semigroup.grid.count = 191\n"
            "entrance.b = 0.75\n"
            "entrance.alpha = 1.25\n"
            "law.mode = entrance_driven\n"
            "law.gauss.1.element = heat_atoms 0.25 1.0\n"
            "law.jump.1.rate = 1.5\n"
            "law.jump.1.element = heat_atoms -1 0.5 1 0.5\n"
            "simulation.times = 0.5\n"
            "simulation.seed = 12345\n";
        ExperimentConfig rcfg = parse_config(rich);
        CHECK_FALSE(rcfg.entrance_defaulted);
        std::string rc = canonical_text(rcfg);
        CHECK(canonical_text(parse_config(rc)) == rc);
    }

    TEST_CASE("comments, blanks and semicolon matrix rows") {
        std::string text =
            "# top comment\n"
            "semigroup.kind = matrix\n"
            "\n"
            "semigroup.matrix = -1 0.3; 0 -0.7   # upper triangular\n"
            "law.gauss.1.element = vector 1 0\n";
        ExperimentConfig cfg = parse_config(text);
        REQUIRE(cfg.matrix_rows.size() == 2);
        CHECK(cfg.matrix_rows[0][1] == 0.3);
        CHECK(cfg.matrix_rows[1][1] == -0.7);
    }

    TEST_CASE("embedded gaussian directions are stored at unit norm") {
        std::string text =
            "semigroup.kind = matrix\n"
            "semigroup.matrix = -1\n"
            "law.gauss.1.sigma = 3.0\n"
            "law.gauss.1.element = vector 2\n";
        SCSemigroupSpec sc = parse_config(text).make_sc();
        REQUIRE(sc.law.gaussians.size() == 1);
        CHECK(sc.law.gaussians[0].sigma == doctest::Approx(6.0).epsilon(1e-15));
        CHECK(sc.law.gaussians[0].element.embedded_value().values[0] ==
              doctest::Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("structural rejects") {
        CHECK(fails_mentioning(base_cfg() + "simulation.paths = 7\n", "duplicate key"));
        CHECK(fails_mentioning(base_cfg() + "simulation.velocity = 3\n", "unknown key"));
        CHECK(fails_mentioning(base_cfg() + "law.jump.3.rate = 1\nlaw.jump.3.element = vector 1\n",
                               "unknown key"));
        CHECK(fails_mentioning(base_cfg() + "just some words\n", "malformed line"));
        CHECK(fails_mentioning(base_cfg() + "= 3\n", "empty key"));
        CHECK(fails_mentioning(base_cfg() + "semigroup.grid.lower = -4\n", "not applicable"));
        CHECK(fails_mentioning("semigroup.kind = rotor\n", "unknown kind"));
    }

    TEST_CASE("value rejects name the offending key") {
        CHECK(fails_mentioning(base_cfg() + "entrance.b = -1.5\n", "entrance.b"));
        CHECK(fails_mentioning(base_cfg() + "entrance.alpha = -2\n", "entrance.alpha"));
        CHECK(fails_mentioning(base_cfg() + "outputs.format = json\n", "outputs.format"));
        std::string bad_sigma = base_cfg();
        bad_sigma.replace(bad_sigma.find("1.0"), 3, "0.0");
        CHECK(fails_mentioning(bad_sigma, "law.gauss.1.sigma"));
        CHECK(fails_mentioning(base_cfg() + "law.jump.1.rate = -1\nlaw.jump.1.element = vector 1\n",
                               "law.jump.1.rate"));
        CHECK(fails_mentioning(base_cfg() + "simulation.substeps = 0\n", "simulation.substeps"));
        CHECK(fails_mentioning(base_cfg() + "simulation.section_s0 = 0\n", "simulation.section_s0"));
        CHECK(fails_mentioning(base_cfg() + "simulation.term_cap = 5\n", "simulation.term_cap"));
        CHECK(fails_mentioning("semigroup.kind = heat_line\nsemigroup.grid.count = 1\n",
                               "semigroup.grid.count"));
        CHECK(fails_mentioning(
            "semigroup.kind = matrix\nsemigroup.matrix = -1 0.3; 0\nlaw.gauss.1.element = vector 1 0\n",
            "square"));
    }

    TEST_CASE("number parsing is strict") {
        CHECK(fails_mentioning(base_cfg() + "entrance.rho = 1.2x\n", "not a number"));
        std::string fp_paths = base_cfg();
        fp_paths.replace(fp_paths.find("simulation.paths = 100"), 22, "simulation.paths = 10.5");
        CHECK(fails_mentioning(fp_paths, "not an integer"));
        CHECK(fails_mentioning(base_cfg() + "simulation.seed = -3\n", "non-negative"));
        std::string bad_time = base_cfg();
        bad_time.replace(bad_time.find("0.5 1.0"), 7, "1.0 0.5");
        CHECK(fails_mentioning(bad_time, "simulation.times"));
    }

    TEST_CASE("element and mode compatibility") {
        std::string driven =
            "semigroup.kind = heat_line\n"
            "law.mode = entrance_driven\n";
        CHECK(fails_mentioning(driven + "law.gauss.1.element = gauss 0 1\n",
                               "prefix with 'embedded'"));
        CHECK(fails_mentioning(driven + "law.gauss.1.element = heat_atoms2 0 0 1\n",
                               "square integrable"));
        CHECK_NOTHROW(parse_config(driven + "law.gauss.1.element = embedded gauss 0 1\n"));

        CHECK(fails_mentioning(base_cfg() + "law.jump.1.element = heat_atoms 0 1\n",
                               "differentiable mode takes flat elements"));
        CHECK(fails_mentioning(base_cfg() + "simulation.initial = heat_atoms 0 1\n",
                               "simulation.initial"));

        std::string on_line = "semigroup.kind = heat_line\n";
        CHECK(fails_mentioning(on_line + "law.gauss.1.element = vector 1\n",
                               "vector elements need the matrix kind"));
        CHECK(fails_mentioning(on_line + "law.gauss.1.element = gauss 0 0 1\n",
                               "gauss arity"));
        CHECK(fails_mentioning(on_line + "law.gauss.1.element = psection 1 0.5\n",
                               "psection needs the absorbing kind"));
        CHECK(fails_mentioning(base_cfg() + "law.gauss.2.element = vector 0\n",
                               "zero direction"));

        std::string two =
            "semigroup.kind = matrix\n"
            "semigroup.matrix = -1 0; 0 -1\n"
            "law.gauss.1.element = vector 1 0\n";
        CHECK(fails_mentioning(two + "law.gauss.2.element = vector 0.9 0.1\n",
                               "must be orthogonal"));
        CHECK_NOTHROW(parse_config(two + "law.gauss.2.element = vector 0 1\n"));
    }

    TEST_CASE("missing config file is reported") {
        CHECK_THROWS_AS(load_config("/nonexistent/path.conf"), ConfigError);
    }
}
