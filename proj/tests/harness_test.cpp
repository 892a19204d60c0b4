#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mehler/csv.hpp"
#include "mehler/verify.hpp"

using namespace mehler;

namespace {

std::string small_cfg_text() {
    return "semigroup.kind = matrix\n"
           "semigroup.matrix = -1 0.2; 0 -0.6\n"
           "entrance.b = 0.3\n"
           "entrance.alpha = 0.8\n"
           "law.gauss.1.sigma = 1.0\n"
           "law.gauss.1.element = vector 1 0\n"
           "law.jump.1.rate = 1.2\n"
           "law.jump.1.element = vector 0.2 0.4\n"
           "simulation.times = 0.5 1.0\n"
           "simulation.substeps = 8\n"
           "simulation.paths = 400\n"
           "simulation.seed = 21\n";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("harness") {
    TEST_CASE("full-precision formatting round-trips") {
        for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, -4.9406564584124654e-324,
                         1e300, 0.0, -0.25, 0.43233235838169365}) {
            // strtod, not stod: stod raises out_of_range on subnormal results
            CHECK(std::strtod(format_full(v).c_str(), nullptr) == v);
        }
        Table t({"a", "b"});
        t.add({cell(1.5), cell(2)});
        t.add({cell(0.1), cell(-3)});
        CHECK(t.text() == "a,b\n1.5,2\n0.10000000000000001,-3\n");
    }

    TEST_CASE("test functionals are unit, deterministic, space-adapted") {
        auto line = SemigroupSpec::heat_line(-8.0, 8.0, 161);
        std::vector<GridFunction> fs = test_functionals(line->space(), 6, 0);
        REQUIRE(fs.size() == 6);
        for (const GridFunction& f : fs) CHECK(norm(f) == doctest::Approx(1.0).epsilon(1e-9));
        std::vector<GridFunction> gs = test_functionals(line->space(), 6, 0);
        bool same = true;
        for (int i = 0; i < 6; ++i) same = same && (fs[i].values - gs[i].values).norm() == 0.0;
        CHECK(same);
        std::vector<GridFunction> hs = test_functionals(line->space(), 6, 1);
        bool moved = false;
        for (int i = 0; i < 6; ++i) moved = moved || (fs[i].values - hs[i].values).norm() > 1e-12;
        CHECK(moved);

        Eigen::MatrixXd A(2, 2);
        A << -1.0, 0.0, 0.0, -2.0;
        auto mat = SemigroupSpec::matrix(A);
        std::vector<GridFunction> ms = test_functionals(mat->space(), 4, 0);
        REQUIRE(ms.size() == 4);
        CHECK(std::abs(std::abs(ms[0].values[0]) - 1.0) < 1e-12);
        for (const GridFunction& f : ms) CHECK(norm(f) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("path battery adapts to the semigroup kind") {
        Eigen::MatrixXd A(2, 2);
        A << -1.0, 0.0, 0.0, -2.0;
        auto mat = SemigroupSpec::matrix(A);
        for (const EntrancePath& p : path_battery(mat, 5, 0))
            CHECK(p.rep() == EntrancePath::Rep::Embedded);

        auto line = SemigroupSpec::heat_line(-8.0, 8.0, 161);
        std::vector<EntrancePath> ps = path_battery(line, 8, 0);
        REQUIRE(ps.size() == 8);
        bool atoms = false;
        for (const EntrancePath& p : ps) {
            CHECK(p.min_time() == 0.0);
            atoms = atoms || p.rep() == EntrancePath::Rep::HeatAtoms;
        }
        CHECK(atoms);
    }

    TEST_CASE("verify passes on a small matrix experiment") {
        ExperimentConfig cfg = parse_config(small_cfg_text());
        VerifyReport rep = run_verify(cfg, 1);
        if (!rep.all_pass()) MESSAGE(rep.summary_text());
        CHECK(rep.all_pass());
        CHECK(rep.lines.size() > 20);

        std::istringstream in(rep.summary_text());
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            ++n;
            int tabs = 0;
            for (char c : line) tabs += c == '\t';
            CHECK(tabs == 3);
            std::string status = line.substr(line.rfind('\t') + 1);
            bool ok = status == "pass" || status == "fail";
            CHECK(ok);
            std::size_t t1 = line.find('\t');
            std::size_t t2 = line.find('\t', t1 + 1);
            CHECK_NOTHROW(std::stod(line.substr(t1 + 1, t2 - t1 - 1)));
        }
        CHECK(n == static_cast<int>(rep.lines.size()));
    }

    TEST_CASE("simulate is byte-identical across thread counts") {
        namespace fs = std::filesystem;
        fs::path root = fs::temp_directory_path() / "mehler_sim_test";
        fs::remove_all(root);
        ExperimentConfig c1 = parse_config(small_cfg_text());
        c1.sim_paths = 150;
        c1.out_dir = (root / "a").string();
        ExperimentConfig c2 = c1;
        c2.out_dir = (root / "b").string();

        SimulateResult r1 = run_simulate(c1, 1);
        SimulateResult r2 = run_simulate(c2, 3);
        REQUIRE(r1.files.size() == r2.files.size());
        REQUIRE(r1.files.size() >= 4);

        bool saw_ensemble = false;
        for (std::size_t i = 0; i < r1.files.size(); ++i) {
            std::string base = fs::path(r1.files[i]).filename().string();
            CHECK(base == fs::path(r2.files[i]).filename().string());
            if (base == "canonical.conf") {
                CHECK(slurp(r1.files[i]) == canonical_text(c1));
                continue;
            }
            saw_ensemble = saw_ensemble || base == "ensemble.csv";
            CHECK(slurp(r1.files[i]) == slurp(r2.files[i]));
        }
        CHECK(saw_ensemble);

        SimulateResult r3 = run_simulate(c1, 2);
        for (std::size_t i = 0; i < r1.files.size(); ++i)
            CHECK(slurp(r1.files[i]) == slurp(r3.files[i]));
        fs::remove_all(root);
    }
}
