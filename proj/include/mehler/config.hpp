#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mehler/oupath.hpp"
#include "mehler/sclaw.hpp"

namespace mehler {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One carrier element in config syntax. Forms:
//   vector v1 v2 ...            finite-dim coefficients
//   gauss c s                   heat kernel section g1(s, . - c) on the line
//   gauss cx cy s               plane section
//   psection z s                absorbed-kernel section on the half line
//   ksection s                  boundary-flux section on the half line
//   embedded <flat form ...>    the path s -> T_s x of a flat element
//   heat_atoms z1 w1 [z2 w2 ..] kernel path seeded by line point masses
//   heat_atoms2 x1 y1 w1 [...]  plane variant (rejected at law build)
//   absorbing a [z1 w1 ...]     flux weight plus absorbed point masses
struct ElementSpec {
    std::string form;
    std::vector<double> numbers;
    std::string text() const;
};

struct LawGaussCfg {
    double sigma = 1.0;
    ElementSpec element;
};
struct LawJumpCfg {
    double rate = 1.0;
    ElementSpec element;
};

// Flat key-value experiment description (dotted section keys). Unknown keys
// are rejected; module constraints are re-validated at load time with the
// offending key named in the error.
struct ExperimentConfig {
    std::string semigroup_kind = "matrix";
    std::vector<std::vector<double>> matrix_rows{{-1.0}};
    double grid_lower = -12.0;
    double grid_upper = 12.0;
    int grid_count = 481;
    std::optional<double> growth_c0;
    std::optional<double> growth_b0;

    EntranceParams entrance;
    bool entrance_defaulted = true;  // b, alpha defaulted from the growth rate
    double tol_scale = 1.0;

    std::string law_mode = "differentiable";
    std::vector<LawGaussCfg> law_gauss;
    std::vector<LawJumpCfg> law_jumps;

    std::vector<double> sim_times{0.25, 0.5, 1.0};
    int sim_substeps = 16;
    int sim_paths = 10000;
    std::uint64_t sim_seed = 1;
    double sim_section_s0 = 0.1;
    int sim_term_cap = 10000;
    std::optional<ElementSpec> sim_initial;

    std::string out_dir = "out";
    std::string out_format = "csv";
    int out_sample_paths = 10;

    std::shared_ptr<const SemigroupSpec> make_semigroup() const;
    GridFunction make_flat_element(const std::shared_ptr<const SemigroupSpec>& sg,
                                   const ElementSpec& el, const std::string& key) const;
    EntrancePath make_path_element(const std::shared_ptr<const SemigroupSpec>& sg,
                                   const ElementSpec& el, const std::string& key) const;
    SCSemigroupSpec make_sc() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Resolved key-value form: fixed key order, full-precision numbers. Parsing
// the canonical text reproduces it byte for byte.
std::string canonical_text(const ExperimentConfig& cfg);

}  // namespace mehler
