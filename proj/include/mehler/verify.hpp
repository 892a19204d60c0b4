#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mehler/config.hpp"

namespace mehler {

struct CheckLine {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<CheckLine> lines;
    bool all_pass() const;
    // One check per line: name <tab> value <tab> tolerance <tab> status.
    std::string summary_text() const;
};

// Deterministic unit-norm functionals adapted to the space: basis mixes for
// the finite-dimensional kind, kernel bumps for grid kinds.
std::vector<GridFunction> test_functionals(const std::shared_ptr<const SpaceSpec>& space, int count,
                                           std::uint64_t salt = 0);
// Deterministic battery of entrance paths adapted to the semigroup kind.
std::vector<EntrancePath> path_battery(const std::shared_ptr<const SemigroupSpec>& sg, int count,
                                       std::uint64_t salt = 0);

// Runs the check suites of every module against the configured experiment,
// in dependency order; failures do not abort later suites.
VerifyReport run_verify(const ExperimentConfig& cfg, int jobs);

struct SimulateResult {
    std::vector<std::string> files;
};
// Simulates the configured ensemble and writes the CSV outputs under
// cfg.out_dir. Byte-identical for identical (config, seed).
SimulateResult run_simulate(const ExperimentConfig& cfg, int jobs);

}  // namespace mehler
