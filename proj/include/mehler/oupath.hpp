#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "mehler/sclaw.hpp"
#include "mehler/stats.hpp"

namespace mehler {

// Cumulative driver coefficients on a time grid: column per law element
// (Gaussian directions first, then jumps), row per grid time, row 0 zero.
// Gaussian columns accumulate sigma sqrt(dt) normals, jump columns
// compensated counts N - lambda dt.
struct DriverPath {
    std::vector<double> times;
    Eigen::MatrixXd coeffs;
};

std::vector<double> refined_grid(const std::vector<double>& out_times, int substeps);
int grid_index_of(const std::vector<double>& grid, double t);

// Draw order per step: one normal per Gaussian direction, then one Poisson
// count per jump entry; fully determined by (master_seed, path_index).
DriverPath simulate_driver(const IDLaw& law, const std::vector<double>& grid,
                           std::uint64_t master_seed, std::uint64_t path_index);

// One state of the generalized OU process: a linear combination of
// transported bases. base indexes into OUPathRecord::bases; shift transports
// along the flow; deriv applies the generator once.
struct OUTerm {
    int base = 0;
    double shift = 0.0;
    int deriv = 0;
    double weight = 0.0;
};
struct OUState {
    double time = 0.0;
    std::vector<OUTerm> terms;
};

struct OUPathRecord {
    std::vector<EntrancePath> bases;  // [0] initial path when has_initial
    bool has_initial = false;
    std::vector<OUState> states;
    DriverPath driver;
    int substeps = 1;
    bool flattened = false;
    double flatten_error = 0.0;
};

// Variation-of-constants scheme over the driver grid with right-endpoint
// Riemann evaluation of the generator term:
//   X_t = (transported initial) + Y_t + sum_{t_j <= t} Delta_j T_{t - t_j} A Y_{t_j}.
// Terms with matching base, derivative and shift merge; beyond term_cap the
// state is flattened to a sampled path and the substitution error recorded.
OUPathRecord construct_ou(const SCSemigroupSpec& sc, const EntrancePath* x0,
                          const DriverPath& driver, const std::vector<double>& out_times,
                          int term_cap = 10000);

// Materialize a state as a weighted combination of entrance paths.
PathCombo state_combo(const OUPathRecord& rec, const OUState& st);

// Monte Carlo ensemble over path indices 0..paths-1. Pairing samples are
// linear functionals of the stored driver coefficients, so per-(time,
// functional) tables are computed once and each path costs a dot product.
// Results are deterministic in (seed, paths) regardless of thread count:
// every sample lands in its path's slot.
class OUEnsemble {
  public:
    OUEnsemble(const SCSemigroupSpec& sc, const EntrancePath* x0, std::vector<double> out_times,
               int substeps, int paths, std::uint64_t seed);

    void run(int jobs = 1);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& out_times() const { return out_times_; }
    int paths() const { return paths_; }
    std::uint64_t seed() const { return seed_; }
    const IDLaw& law() const { return law_; }
    const SCSemigroupSpec& sc() const { return *sc_; }
    const EntrancePath* initial() const { return x0_ ? &*x0_ : nullptr; }
    // Projection pairings are valid when every base closes at s -> 0.
    bool closable_states() const;

    // <X_t, a> per path; projection pairs limit values, section pairs the
    // state section at s0.
    std::vector<double> pair_samples(double t, const GridFunction& a, bool projection,
                                     double s0) const;
    // <Y_t, a> per path: the accumulated driver alone, no flow or generator terms.
    std::vector<double> driver_pair_samples(double t, const GridFunction& a, bool projection,
                                            double s0) const;
    // Pairing of each law element with the functional, in catalog order.
    std::vector<double> element_pairings(const GridFunction& a, bool projection, double s0) const;
    // Squared entrance norm of the accumulated driver part at time t per path.
    std::vector<double> driver_norm2_samples(double t, const EntranceParams& p) const;
    // Squared carrier norm of the projected state at time t per path
    // (requires closable states).
    std::vector<double> state_norm2_samples(double t) const;
    // Driver increments over equal windows of [0, last], each paired with the
    // given per-element weights.
    std::vector<std::vector<double>> window_increments(int windows,
                                                       const std::vector<double>& weights) const;

    OUPathRecord record(std::uint64_t path_index, int term_cap = 10000) const;

  private:
    const SCSemigroupSpec* sc_;
    std::optional<EntrancePath> x0_;
    IDLaw law_;
    std::vector<double> out_times_;
    std::vector<double> grid_;
    int substeps_;
    int paths_;
    std::uint64_t seed_;
    Eigen::MatrixXd coeffs_;  // paths x (grid size * dim), row-major per path
    bool ran_ = false;
};

struct CharfnResult {
    MeanSE empirical;
    std::complex<double> analytic{0.0, 0.0};
    double se_multiples = 0.0;
};
// Refuses ensembles of fewer than 100 paths.
CharfnResult empirical_charfn(const OUEnsemble& ens, double t, const GridFunction& a,
                              bool projection, double s0);
// Same comparison for the driver alone against exp(-t psi(a)).
CharfnResult driver_charfn(const OUEnsemble& ens, double t, const GridFunction& a,
                           bool projection, double s0);

struct MarkovResult {
    MeanSE empirical;
    std::complex<double> analytic{0.0, 0.0};
    double se_multiples = 0.0;
};
// E exp{ i<X_{r+t}, a> - i<X_r, T_t^* a> } = exp{ -Psi_t(a) } in projection
// mode; the section analogue compares sections at s0 and s0 + t.
MarkovResult markov_increment_check(const OUEnsemble& ens, double r, double t,
                                    const GridFunction& a, bool projection, double s0);

struct DriverMomentResult {
    double empirical = 0.0;
    double se = 0.0;
    double analytic = 0.0;
    double se_multiples = 0.0;
};
DriverMomentResult driver_second_moment(const OUEnsemble& ens, double t, const EntranceParams& p);

}  // namespace mehler
