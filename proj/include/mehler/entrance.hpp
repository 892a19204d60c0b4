#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mehler/gauss_terms.hpp"
#include "mehler/grid.hpp"
#include "mehler/semigroup.hpp"

namespace mehler {

// Quadrature profile for entrance-space inner products
// <x, y>_~ = int_0^inf e^{-2 b s} <x(s), y(s)> ds, with b above the growth
// rate of the semigroup.
struct EntranceParams {
    double b = 1.0;
    double alpha = 1.0;  // resolvent parameter of the weak norm
    double s_min = 1e-4;
    double s_max = 10.0;
    double rho = 1.1;
    int gl_points = 4;

    static EntranceParams defaults_for(const SemigroupSpec& sg);
};

// Point mass location and weight; z1 ignored in one dimension.
struct Atom {
    double z0 = 0.0;
    double z1 = 0.0;
    double w = 0.0;
};

// A path s -> x(s) in the carrier space, s > 0, satisfying the semigroup
// consistency T_t x(s) = x(s + t) up to discretization. Four representations:
//   Embedded        T_s x0 for an explicit x0 (closable by construction)
//   HeatAtoms       sum of heat kernel sections seeded by point masses
//   AbsorbingAtoms  boundary flux section plus absorbed-kernel sections
//   Sampled         tabulated values, interpolated in s
// Kernel representations keep closed forms for sections, derivatives and
// pairings; shifting and one application of the generator stay inside the
// family.
class EntrancePath {
  public:
    enum class Rep { Embedded, HeatAtoms, AbsorbingAtoms, Sampled };

    static EntrancePath embedded(std::shared_ptr<const SemigroupSpec> sg, GridFunction x0);
    static EntrancePath heat_atoms(std::shared_ptr<const SemigroupSpec> sg, std::vector<Atom> atoms);
    static EntrancePath absorbing_atoms(std::shared_ptr<const SemigroupSpec> sg,
                                        double boundary_weight, std::vector<Atom> atoms);
    static EntrancePath sampled(std::shared_ptr<const SemigroupSpec> sg, std::vector<double> times,
                                std::vector<GridFunction> values);

    Rep rep() const { return rep_; }
    const std::shared_ptr<const SemigroupSpec>& semigroup() const { return sg_; }
    double shift() const { return shift_; }
    int deriv() const { return deriv_; }
    bool deriv_exact() const { return deriv_exact_; }
    const GridFunction& embedded_value() const;
    const std::vector<Atom>& atoms() const { return atoms_; }
    double boundary_weight() const { return bweight_; }

    // Path is only evaluable for s >= min_time (0 except for Sampled).
    double min_time() const;
    // Closed-form section algebra available.
    bool closed_form() const;
    int atom_dims() const;

    EntrancePath shifted(double dt) const;
    // One application of the generator along the path. Exact for kernel
    // representations and matrix-kind embedded values; grid-kind embedded
    // values use the discrete Laplacian, sampled paths a difference quotient.
    EntrancePath differentiated() const;

    GridFunction eval(double s) const;
    // <x(s), a> against a grid function. Kernel sections narrower than the
    // grid are paired by mass normalization: quadrature against a is scaled
    // by the analytic section mass over the discrete one, which recovers the
    // pointwise limit as s -> 0. Derivative sections pair by raw quadrature.
    double pair_with(const GridFunction& a, double s) const;

    // Closed section as polynomial-Gaussian terms at absolute time s.
    GaussSum section_terms(double s) const;

  private:
    EntrancePath() = default;
    GridFunction sampled_value_at(double se) const;
    int nearest_node(const Atom& at) const;

    Rep rep_ = Rep::Embedded;
    std::shared_ptr<const SemigroupSpec> sg_;
    double shift_ = 0.0;
    int deriv_ = 0;
    bool deriv_exact_ = true;
    GridFunction x0_;
    std::vector<Atom> atoms_;
    double bweight_ = 0.0;
    std::vector<double> times_;
    std::vector<GridFunction> samples_;
};

// Weighted combination of paths; the common currency for states built from
// several sources (initial value, noise sections, generator terms).
struct PathCombo {
    std::vector<std::pair<double, EntrancePath>> parts;

    static PathCombo single(EntrancePath p) {
        PathCombo c;
        c.parts.emplace_back(1.0, std::move(p));
        return c;
    }
    double min_time() const;
    const std::shared_ptr<const SemigroupSpec>& semigroup() const;
};

// <x(u), y(v)> in the carrier space; closed form when both sides carry kernel
// sections of the same family, grid evaluation otherwise.
double section_inner(const EntrancePath& x, double u, const EntrancePath& y, double v);
double combo_section_inner(const PathCombo& x, double u, const PathCombo& y, double v);
GridFunction combo_eval(const PathCombo& x, double s);
double combo_pair_with(const PathCombo& x, const GridFunction& a, double s);

struct InnerReport {
    double value = 0.0;
    double body = 0.0;
    double head = 0.0;
    bool head_resolved = true;
    double head_refine_delta = 0.0;
    double tail_bound = 0.0;
    std::string note;
};

InnerReport entrance_inner_report(const PathCombo& x, const PathCombo& y, const EntranceParams& p);
double entrance_inner(const EntrancePath& x, const EntrancePath& y, const EntranceParams& p);
double entrance_norm(const EntrancePath& x, const EntranceParams& p);
double combo_entrance_inner(const PathCombo& x, const PathCombo& y, const EntranceParams& p);

// Weak inner product <U_alpha x(s), U_alpha y(s)> integrated with the same
// exponential weight. Routes: heat kernel pairs contract the double Laplace
// integral to one dimension because their cross sections depend on the sum
// of the two times; embedded parts commute the resolvent with the flow;
// remaining kernel parts quadrature the resolvent pointwise in time, which
// stays exact in the section algebra and only discretizes the final inner.
InnerReport minus_inner_report(const PathCombo& x, const PathCombo& y, double alpha,
                               const EntranceParams& p);
double minus_inner(const EntrancePath& x, const EntrancePath& y, double alpha,
                   const EntranceParams& p);
double minus_norm(const EntrancePath& x, double alpha, const EntranceParams& p);
double combo_minus_inner(const PathCombo& x, const PathCombo& y, double alpha,
                         const EntranceParams& p);

// Embed a carrier element as the path s -> T_s x.
EntrancePath embed_J(std::shared_ptr<const SemigroupSpec> sg, GridFunction x);

// Derivative path along the flow.
EntrancePath generator_path(const EntrancePath& x);

enum class Verdict3 { Yes, No, Unknown };

struct LocalL2Report {
    Verdict3 finite = Verdict3::Unknown;
    double value = 0.0;
    std::vector<double> increments;  // dyadic-in-4 head increments, coarse to fine
    std::vector<double> ratios;
    std::string note;
};
// int_0^l ||x(s)||^2 ds with head analysis by increment ratios.
LocalL2Report local_l2_check(const PathCombo& x, double l);

struct ProbeReport {
    enum class Verdict { Closable, Blowup, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    std::optional<GridFunction> x0;
    std::vector<double> s_probe;
    std::vector<double> norm2;
    std::vector<double> diff2;
    std::vector<double> ratios;
    std::vector<double> cert;
    std::string note;
};
// Shrinks s toward 0 along probes, watching the squared norm trace. Verdicts:
// Closable when successive differences pass a Cauchy test and the candidate
// limit reproduces the path along the probes; Blowup when the squared norm
// grows by at least 1.5 per probe over the last four probes.
ProbeReport closability_probe(const PathCombo& x, std::vector<double> s_probe = {});

struct MeasureReport {
    bool accepted = false;
    Verdict3 integral_finite = Verdict3::Unknown;
    double integral_value = 0.0;
    double pairsum_value = 0.0;
    std::string detail;
};
struct MeasurePathResult {
    std::optional<EntrancePath> path;
    MeasureReport report;
};

// Admissibility of an atomic seed measure: the local square-integrability
// quadrature must agree with the closed-form pair sum criterion.
MeasurePathResult from_measure_heat(std::shared_ptr<const SemigroupSpec> sg,
                                    std::vector<Atom> atoms);
MeasurePathResult from_measure_absorbing(std::shared_ptr<const SemigroupSpec> sg,
                                         double boundary_weight, std::vector<Atom> atoms);

struct NonrepResult {
    std::optional<EntrancePath> path;  // partial sum path
    std::vector<double> eps;
    std::vector<double> increment_norm2;
    std::vector<double> increment_bound;
    std::vector<double> pairsum_partial;
    double tail_bound = 0.0;
};
// Cauchy sequence of atomic paths whose increments shrink geometrically in
// the entrance norm while the pair-sum admissibility functional of the
// total-variation measure grows without bound: the limit leaves the family
// representable by finite measures. a_seq supplies the atom weights.
NonrepResult nonrepresentable_example(std::shared_ptr<const SemigroupSpec> sg,
                                      const std::vector<double>& a_seq, int n,
                                      const EntranceParams& p);

}  // namespace mehler
