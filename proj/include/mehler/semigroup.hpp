#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "mehler/grid.hpp"
#include "mehler/quadrature.hpp"

namespace mehler {

// Exponential growth envelope ||T_t|| <= c0 exp(b0 t).
struct GrowthBound {
    double c0 = 1.0;
    double b0 = 0.0;
};

// A strongly continuous semigroup on a discretized carrier space. Grid kinds
// apply a quadrature discretization of the transition kernel, normalized so
// that mass and symmetry survive discretization; the matrix kind exponentiates
// a generator matrix exactly.
class SemigroupSpec : public std::enable_shared_from_this<SemigroupSpec> {
  public:
    enum class Kind { Matrix, HeatLine, HeatPlane, AbsorbingHalfLine };

    static std::shared_ptr<const SemigroupSpec> matrix(const Eigen::MatrixXd& A,
                                                       std::optional<GrowthBound> growth = {});
    static std::shared_ptr<const SemigroupSpec> heat_line(double lower, double upper, int count,
                                                          std::optional<GrowthBound> growth = {});
    static std::shared_ptr<const SemigroupSpec> heat_plane(double lower, double upper, int count,
                                                           std::optional<GrowthBound> growth = {});
    static std::shared_ptr<const SemigroupSpec> absorbing_half_line(double upper, int count,
                                                                    std::optional<GrowthBound> growth = {});

    Kind kind() const { return kind_; }
    const std::shared_ptr<const SpaceSpec>& space() const { return space_; }
    GrowthBound growth() const { return growth_; }
    // Matrix kind only.
    const Eigen::MatrixXd& generator_matrix() const;

    // Calibrated ceiling for discretization residuals of this kind; checks
    // against analytic identities are scored in multiples of this.
    double grid_tolerance() const;

    GridFunction apply(double t, const GridFunction& f) const;
    GridFunction adjoint_apply(double t, const GridFunction& a) const;
    GridFunction generator_apply(const GridFunction& f) const;

    // Laplace transform of the orbit, by time quadrature. alpha must exceed
    // the growth rate b0.
    GridFunction resolvent(double alpha, const GridFunction& f) const;
    GridFunction resolvent_adjoint(double alpha, const GridFunction& a) const;

    // Dense representation of apply(t, .); not available for the plane kind.
    Eigen::MatrixXd dense_matrix(double t) const;
    // Cached dense resolvent; not available for the plane kind.
    const Eigen::MatrixXd& resolvent_matrix(double alpha) const;

    // Power-iteration estimate of the operator norm in the carrier norm.
    double operator_norm(double t, int iters = 30) const;
    // Cached upper estimate of ||U_alpha||, padded by 5 percent.
    double resolvent_norm_bound(double alpha) const;

    QuadPlan resolvent_time_plan(double alpha) const;

  private:
    SemigroupSpec() = default;

    Eigen::MatrixXd heat_line_matrix(double t, const Axis& ax) const;
    Eigen::MatrixXd absorbing_matrix(double t) const;
    // Dense action at time t (line factor for the plane kind), memoized:
    // quadrature plans revisit the same times across whole batteries.
    Eigen::MatrixXd cached_kernel(double t) const;

    Kind kind_ = Kind::Matrix;
    std::shared_ptr<const SpaceSpec> space_;
    Eigen::MatrixXd gen_;
    GrowthBound growth_;

    mutable std::mutex cache_mu_;
    mutable std::map<double, Eigen::MatrixXd> resolvent_cache_;
    mutable std::map<double, double> resolvent_norm_cache_;
    mutable std::map<double, Eigen::MatrixXd> dense_cache_;
};

}  // namespace mehler
