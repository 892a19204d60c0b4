#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

namespace mehler {

enum class SpaceKind { FiniteDim, Line, Plane, HalfLine };
enum class WeightKind { Counting, Lebesgue, GammaHalfLine };

struct Axis {
    double lower = 0.0;
    double upper = 1.0;
    int count = 2;
    double step() const { return (upper - lower) / (count - 1); }
    double node(int i) const { return lower + i * step(); }
};

// Discretization carrier: either R^n with the counting weight, or a uniform
// grid with the appropriate quadrature weight baked into inner products.
// Immutable; shared between functions living on the same space.
class SpaceSpec {
  public:
    static std::shared_ptr<const SpaceSpec> finite_dim(int n);
    static std::shared_ptr<const SpaceSpec> line(double lower, double upper, int count);
    static std::shared_ptr<const SpaceSpec> plane(double lower, double upper, int count);
    static std::shared_ptr<const SpaceSpec> half_line(double upper, int count);

    SpaceKind kind() const { return kind_; }
    WeightKind weight_kind() const { return weight_; }
    int size() const { return static_cast<int>(weights_.size()); }
    int dims() const { return kind_ == SpaceKind::Plane ? 2 : 1; }
    const Axis& axis(int d) const { return axes_[d]; }
    double step() const { return axes_[0].step(); }

    // Coordinate of flat node j (1-d kinds).
    double node1(int j) const { return axes_[0].node(j); }
    // Plane: flat index j = i1 * n0 + i0.
    std::array<double, 2> node2(int j) const {
        int n0 = axes_[0].count;
        return {axes_[0].node(j % n0), axes_[1].node(j / n0)};
    }

    const Eigen::VectorXd& weights() const { return weights_; }

    bool same_as(const SpaceSpec& o) const;

  private:
    SpaceSpec() = default;
    SpaceKind kind_ = SpaceKind::FiniteDim;
    WeightKind weight_ = WeightKind::Counting;
    std::vector<Axis> axes_;
    Eigen::VectorXd weights_;
};

struct GridFunction {
    std::shared_ptr<const SpaceSpec> space;
    Eigen::VectorXd values;

    int size() const { return static_cast<int>(values.size()); }
};

GridFunction zero_function(std::shared_ptr<const SpaceSpec> space);

// Weighted inner product of the carrier space.
double inner(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);

}  // namespace mehler
