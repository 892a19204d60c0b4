#include "mehler/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace mehler {

std::shared_ptr<const SpaceSpec> SpaceSpec::finite_dim(int n) {
    if (n < 1) throw std::invalid_argument("finite_dim: size must be positive");
    auto s = std::shared_ptr<SpaceSpec>(new SpaceSpec);
    s->kind_ = SpaceKind::FiniteDim;
    s->weight_ = WeightKind::Counting;
    s->weights_ = Eigen::VectorXd::Ones(n);
    return s;
}

std::shared_ptr<const SpaceSpec> SpaceSpec::line(double lower, double upper, int count) {
    if (count < 2 || !(upper > lower)) throw std::invalid_argument("line: bad grid");
    auto s = std::shared_ptr<SpaceSpec>(new SpaceSpec);
    s->kind_ = SpaceKind::Line;
    s->weight_ = WeightKind::Lebesgue;
    s->axes_ = {Axis{lower, upper, count}};
    s->weights_ = Eigen::VectorXd::Constant(count, s->axes_[0].step());
    return s;
}

std::shared_ptr<const SpaceSpec> SpaceSpec::plane(double lower, double upper, int count) {
    if (count < 2 || !(upper > lower)) throw std::invalid_argument("plane: bad grid");
    auto s = std::shared_ptr<SpaceSpec>(new SpaceSpec);
    s->kind_ = SpaceKind::Plane;
    s->weight_ = WeightKind::Lebesgue;
    s->axes_ = {Axis{lower, upper, count}, Axis{lower, upper, count}};
    double h = s->axes_[0].step();
    s->weights_ = Eigen::VectorXd::Constant(count * count, h * h);
    return s;
}

std::shared_ptr<const SpaceSpec> SpaceSpec::half_line(double upper, int count) {
    if (count < 2 || !(upper > 0.0)) throw std::invalid_argument("half_line: bad grid");
    auto s = std::shared_ptr<SpaceSpec>(new SpaceSpec);
    s->kind_ = SpaceKind::HalfLine;
    s->weight_ = WeightKind::GammaHalfLine;
    // First node strictly inside: the density vanishes at 0 and the gamma
    // weight kills it anyway, so start one step in.
    double h = upper / count;
    s->axes_ = {Axis{h, upper, count}};
    s->weights_.resize(count);
    for (int j = 0; j < count; ++j) {
        double y = s->axes_[0].node(j);
        s->weights_[j] = (1.0 - std::exp(-y * y)) * s->axes_[0].step();
    }
    return s;
}

bool SpaceSpec::same_as(const SpaceSpec& o) const {
    if (this == &o) return true;
    if (kind_ != o.kind_ || axes_.size() != o.axes_.size()) return false;
    if (size() != o.size()) return false;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
        if (axes_[d].lower != o.axes_[d].lower || axes_[d].upper != o.axes_[d].upper ||
            axes_[d].count != o.axes_[d].count)
            return false;
    }
    return true;
}

GridFunction zero_function(std::shared_ptr<const SpaceSpec> space) {
    GridFunction f;
    f.values = Eigen::VectorXd::Zero(space->size());
    f.space = std::move(space);
    return f;
}

double inner(const GridFunction& f, const GridFunction& g) {
    if (!f.space || !g.space || !f.space->same_as(*g.space))
        throw std::invalid_argument("inner: mismatched spaces");
    return (f.values.array() * g.values.array() * f.space->weights().array()).sum();
}

double norm(const GridFunction& f) {
    return std::sqrt(std::max(0.0, inner(f, f)));
}

}  // namespace mehler
