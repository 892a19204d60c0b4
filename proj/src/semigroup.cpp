#include "mehler/semigroup.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <stdexcept>

#include "mehler/kernels.hpp"

namespace mehler {

namespace {
void check_time(double t) {
    if (!(t >= 0.0)) throw std::domain_error("semigroup: time must be nonnegative");
}
}  // namespace

const Eigen::MatrixXd& SemigroupSpec::generator_matrix() const {
    if (kind_ != Kind::Matrix) throw std::logic_error("generator_matrix: matrix kind only");
    return gen_;
}

std::shared_ptr<const SemigroupSpec> SemigroupSpec::matrix(const Eigen::MatrixXd& A,
                                                           std::optional<GrowthBound> growth) {
    if (A.rows() != A.cols() || A.rows() < 1) throw std::invalid_argument("matrix kind: square matrix required");
    auto s = std::shared_ptr<SemigroupSpec>(new SemigroupSpec);
    s->kind_ = Kind::Matrix;
    s->space_ = SpaceSpec::finite_dim(static_cast<int>(A.rows()));
    s->gen_ = A;
    if (growth) {
        s->growth_ = *growth;
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(A);
        double b0 = 0.0;
        for (int i = 0; i < A.rows(); ++i) b0 = std::max(b0, es.eigenvalues()[i].real());
        double c0 = 1.0;
        for (int k = 0; k <= 40; ++k) {
            double t = 0.25 * k;
            Eigen::MatrixXd M = (t * A).exp();
            double sv = M.jacobiSvd().singularValues()(0);
            c0 = std::max(c0, sv * std::exp(-b0 * t));
        }
        s->growth_ = {1.1 * c0, b0};
    }
    return s;
}

std::shared_ptr<const SemigroupSpec> SemigroupSpec::heat_line(double lower, double upper, int count,
                                                              std::optional<GrowthBound> growth) {
    auto s = std::shared_ptr<SemigroupSpec>(new SemigroupSpec);
    s->kind_ = Kind::HeatLine;
    s->space_ = SpaceSpec::line(lower, upper, count);
    s->growth_ = growth.value_or(GrowthBound{1.0, 0.0});
    return s;
}

std::shared_ptr<const SemigroupSpec> SemigroupSpec::heat_plane(double lower, double upper, int count,
                                                               std::optional<GrowthBound> growth) {
    auto s = std::shared_ptr<SemigroupSpec>(new SemigroupSpec);
    s->kind_ = Kind::HeatPlane;
    s->space_ = SpaceSpec::plane(lower, upper, count);
    s->growth_ = growth.value_or(GrowthBound{1.0, 0.0});
    return s;
}

std::shared_ptr<const SemigroupSpec> SemigroupSpec::absorbing_half_line(double upper, int count,
                                                                        std::optional<GrowthBound> growth) {
    auto s = std::shared_ptr<SemigroupSpec>(new SemigroupSpec);
    s->kind_ = Kind::AbsorbingHalfLine;
    s->space_ = SpaceSpec::half_line(upper, count);
    // Not a contraction in the weighted norm: short times push mass toward
    // the origin where the weight is small, measured peak about 1.03.
    s->growth_ = growth.value_or(GrowthBound{1.05, 0.0});
    return s;
}

double SemigroupSpec::grid_tolerance() const {
    switch (kind_) {
        case Kind::Matrix: return 1e-9;
        case Kind::HeatLine: return 1e-6;
        case Kind::HeatPlane: return 1e-4;
        case Kind::AbsorbingHalfLine: return 1e-4;
    }
    return 1e-6;
}

Eigen::MatrixXd SemigroupSpec::heat_line_matrix(double t, const Axis& ax) const {
    const int n = ax.count;
    const double h = ax.step();
    Eigen::VectorXd kcol(n);
    for (int d = 0; d < n; ++d) kcol[d] = kernel_g1(t, d * h) * h;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i] += kcol[std::abs(i - j)];
    Eigen::VectorXd ir = r.array().rsqrt();
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) = kcol[std::abs(i - j)] * ir[i] * ir[j];
    return S;
}

Eigen::MatrixXd SemigroupSpec::absorbing_matrix(double t) const {
    const Axis& ax = space_->axis(0);
    const int n = ax.count;
    const double h = ax.step();
    Eigen::VectorXd g(2 * n + 3);
    for (int d = 0; d < g.size(); ++d) g[d] = kernel_g1(t, d * h) * h;
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = g[std::abs(i - j)] - g[i + j + 2];
    Eigen::VectorXd r = K.rowwise().sum();
    for (int i = 0; i < n; ++i) {
        double mass = absorbing_mass(t, ax.node(i));
        double scale = r[i] > 1e-300 ? mass / r[i] : 0.0;
        K.row(i) *= scale;
    }
    return K;
}

Eigen::MatrixXd SemigroupSpec::cached_kernel(double t) const {
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        auto it = dense_cache_.find(t);
        if (it != dense_cache_.end()) return it->second;
    }
    Eigen::MatrixXd M;
    switch (kind_) {
        case Kind::Matrix: M = (t * gen_).exp(); break;
        case Kind::HeatLine:
        case Kind::HeatPlane: M = heat_line_matrix(t, space_->axis(0)); break;
        case Kind::AbsorbingHalfLine: M = absorbing_matrix(t); break;
    }
    std::lock_guard<std::mutex> lk(cache_mu_);
    if (dense_cache_.size() < 48) dense_cache_.emplace(t, M);
    return M;
}

Eigen::MatrixXd SemigroupSpec::dense_matrix(double t) const {
    check_time(t);
    const int n = space_->size();
    if (t == 0.0) return Eigen::MatrixXd::Identity(n, n);
    if (kind_ == Kind::HeatPlane)
        throw std::logic_error("dense_matrix: not available for the plane kind");
    return cached_kernel(t);
}

GridFunction SemigroupSpec::apply(double t, const GridFunction& f) const {
    check_time(t);
    if (!f.space->same_as(*space_)) throw std::invalid_argument("apply: function lives on another space");
    GridFunction out{space_, f.values};
    if (t == 0.0) return out;
    if (kind_ == Kind::HeatPlane) {
        const Axis& ax = space_->axis(0);
        const int n = ax.count;
        Eigen::MatrixXd S = cached_kernel(t);
        Eigen::Map<const Eigen::MatrixXd> V(f.values.data(), n, n);
        Eigen::MatrixXd R = S * V * S;
        out.values = Eigen::Map<const Eigen::VectorXd>(R.data(), n * n);
        return out;
    }
    out.values = dense_matrix(t) * f.values;
    return out;
}

GridFunction SemigroupSpec::adjoint_apply(double t, const GridFunction& a) const {
    check_time(t);
    if (!a.space->same_as(*space_)) throw std::invalid_argument("adjoint_apply: function lives on another space");
    switch (kind_) {
        case Kind::Matrix: {
            GridFunction out{space_, Eigen::VectorXd()};
            if (t == 0.0) { out.values = a.values; return out; }
            out.values = (t * gen_.transpose()).exp() * a.values;
            return out;
        }
        case Kind::HeatLine:
        case Kind::HeatPlane:
            // Symmetric normalization with a uniform weight: self-adjoint.
            return apply(t, a);
        case Kind::AbsorbingHalfLine: {
            GridFunction out{space_, a.values};
            if (t == 0.0) return out;
            Eigen::MatrixXd M = dense_matrix(t);
            const Eigen::VectorXd& w = space_->weights();
            out.values = (M.transpose() * (w.array() * a.values.array()).matrix()).array() / w.array();
            return out;
        }
    }
    throw std::logic_error("adjoint_apply: unreachable");
}

GridFunction SemigroupSpec::generator_apply(const GridFunction& f) const {
    if (!f.space->same_as(*space_)) throw std::invalid_argument("generator_apply: function lives on another space");
    GridFunction out = zero_function(space_);
    switch (kind_) {
        case Kind::Matrix:
            out.values = gen_ * f.values;
            return out;
        case Kind::HeatLine: {
            const int n = space_->size();
            const double ih2 = 1.0 / (2.0 * space_->step() * space_->step());
            for (int j = 0; j < n; ++j) {
                double l = j > 0 ? f.values[j - 1] : 0.0;
                double r = j + 1 < n ? f.values[j + 1] : 0.0;
                out.values[j] = (l - 2.0 * f.values[j] + r) * ih2;
            }
            return out;
        }
        case Kind::AbsorbingHalfLine: {
            const int n = space_->size();
            const double ih2 = 1.0 / (2.0 * space_->step() * space_->step());
            for (int j = 0; j < n; ++j) {
                double l = j > 0 ? f.values[j - 1] : 0.0;  // value 0 at the barrier
                double r = j + 1 < n ? f.values[j + 1] : 0.0;
                out.values[j] = (l - 2.0 * f.values[j] + r) * ih2;
            }
            return out;
        }
        case Kind::HeatPlane: {
            const Axis& ax = space_->axis(0);
            const int n = ax.count;
            const double ih2 = 1.0 / (2.0 * ax.step() * ax.step());
            auto at = [&](int i0, int i1) -> double {
                if (i0 < 0 || i0 >= n || i1 < 0 || i1 >= n) return 0.0;
                return f.values[i1 * n + i0];
            };
            for (int i1 = 0; i1 < n; ++i1)
                for (int i0 = 0; i0 < n; ++i0)
                    out.values[i1 * n + i0] =
                        (at(i0 - 1, i1) + at(i0 + 1, i1) + at(i0, i1 - 1) + at(i0, i1 + 1) -
                         4.0 * at(i0, i1)) * ih2;
            return out;
        }
    }
    throw std::logic_error("generator_apply: unreachable");
}

QuadPlan SemigroupSpec::resolvent_time_plan(double alpha) const {
    if (!(alpha > growth_.b0))
        throw std::domain_error("resolvent: alpha must exceed the growth rate b0");
    const double margin = alpha - growth_.b0;
    const double t_min = 1e-6;
    const double t_max = 40.0 / margin;
    QuadPlan head = plan_gauss(0.0, t_min, 4);
    QuadPlan body = plan_geometric(t_min, t_max, 1.5, 4);
    head.nodes.insert(head.nodes.end(), body.nodes.begin(), body.nodes.end());
    head.weights.insert(head.weights.end(), body.weights.begin(), body.weights.end());
    return head;
}

const Eigen::MatrixXd& SemigroupSpec::resolvent_matrix(double alpha) const {
    if (kind_ == Kind::HeatPlane) throw std::logic_error("resolvent_matrix: not available for the plane kind");
    {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto it = resolvent_cache_.find(alpha);
        if (it != resolvent_cache_.end()) return it->second;
    }
    QuadPlan plan = resolvent_time_plan(alpha);
    const int n = space_->size();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < plan.nodes.size(); ++q)
        R += plan.weights[q] * std::exp(-alpha * plan.nodes[q]) * dense_matrix(plan.nodes[q]);
    std::lock_guard<std::mutex> lock(cache_mu_);
    return resolvent_cache_.emplace(alpha, std::move(R)).first->second;
}

GridFunction SemigroupSpec::resolvent(double alpha, const GridFunction& f) const {
    if (!f.space->same_as(*space_)) throw std::invalid_argument("resolvent: function lives on another space");
    if (kind_ == Kind::HeatPlane) {
        QuadPlan plan = resolvent_time_plan(alpha);
        GridFunction acc = zero_function(space_);
        for (std::size_t q = 0; q < plan.nodes.size(); ++q)
            acc.values += plan.weights[q] * std::exp(-alpha * plan.nodes[q]) *
                          apply(plan.nodes[q], f).values;
        return acc;
    }
    GridFunction out{space_, resolvent_matrix(alpha) * f.values};
    return out;
}

GridFunction SemigroupSpec::resolvent_adjoint(double alpha, const GridFunction& a) const {
    if (!a.space->same_as(*space_)) throw std::invalid_argument("resolvent_adjoint: function lives on another space");
    if (kind_ == Kind::HeatPlane) return resolvent(alpha, a);
    const Eigen::MatrixXd& R = resolvent_matrix(alpha);
    const Eigen::VectorXd& w = space_->weights();
    GridFunction out{space_, (R.transpose() * (w.array() * a.values.array()).matrix()).array() / w.array()};
    return out;
}

namespace {
GridFunction start_vector(const std::shared_ptr<const SpaceSpec>& sp) {
    GridFunction v{sp, Eigen::VectorXd(sp->size())};
    for (int j = 0; j < sp->size(); ++j) v.values[j] = 1.0 + 0.37 * std::sin(1.0 + 2.1 * j);
    return v;
}
}  // namespace

double SemigroupSpec::operator_norm(double t, int iters) const {
    GridFunction v = start_vector(space_);
    v.values /= norm(v);
    double est = 0.0;
    for (int k = 0; k < iters; ++k) {
        GridFunction u = apply(t, v);
        double nu = norm(u);
        if (nu == 0.0) return 0.0;
        est = nu;
        GridFunction w = adjoint_apply(t, u);
        double nw = norm(w);
        if (nw == 0.0) return 0.0;
        w.values /= nw;
        v = std::move(w);
    }
    return est;
}

double SemigroupSpec::resolvent_norm_bound(double alpha) const {
    {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto it = resolvent_norm_cache_.find(alpha);
        if (it != resolvent_norm_cache_.end()) return it->second;
    }
    GridFunction v = start_vector(space_);
    v.values /= norm(v);
    double est = 0.0;
    for (int k = 0; k < 50; ++k) {
        GridFunction u = resolvent(alpha, v);
        double nu = norm(u);
        if (nu == 0.0) { est = 0.0; break; }
        est = nu;
        GridFunction w = resolvent_adjoint(alpha, u);
        double nw = norm(w);
        if (nw == 0.0) { est = 0.0; break; }
        w.values /= nw;
        v = std::move(w);
    }
    double bound = 1.05 * est;
    std::lock_guard<std::mutex> lock(cache_mu_);
    resolvent_norm_cache_.emplace(alpha, bound);
    return bound;
}

}  // namespace mehler
