#include "mehler/entrance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "mehler/kernels.hpp"

namespace mehler {

namespace {
constexpr double pi = 3.14159265358979323846;

void append_plan(QuadPlan& dst, const QuadPlan& src) {
    dst.nodes.insert(dst.nodes.end(), src.nodes.begin(), src.nodes.end());
    dst.weights.insert(dst.weights.end(), src.weights.begin(), src.weights.end());
}

// Three terms of w * d/ds [ g1(s, y - z) ] on top of the base Gaussian factor.
void push_gauss_deriv_1d(GaussSum& out, double w, double z, double s) {
    const double inv2s = 1.0 / (2.0 * s);
    const double q = 1.0 / (2.0 * s * s);
    GaussTerm base;
    base.ndim = 1;
    base.coef = w / std::sqrt(2.0 * pi * s);
    base.fac[0] = {0, inv2s, z / s, -z * z * inv2s};
    GaussTerm t2 = base;
    t2.fac[0].m = 2;
    t2.coef *= q;
    GaussTerm t1 = base;
    t1.fac[0].m = 1;
    t1.coef *= -2.0 * z * q;
    GaussTerm t0 = base;
    t0.coef *= z * z * q - inv2s;
    out.push_back(t2);
    out.push_back(t1);
    out.push_back(t0);
}
}  // namespace

EntranceParams EntranceParams::defaults_for(const SemigroupSpec& sg) {
    EntranceParams p;
    const double b0 = sg.growth().b0;
    p.b = b0 + 1.0;
    p.alpha = b0 + 1.0;
    p.s_min = 1e-4;
    p.s_max = 10.0;  // margin b - b0 = 1
    p.rho = 1.1;
    p.gl_points = 4;
    return p;
}

EntrancePath EntrancePath::embedded(std::shared_ptr<const SemigroupSpec> sg, GridFunction x0) {
    if (!x0.space->same_as(*sg->space())) throw std::invalid_argument("embedded: value lives on another space");
    EntrancePath p;
    p.rep_ = Rep::Embedded;
    p.sg_ = std::move(sg);
    p.x0_ = std::move(x0);
    return p;
}

EntrancePath EntrancePath::heat_atoms(std::shared_ptr<const SemigroupSpec> sg, std::vector<Atom> atoms) {
    if (sg->kind() != SemigroupSpec::Kind::HeatLine && sg->kind() != SemigroupSpec::Kind::HeatPlane)
        throw std::invalid_argument("heat_atoms: heat kinds only");
    EntrancePath p;
    p.rep_ = Rep::HeatAtoms;
    p.sg_ = std::move(sg);
    p.atoms_ = std::move(atoms);
    return p;
}

EntrancePath EntrancePath::absorbing_atoms(std::shared_ptr<const SemigroupSpec> sg,
                                           double boundary_weight, std::vector<Atom> atoms) {
    if (sg->kind() != SemigroupSpec::Kind::AbsorbingHalfLine)
        throw std::invalid_argument("absorbing_atoms: absorbing kind only");
    for (const Atom& a : atoms)
        if (!(a.z0 > 0.0)) throw std::invalid_argument("absorbing_atoms: atoms must sit inside the half line");
    EntrancePath p;
    p.rep_ = Rep::AbsorbingAtoms;
    p.sg_ = std::move(sg);
    p.bweight_ = boundary_weight;
    p.atoms_ = std::move(atoms);
    return p;
}

EntrancePath EntrancePath::sampled(std::shared_ptr<const SemigroupSpec> sg, std::vector<double> times,
                                   std::vector<GridFunction> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("sampled: need at least two samples");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("sampled: times must increase");
    if (!(times.front() > 0.0)) throw std::invalid_argument("sampled: times must be positive");
    EntrancePath p;
    p.rep_ = Rep::Sampled;
    p.sg_ = std::move(sg);
    p.times_ = std::move(times);
    p.samples_ = std::move(values);
    return p;
}

const GridFunction& EntrancePath::embedded_value() const {
    if (rep_ != Rep::Embedded) throw std::logic_error("embedded_value: not an embedded path");
    return x0_;
}

double EntrancePath::min_time() const {
    if (rep_ == Rep::Sampled) return std::max(0.0, times_.front() - shift_);
    return 0.0;
}

bool EntrancePath::closed_form() const {
    return rep_ == Rep::HeatAtoms || rep_ == Rep::AbsorbingAtoms;
}

int EntrancePath::atom_dims() const {
    if (rep_ == Rep::HeatAtoms && sg_->kind() == SemigroupSpec::Kind::HeatPlane) return 2;
    return 1;
}

EntrancePath EntrancePath::shifted(double dt) const {
    if (!(dt >= 0.0)) throw std::domain_error("shifted: shift must be nonnegative");
    EntrancePath c = *this;
    c.shift_ += dt;
    return c;
}

EntrancePath EntrancePath::differentiated() const {
    EntrancePath c = *this;
    switch (rep_) {
        case Rep::Embedded:
            c.x0_ = sg_->generator_apply(x0_);
            c.deriv_exact_ = deriv_exact_ && sg_->kind() == SemigroupSpec::Kind::Matrix;
            return c;
        case Rep::HeatAtoms:
        case Rep::AbsorbingAtoms:
            if (deriv_ >= 1) throw std::logic_error("differentiated: kernel sections support one derivative");
            c.deriv_ = deriv_ + 1;
            return c;
        case Rep::Sampled:
            c.deriv_ = deriv_ + 1;
            c.deriv_exact_ = false;
            return c;
    }
    throw std::logic_error("differentiated: unreachable");
}

GaussSum EntrancePath::section_terms(double s) const {
    if (!closed_form()) throw std::logic_error("section_terms: kernel representations only");
    if (!(s > 0.0)) throw std::domain_error("section_terms: time must be positive");
    GaussSum out;
    const double inv2s = 1.0 / (2.0 * s);
    const double q = 1.0 / (2.0 * s * s);
    if (rep_ == Rep::HeatAtoms) {
        const int d = atom_dims();
        const double nrm = d == 1 ? 1.0 / std::sqrt(2.0 * pi * s) : 1.0 / (2.0 * pi * s);
        for (const Atom& a : atoms_) {
            if (d == 1 && deriv_ == 1) {
                push_gauss_deriv_1d(out, a.w, a.z0, s);
                continue;
            }
            GaussTerm base;
            base.ndim = d;
            base.coef = a.w * nrm;
            base.fac[0] = {0, inv2s, a.z0 / s, -a.z0 * a.z0 * inv2s};
            if (d == 2) base.fac[1] = {0, inv2s, a.z1 / s, -a.z1 * a.z1 * inv2s};
            if (deriv_ == 0) {
                out.push_back(base);
            } else {
                // d/ds g2 = g2 [ (|y - z|^2)/(2 s^2) - 1/s ]
                GaussTerm t = base;
                t.fac[0].m = 2;
                t.coef *= q;
                out.push_back(t);
                t = base;
                t.fac[0].m = 1;
                t.coef *= -2.0 * a.z0 * q;
                out.push_back(t);
                t = base;
                t.fac[1].m = 2;
                t.coef *= q;
                out.push_back(t);
                t = base;
                t.fac[1].m = 1;
                t.coef *= -2.0 * a.z1 * q;
                out.push_back(t);
                t = base;
                t.coef *= (a.z0 * a.z0 + a.z1 * a.z1) * q - 1.0 / s;
                out.push_back(t);
            }
        }
    } else {
        const double nrm = 1.0 / std::sqrt(2.0 * pi * s);
        if (bweight_ != 0.0) {
            if (deriv_ == 0) {
                GaussTerm t;
                t.ndim = 1;
                t.coef = bweight_ * nrm / s;
                t.fac[0] = {1, inv2s, 0.0, 0.0};
                out.push_back(t);
            } else {
                // d/ds k_s = g1 [ y^3/(2 s^3) - 3 y/(2 s^2) ]
                GaussTerm t;
                t.ndim = 1;
                t.fac[0] = {3, inv2s, 0.0, 0.0};
                t.coef = bweight_ * nrm / (2.0 * s * s * s);
                out.push_back(t);
                t.fac[0].m = 1;
                t.coef = -3.0 * bweight_ * nrm * q;
                out.push_back(t);
            }
        }
        for (const Atom& a : atoms_) {
            if (deriv_ == 1) {
                push_gauss_deriv_1d(out, a.w, a.z0, s);
                push_gauss_deriv_1d(out, -a.w, -a.z0, s);
                continue;
            }
            GaussTerm t;
            t.ndim = 1;
            t.coef = a.w * nrm;
            t.fac[0] = {0, inv2s, a.z0 / s, -a.z0 * a.z0 * inv2s};
            out.push_back(t);
            t.coef = -a.w * nrm;
            t.fac[0].beta = -a.z0 / s;
            out.push_back(t);
        }
    }
    return out;
}

GridFunction EntrancePath::eval(double s) const {
    const double se = s + shift_;
    switch (rep_) {
        case Rep::Embedded:
            return sg_->apply(se, x0_);
        case Rep::HeatAtoms:
        case Rep::AbsorbingAtoms: {
            GaussSum terms = section_terms(se);
            GridFunction f = zero_function(sg_->space());
            const auto& sp = *sg_->space();
            if (atom_dims() == 1) {
                for (int j = 0; j < sp.size(); ++j) {
                    double y = sp.node1(j);
                    f.values[j] = sum_eval(terms, &y);
                }
            } else {
                for (int j = 0; j < sp.size(); ++j) {
                    auto yz = sp.node2(j);
                    f.values[j] = sum_eval(terms, yz.data());
                }
            }
            return f;
        }
        case Rep::Sampled: {
            if (deriv_ == 0) return sampled_value_at(se);
            double e = std::max(1e-6, 1e-4 * se);
            double lo = std::max(times_.front(), se - e);
            double hi = se + e;
            GridFunction fp = sampled_value_at(hi);
            GridFunction fm = sampled_value_at(lo);
            GridFunction out{fp.space, (fp.values - fm.values) / (hi - lo)};
            if (deriv_ > 1) throw std::logic_error("eval: sampled paths support one derivative");
            return out;
        }
    }
    throw std::logic_error("eval: unreachable");
}

GridFunction EntrancePath::sampled_value_at(double se) const {
    if (se < times_.front() - 1e-15)
        throw std::domain_error("sampled path: not evaluable before the first sample");
    if (se >= times_.back()) return sg_->apply(se - times_.back(), samples_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), se);
    std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    if (hi == 0) hi = 1;
    std::size_t lo = hi - 1;
    double t0 = times_[lo], t1 = times_[hi];
    double u = (se - t0) / (t1 - t0);
    GridFunction out{samples_[lo].space,
                     (1.0 - u) * samples_[lo].values + u * samples_[hi].values};
    return out;
}

double EntrancePath::pair_with(const GridFunction& a, double s) const {
    if (!a.space->same_as(*sg_->space())) throw std::invalid_argument("pair_with: functional lives on another space");
    const double se = s + shift_;
    switch (rep_) {
        case Rep::Embedded:
            return inner(sg_->apply(se, x0_), a);
        case Rep::Sampled:
            return inner(eval(s), a);
        case Rep::HeatAtoms: {
            if (deriv_ > 0) return inner(eval(s), a);
            const auto& sp = *sg_->space();
            double acc = 0.0;
            for (const Atom& at : atoms_) {
                double qmass = 0.0, num = 0.0;
                if (atom_dims() == 1) {
                    for (int j = 0; j < sp.size(); ++j) {
                        double g = kernel_g1(se, sp.node1(j) - at.z0);
                        qmass += g;
                        num += g * a.values[j];
                    }
                } else {
                    for (int j = 0; j < sp.size(); ++j) {
                        auto yz = sp.node2(j);
                        double g = kernel_g2(se, yz[0] - at.z0, yz[1] - at.z1);
                        qmass += g;
                        num += g * a.values[j];
                    }
                }
                if (qmass > 1e-300) {
                    acc += at.w * num / qmass;  // analytic mass of a heat section is 1
                } else {
                    acc += at.w * a.values[nearest_node(at)];
                }
            }
            return acc;
        }
        case Rep::AbsorbingAtoms: {
            if (deriv_ > 0) return inner(eval(s), a);
            const auto& sp = *sg_->space();
            auto gamma_at = [](double y) { return 1.0 - std::exp(-y * y); };
            double acc = 0.0;
            if (bweight_ != 0.0) {
                double qmass = 0.0, num = 0.0;
                for (int j = 0; j < sp.size(); ++j) {
                    double y = sp.node1(j);
                    double k = kernel_k(se, y);
                    qmass += k;
                    num += k * a.values[j] * gamma_at(y);
                }
                // analytic flux mass 1/sqrt(2 pi s); the gamma factor makes the
                // pairing vanish at short times, so an unresolved section maps to 0
                if (qmass > 1e-300) acc += bweight_ * (num / qmass) / std::sqrt(2.0 * pi * se);
            }
            for (const Atom& at : atoms_) {
                double qmass = 0.0, num = 0.0;
                for (int j = 0; j < sp.size(); ++j) {
                    double y = sp.node1(j);
                    double p = kernel_p(se, at.z0, y);
                    qmass += p;
                    num += p * a.values[j] * gamma_at(y);
                }
                double mass = absorbing_mass(se, at.z0);
                if (qmass > 1e-300) {
                    acc += at.w * mass * num / qmass;
                } else {
                    int j = nearest_node(at);
                    acc += at.w * mass * a.values[j] * gamma_at(sp.node1(j));
                }
            }
            return acc;
        }
    }
    throw std::logic_error("pair_with: unreachable");
}

int EntrancePath::nearest_node(const Atom& at) const {
    const auto& sp = *sg_->space();
    const Axis& ax = sp.axis(0);
    auto clampi = [](int v, int lo, int hi) { return std::min(hi, std::max(lo, v)); };
    int i0 = clampi(static_cast<int>(std::lround((at.z0 - ax.lower) / ax.step())), 0, ax.count - 1);
    if (atom_dims() == 1) return i0;
    const Axis& ay = sp.axis(1);
    int i1 = clampi(static_cast<int>(std::lround((at.z1 - ay.lower) / ay.step())), 0, ay.count - 1);
    return i1 * ax.count + i0;
}

double PathCombo::min_time() const {
    double m = 0.0;
    for (const auto& [w, p] : parts) m = std::max(m, p.min_time());
    return m;
}

const std::shared_ptr<const SemigroupSpec>& PathCombo::semigroup() const {
    if (parts.empty()) throw std::logic_error("combo: empty");
    return parts.front().second.semigroup();
}

namespace {

bool closed_pair(const EntrancePath& a, const EntrancePath& b) {
    return a.closed_form() && b.closed_form() && a.rep() == b.rep() &&
           a.atom_dims() == b.atom_dims() &&
           a.semigroup()->space()->same_as(*b.semigroup()->space());
}

double closed_inner(const EntrancePath& x, double su, const EntrancePath& y, double sv) {
    GaussSum prod = sum_product(x.section_terms(su), y.section_terms(sv));
    if (x.rep() == EntrancePath::Rep::AbsorbingAtoms) return sum_integral_gamma_half(prod);
    return sum_integral_full(prod);
}

struct ComboEval {
    const PathCombo& c;
    double s;
    std::vector<std::optional<GridFunction>> cache;
    ComboEval(const PathCombo& c_, double s_) : c(c_), s(s_), cache(c_.parts.size()) {}
    const GridFunction& get(std::size_t i) {
        if (!cache[i]) cache[i] = c.parts[i].second.eval(s);
        return *cache[i];
    }
};

}  // namespace

double section_inner(const EntrancePath& x, double u, const EntrancePath& y, double v) {
    if (closed_pair(x, y)) return closed_inner(x, u + x.shift(), y, v + y.shift());
    if (!x.semigroup()->space()->same_as(*y.semigroup()->space()))
        throw std::invalid_argument("section_inner: paths live on different spaces");
    return inner(x.eval(u), y.eval(v));
}

double combo_section_inner(const PathCombo& x, double u, const PathCombo& y, double v) {
    const bool mirrored = &x == &y && u == v;
    ComboEval ex(x, u), ey(y, v);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.parts.size(); ++i) {
        std::size_t jstart = mirrored ? i : 0;
        for (std::size_t j = jstart; j < y.parts.size(); ++j) {
            const auto& [wi, pi] = x.parts[i];
            const auto& [wj, pj] = y.parts[j];
            double val;
            if (closed_pair(pi, pj))
                val = closed_inner(pi, u + pi.shift(), pj, v + pj.shift());
            else
                val = inner(ex.get(i), mirrored ? ex.get(j) : ey.get(j));
            double contrib = wi * wj * val;
            acc += (mirrored && j > i) ? 2.0 * contrib : contrib;
        }
    }
    return acc;
}

GridFunction combo_eval(const PathCombo& x, double s) {
    if (x.parts.empty()) throw std::logic_error("combo_eval: empty");
    GridFunction acc = zero_function(x.semigroup()->space());
    for (const auto& [w, p] : x.parts) acc.values += w * p.eval(s).values;
    return acc;
}

double combo_pair_with(const PathCombo& x, const GridFunction& a, double s) {
    double acc = 0.0;
    for (const auto& [w, p] : x.parts) acc += w * p.pair_with(a, s);
    return acc;
}

InnerReport entrance_inner_report(const PathCombo& x, const PathCombo& y, const EntranceParams& p) {
    const auto& sg = x.semigroup();
    const GrowthBound gb = sg->growth();
    if (!(p.b > gb.b0)) throw std::domain_error("entrance inner: b must exceed the growth rate b0");
    InnerReport r;
    auto F = [&](double s) { return std::exp(-2.0 * p.b * s) * combo_section_inner(x, s, y, s); };
    r.body = plan_geometric(p.s_min, p.s_max, p.rho, p.gl_points).integrate(F);
    if (std::max(x.min_time(), y.min_time()) <= 0.0) {
        double h32 = plan_sqrt_head(p.s_min, 32).integrate(F);
        double h16 = plan_sqrt_head(p.s_min, 16).integrate(F);
        r.head = h32;
        r.head_refine_delta = std::abs(h32 - h16);
        double scale = std::max({1e-12, std::abs(r.body), std::abs(h32)});
        r.head_resolved = r.head_refine_delta <= 1e-5 * scale;
        if (!r.head_resolved) r.note = "head integral did not stabilize under refinement";
    } else {
        r.head_resolved = false;
        r.note = "path not evaluable near 0; head omitted";
    }
    double nx2 = std::max(0.0, combo_section_inner(x, p.s_max, x, p.s_max));
    double ny2 = std::max(0.0, combo_section_inner(y, p.s_max, y, p.s_max));
    r.tail_bound = std::exp(-2.0 * p.b * p.s_max) * gb.c0 * gb.c0 * std::sqrt(nx2 * ny2) /
                   (2.0 * (p.b - gb.b0));
    r.value = r.body + r.head;
    return r;
}

double combo_entrance_inner(const PathCombo& x, const PathCombo& y, const EntranceParams& p) {
    return entrance_inner_report(x, y, p).value;
}

double entrance_inner(const EntrancePath& x, const EntrancePath& y, const EntranceParams& p) {
    return combo_entrance_inner(PathCombo::single(x), PathCombo::single(y), p);
}

double entrance_norm(const EntrancePath& x, const EntranceParams& p) {
    return std::sqrt(std::max(0.0, entrance_inner(x, x, p)));
}

namespace {

QuadPlan tau_plan(double alpha, double b0) {
    if (!(alpha > b0)) throw std::domain_error("minus inner: alpha must exceed the growth rate b0");
    QuadPlan plan = plan_sqrt_head(1e-6, 8);
    append_plan(plan, plan_geometric(1e-6, 40.0 / (alpha - b0), 1.5, 4));
    return plan;
}

bool all_heat(const PathCombo& x) {
    for (const auto& [w, p] : x.parts)
        if (p.rep() != EntrancePath::Rep::HeatAtoms) return false;
    return !x.parts.empty();
}

// Pointwise time quadrature of the resolvent along a kernel or sampled path.
GridFunction u_alpha_pointwise(const EntrancePath& p, double s, double alpha, const QuadPlan& tau) {
    GridFunction acc = zero_function(p.semigroup()->space());
    for (std::size_t q = 0; q < tau.nodes.size(); ++q)
        acc.values += tau.weights[q] * std::exp(-alpha * tau.nodes[q]) * p.eval(s + tau.nodes[q]).values;
    return acc;
}

}  // namespace

InnerReport minus_inner_report(const PathCombo& x, const PathCombo& y, double alpha,
                               const EntranceParams& p) {
    const auto& sg = x.semigroup();
    const GrowthBound gb = sg->growth();
    if (!(p.b > gb.b0)) throw std::domain_error("minus inner: b must exceed the growth rate b0");
    QuadPlan tau = tau_plan(alpha, gb.b0);

    std::function<double(double)> M;
    std::vector<std::optional<EntrancePath>> commuted_x(x.parts.size()), commuted_y(y.parts.size());
    if (all_heat(x) && all_heat(y)) {
        // Cross sections of heat kernels depend on the sum of the two times,
        // so the double Laplace integral collapses to one tau integral with a
        // triangular density.
        M = [&](double s) {
            double acc = 0.0;
            for (std::size_t q = 0; q < tau.nodes.size(); ++q) {
                double t = s + 0.5 * tau.nodes[q];
                acc += tau.weights[q] * tau.nodes[q] * std::exp(-alpha * tau.nodes[q]) *
                       combo_section_inner(x, t, y, t);
            }
            return acc;
        };
    } else {
        auto commuted = [&](const PathCombo& c, std::vector<std::optional<EntrancePath>>& slot) {
            for (std::size_t i = 0; i < c.parts.size(); ++i) {
                const EntrancePath& part = c.parts[i].second;
                if (part.rep() == EntrancePath::Rep::Embedded) {
                    GridFunction u = part.semigroup()->resolvent(alpha, part.embedded_value());
                    slot[i] = EntrancePath::embedded(part.semigroup(), std::move(u)).shifted(part.shift());
                }
            }
        };
        commuted(x, commuted_x);
        commuted(y, commuted_y);
        const bool mirrored = &x == &y;
        M = [&, mirrored](double s) {
            auto materialize = [&](const PathCombo& c, const std::vector<std::optional<EntrancePath>>& com,
                                   std::vector<GridFunction>& out) {
                out.clear();
                out.reserve(c.parts.size());
                for (std::size_t i = 0; i < c.parts.size(); ++i) {
                    if (com[i])
                        out.push_back(com[i]->eval(s));
                    else
                        out.push_back(u_alpha_pointwise(c.parts[i].second, s, alpha, tau));
                }
            };
            std::vector<GridFunction> vx, vy;
            materialize(x, commuted_x, vx);
            if (!mirrored) materialize(y, commuted_y, vy);
            const std::vector<GridFunction>& ry = mirrored ? vx : vy;
            double acc = 0.0;
            for (std::size_t i = 0; i < vx.size(); ++i)
                for (std::size_t j = mirrored ? i : 0; j < ry.size(); ++j) {
                    double contrib = x.parts[i].first * y.parts[j].first * inner(vx[i], ry[j]);
                    acc += (mirrored && j > i) ? 2.0 * contrib : contrib;
                }
            return acc;
        };
    }

    auto G = [&](double s) { return std::exp(-2.0 * p.b * s) * M(s); };
    const double s_lo = std::max(1e-3, p.s_min);
    InnerReport r;
    r.body = plan_geometric(s_lo, p.s_max, std::max(1.5, p.rho), 4).integrate(G);
    double h8 = plan_gauss(0.0, s_lo, 8).integrate(G);
    double h4 = plan_gauss(0.0, s_lo, 4).integrate(G);
    r.head = h8;
    r.head_refine_delta = std::abs(h8 - h4);
    double scale = std::max({1e-12, std::abs(r.body), std::abs(h8)});
    r.head_resolved = r.head_refine_delta <= 1e-4 * scale;
    r.value = r.body + r.head;
    double unorm = sg->resolvent_norm_bound(alpha);
    double nx2 = std::max(0.0, combo_section_inner(x, p.s_max, x, p.s_max));
    double ny2 = std::max(0.0, combo_section_inner(y, p.s_max, y, p.s_max));
    r.tail_bound = std::exp(-2.0 * p.b * p.s_max) * gb.c0 * gb.c0 * unorm * unorm *
                   std::sqrt(nx2 * ny2) / (2.0 * (p.b - gb.b0));
    return r;
}

double combo_minus_inner(const PathCombo& x, const PathCombo& y, double alpha,
                         const EntranceParams& p) {
    return minus_inner_report(x, y, alpha, p).value;
}

double minus_inner(const EntrancePath& x, const EntrancePath& y, double alpha,
                   const EntranceParams& p) {
    return combo_minus_inner(PathCombo::single(x), PathCombo::single(y), alpha, p);
}

double minus_norm(const EntrancePath& x, double alpha, const EntranceParams& p) {
    PathCombo c = PathCombo::single(x);
    return std::sqrt(std::max(0.0, combo_minus_inner(c, c, alpha, p)));
}

EntrancePath embed_J(std::shared_ptr<const SemigroupSpec> sg, GridFunction x) {
    return EntrancePath::embedded(std::move(sg), std::move(x));
}

EntrancePath generator_path(const EntrancePath& x) {
    return x.differentiated();
}

LocalL2Report local_l2_check(const PathCombo& x, double l) {
    if (!(l > 0.0)) throw std::domain_error("local_l2_check: horizon must be positive");
    LocalL2Report r;
    const int K = 15;
    const double mt = x.min_time();
    auto F = [&](double s) { return combo_section_inner(x, s, x, s); };
    for (int k = 0; k < K; ++k) {
        double hi = l * std::pow(4.0, -k);
        double lo = 0.25 * hi;
        if (lo < mt) {
            r.note = "head truncated: path not evaluable below its sample range";
            break;
        }
        r.increments.push_back(plan_geometric(lo, hi, 1.45, 6).integrate(F));
    }
    for (std::size_t k = 0; k + 1 < r.increments.size(); ++k) {
        double d = r.increments[k];
        r.ratios.push_back(std::abs(d) > 1e-300 ? r.increments[k + 1] / d : 0.0);
    }
    double total = 0.0;
    for (double d : r.increments) total += d;
    if (r.ratios.size() >= 4) {
        bool shrink = true, grow = true;
        for (std::size_t k = r.ratios.size() - 4; k < r.ratios.size(); ++k) {
            shrink = shrink && r.ratios[k] <= 0.9;
            grow = grow && r.ratios[k] >= 0.97;
        }
        if (shrink) {
            r.finite = Verdict3::Yes;
            double rb = 0.0;
            for (std::size_t k = r.ratios.size() - 4; k < r.ratios.size(); ++k)
                rb = std::max(rb, r.ratios[k]);
            total += r.increments.back() * rb / (1.0 - rb);
        } else if (grow) {
            r.finite = Verdict3::No;
            if (r.note.empty()) r.note = "head increments do not decay";
        }
    }
    r.value = total;
    return r;
}

ProbeReport closability_probe(const PathCombo& x, std::vector<double> s_probe) {
    ProbeReport r;
    if (s_probe.empty())
        for (int j = 0; j <= 12; ++j) s_probe.push_back(0.5 * std::pow(4.0, -j));
    std::sort(s_probe.begin(), s_probe.end(), std::greater<double>());
    const double mt = x.min_time();
    std::vector<double> probes;
    for (double s : s_probe)
        if (s >= mt && s > 0.0) probes.push_back(s);
    if (probes.size() < 4) {
        r.note = "fewer than four usable probes";
        r.s_probe = std::move(probes);
        return r;
    }
    r.s_probe = probes;
    const std::size_t n = probes.size();
    r.norm2.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        r.norm2[j] = combo_section_inner(x, probes[j], x, probes[j]);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        double cross = combo_section_inner(x, probes[j], x, probes[j + 1]);
        r.diff2.push_back(std::max(0.0, r.norm2[j] + r.norm2[j + 1] - 2.0 * cross));
        r.ratios.push_back(std::abs(r.norm2[j]) > 1e-300 ? r.norm2[j + 1] / r.norm2[j] : 0.0);
    }
    bool blowup = true;
    for (std::size_t j = r.ratios.size() - 4; j < r.ratios.size(); ++j)
        blowup = blowup && r.ratios[j] >= 1.5;
    if (blowup) {
        r.verdict = ProbeReport::Verdict::Blowup;
        r.note = "squared norm grows by 1.5 or more per probe over the last four probes";
        return r;
    }
    const double scale2 = std::max(1.0, std::abs(r.norm2.back()));
    const double cauchy_tol = 2e-6;
    const std::size_t m = r.diff2.size();
    bool cauchy = r.diff2[m - 1] <= cauchy_tol * cauchy_tol * scale2 &&
                  r.diff2[m - 1] <= r.diff2[m - 4] + 1e-300;
    if (!cauchy) {
        r.note = "successive differences fail the Cauchy test";
        return r;
    }
    const auto& sg = x.semigroup();
    GridFunction x0 = combo_eval(x, probes.back());
    double cert_tol = (1e-5 + 20.0 * sg->grid_tolerance()) * std::sqrt(scale2);
    bool certified = true;
    for (double s : probes) {
        GridFunction back = sg->apply(s, x0);
        GridFunction here = combo_eval(x, s);
        GridFunction diff{here.space, here.values - back.values};
        double c = norm(diff);
        r.cert.push_back(c);
        certified = certified && c <= cert_tol;
    }
    if (!certified) {
        r.note = "limit candidate does not reproduce the path along the probes";
        return r;
    }
    r.verdict = ProbeReport::Verdict::Closable;
    r.x0 = std::move(x0);
    return r;
}

MeasurePathResult from_measure_heat(std::shared_ptr<const SemigroupSpec> sg,
                                    std::vector<Atom> atoms) {
    MeasurePathResult out;
    EntrancePath path = EntrancePath::heat_atoms(sg, atoms);
    const int d = path.atom_dims();
    LocalL2Report l2 = local_l2_check(PathCombo::single(path), 1.0);
    double pairsum = 0.0;
    for (const Atom& a : atoms)
        for (const Atom& b : atoms) {
            double dz0 = a.z0 - b.z0, dz1 = d == 2 ? a.z1 - b.z1 : 0.0;
            pairsum += a.w * b.w * std::exp(-(dz0 * dz0 + dz1 * dz1) / 4.0);
        }
    out.report.integral_finite = l2.finite;
    out.report.integral_value = l2.value;
    out.report.pairsum_value = pairsum;
    out.report.accepted = l2.finite == Verdict3::Yes;
    if (out.report.accepted) {
        out.report.detail = "local square integrability holds; pair sum finite";
        out.path = std::move(path);
    } else if (d == 2 && !atoms.empty()) {
        out.report.detail =
            "rejected: squared sections of plane atoms integrate like 1/s near 0, "
            "so the local integral diverges even though the pair sum is finite";
    } else {
        out.report.detail = "rejected: local square integrability quadrature did not converge";
    }
    return out;
}

MeasurePathResult from_measure_absorbing(std::shared_ptr<const SemigroupSpec> sg,
                                         double boundary_weight, std::vector<Atom> atoms) {
    MeasurePathResult out;
    EntrancePath path = EntrancePath::absorbing_atoms(sg, boundary_weight, atoms);
    LocalL2Report l2 = local_l2_check(PathCombo::single(path), 1.0);
    GaussSum sec = path.section_terms(1.0);
    double pairsum = sum_integral_gamma_half(sum_product(sec, sec));
    out.report.integral_finite = l2.finite;
    out.report.integral_value = l2.value;
    out.report.pairsum_value = pairsum;
    out.report.accepted = l2.finite == Verdict3::Yes;
    out.report.detail = out.report.accepted
                            ? "local square integrability holds in the weighted norm"
                            : "rejected: local square integrability quadrature did not converge";
    if (out.report.accepted) out.path = std::move(path);
    return out;
}

NonrepResult nonrepresentable_example(std::shared_ptr<const SemigroupSpec> sg,
                                      const std::vector<double>& a_seq, int n,
                                      const EntranceParams& p) {
    if (sg->kind() != SemigroupSpec::Kind::HeatLine)
        throw std::invalid_argument("nonrepresentable_example: heat line kind only");
    if (n < 1 || static_cast<int>(a_seq.size()) < n)
        throw std::invalid_argument("nonrepresentable_example: need n positive weights");
    NonrepResult r;
    const double sq2b = std::sqrt(2.0 * p.b);
    auto closed_q = [&](double a, double eps) {
        return a * a * (1.0 - std::exp(-eps * sq2b)) / sq2b;
    };
    std::vector<Atom> atoms;
    for (int k = 1; k <= n; ++k) {
        double a = a_seq[k - 1];
        if (!(a > 0.0)) throw std::invalid_argument("nonrepresentable_example: weights must be positive");
        double xk = 1.0 / k;
        double cap = 0.999 / (static_cast<double>(k) * k);
        double target = 0.9 * std::pow(2.0, -(k + 1));
        double eps;
        if (closed_q(a, cap) <= target) {
            eps = cap;
        } else {
            double lo = 0.0, hi = cap;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                (closed_q(a, mid) <= target ? lo : hi) = mid;
            }
            eps = lo;
        }
        r.eps.push_back(eps);
        r.increment_bound.push_back(std::pow(2.0, -(k + 1)));
        EntrancePath inc = EntrancePath::heat_atoms(sg, {Atom{xk, 0.0, a}, Atom{xk + eps, 0.0, -a}});
        r.increment_norm2.push_back(entrance_inner(inc, inc, p));
        atoms.push_back(Atom{xk, 0.0, a});
        atoms.push_back(Atom{xk + eps, 0.0, -a});
        double s = 0.0;
        for (const Atom& ai : atoms)
            for (const Atom& aj : atoms) {
                double dz = ai.z0 - aj.z0;
                s += std::abs(ai.w) * std::abs(aj.w) * std::exp(-dz * dz / 4.0);
            }
        r.pairsum_partial.push_back(s);
    }
    r.tail_bound = std::pow(2.0, -(n + 1));
    r.path = EntrancePath::heat_atoms(sg, std::move(atoms));
    return r;
}

}  // namespace mehler
