#include "mehler/oupath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mehler/rng.hpp"

namespace mehler {

std::vector<double> refined_grid(const std::vector<double>& out_times, int substeps) {
    if (out_times.empty()) throw std::invalid_argument("refined_grid: no output times");
    if (substeps < 1) throw std::invalid_argument("refined_grid: substeps must be positive");
    std::vector<double> grid{0.0};
    double prev = 0.0;
    for (double t : out_times) {
        if (!(t > prev)) throw std::invalid_argument("refined_grid: output times must increase and be positive");
        double dt = (t - prev) / substeps;
        for (int k = 1; k <= substeps; ++k) grid.push_back(k == substeps ? t : prev + k * dt);
        prev = t;
    }
    return grid;
}

int grid_index_of(const std::vector<double>& grid, double t) {
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (std::abs(grid[j] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return static_cast<int>(j);
    throw std::invalid_argument("grid_index_of: time is not a grid point");
}

DriverPath simulate_driver(const IDLaw& law, const std::vector<double>& grid,
                           std::uint64_t master_seed, std::uint64_t path_index) {
    if (grid.size() < 2 || grid.front() != 0.0)
        throw std::invalid_argument("simulate_driver: grid must start at 0");
    const int dim = law.dim();
    const int n = static_cast<int>(grid.size());
    DriverPath d;
    d.times = grid;
    d.coeffs = Eigen::MatrixXd::Zero(n, dim);
    PathRng rng(master_seed, path_index);
    const int ng = static_cast<int>(law.gaussians.size());
    for (int j = 1; j < n; ++j) {
        double dt = grid[j] - grid[j - 1];
        if (!(dt > 0.0)) throw std::invalid_argument("simulate_driver: grid must increase");
        double sq = std::sqrt(dt);
        for (int i = 0; i < ng; ++i)
            d.coeffs(j, i) = d.coeffs(j - 1, i) + law.gaussians[i].sigma * sq * rng.normal();
        for (std::size_t k = 0; k < law.jumps.size(); ++k) {
            double lam = law.jumps[k].rate;
            int count = rng.poisson(lam * dt);
            d.coeffs(j, ng + static_cast<int>(k)) =
                d.coeffs(j - 1, ng + static_cast<int>(k)) + count - lam * dt;
        }
    }
    return d;
}

namespace {

void compact_terms(std::vector<OUTerm>& terms) {
    std::sort(terms.begin(), terms.end(), [](const OUTerm& a, const OUTerm& b) {
        if (a.base != b.base) return a.base < b.base;
        if (a.deriv != b.deriv) return a.deriv < b.deriv;
        return a.shift < b.shift;
    });
    std::vector<OUTerm> out;
    for (const OUTerm& t : terms) {
        if (!out.empty() && out.back().base == t.base && out.back().deriv == t.deriv &&
            std::abs(out.back().shift - t.shift) <= 1e-12) {
            out.back().weight += t.weight;
        } else {
            out.push_back(t);
        }
    }
    std::erase_if(out, [](const OUTerm& t) { return t.weight == 0.0; });
    terms = std::move(out);
}

}  // namespace

PathCombo state_combo(const OUPathRecord& rec, const OUState& st) {
    PathCombo c;
    c.parts.reserve(st.terms.size());
    for (const OUTerm& t : st.terms) {
        EntrancePath p = rec.bases.at(t.base);
        for (int d = 0; d < t.deriv; ++d) p = p.differentiated();
        if (t.shift > 0.0) p = p.shifted(t.shift);
        c.parts.emplace_back(t.weight, std::move(p));
    }
    return c;
}

OUPathRecord construct_ou(const SCSemigroupSpec& sc, const EntrancePath* x0,
                          const DriverPath& driver, const std::vector<double>& out_times,
                          int term_cap) {
    IDLaw law = lifted_law(sc);
    if (driver.coeffs.cols() != law.dim())
        throw std::invalid_argument("construct_ou: driver does not match the law");
    OUPathRecord rec;
    rec.driver = driver;
    rec.has_initial = x0 != nullptr;
    if (x0) rec.bases.push_back(*x0);
    const int base0 = rec.has_initial ? 1 : 0;
    for (const GaussDirection& g : law.gaussians) rec.bases.push_back(g.element);
    for (const JumpEntry& j : law.jumps) rec.bases.push_back(j.element);
    const int dim = law.dim();

    for (double t : out_times) {
        OUState st;
        st.time = t;
        int ti = grid_index_of(driver.times, t);
        if (rec.has_initial) st.terms.push_back({0, t, 0, 1.0});
        for (int e = 0; e < dim; ++e) {
            double c = driver.coeffs(ti, e);
            if (c != 0.0) st.terms.push_back({base0 + e, 0.0, 0, c});
        }
        for (int j = 1; j <= ti; ++j) {
            double dt = driver.times[j] - driver.times[j - 1];
            for (int e = 0; e < dim; ++e) {
                double c = driver.coeffs(j, e);
                if (c != 0.0) st.terms.push_back({base0 + e, t - driver.times[j], 1, dt * c});
            }
        }
        compact_terms(st.terms);
        rec.states.push_back(std::move(st));
    }

    for (OUState& st : rec.states) {
        if (static_cast<int>(st.terms.size()) <= term_cap) continue;
        PathCombo full = state_combo(rec, st);
        std::vector<double> times;
        for (double s = 1e-3; s < 12.0; s *= 1.3) times.push_back(s);
        times.push_back(12.0);
        std::vector<GridFunction> vals;
        vals.reserve(times.size());
        for (double s : times) vals.push_back(combo_eval(full, s));
        EntrancePath flat = EntrancePath::sampled(sc.sg, times, std::move(vals));
        double err = 0.0;
        for (double s : {0.05, 0.5, 2.0}) {
            GridFunction a = combo_eval(full, s);
            GridFunction b = flat.eval(s);
            GridFunction diff{a.space, a.values - b.values};
            err = std::max(err, norm(diff) / std::max(1.0, norm(a)));
        }
        rec.bases.push_back(std::move(flat));
        st.terms = {{static_cast<int>(rec.bases.size()) - 1, 0.0, 0, 1.0}};
        rec.flattened = true;
        rec.flatten_error = std::max(rec.flatten_error, err);
    }
    return rec;
}

OUEnsemble::OUEnsemble(const SCSemigroupSpec& sc, const EntrancePath* x0,
                       std::vector<double> out_times, int substeps, int paths, std::uint64_t seed)
    : sc_(&sc),
      law_(lifted_law(sc)),
      out_times_(std::move(out_times)),
      substeps_(substeps),
      paths_(paths),
      seed_(seed) {
    if (paths_ < 1) throw std::invalid_argument("ensemble: need at least one path");
    if (x0) x0_ = *x0;
    grid_ = refined_grid(out_times_, substeps_);
}

void OUEnsemble::run(int jobs) {
    const int n = static_cast<int>(grid_.size());
    const int dim = law_.dim();
    coeffs_.resize(paths_, n * dim);
    auto worker = [&](int lo, int hi) {
        for (int p = lo; p < hi; ++p) {
            DriverPath d = simulate_driver(law_, grid_, seed_, static_cast<std::uint64_t>(p));
            for (int j = 0; j < n; ++j)
                for (int e = 0; e < dim; ++e) coeffs_(p, j * dim + e) = d.coeffs(j, e);
        }
    };
    if (jobs <= 1) {
        worker(0, paths_);
    } else {
        std::vector<std::thread> ts;
        int chunk = (paths_ + jobs - 1) / jobs;
        for (int w = 0; w < jobs; ++w) {
            int lo = w * chunk, hi = std::min(paths_, lo + chunk);
            if (lo >= hi) break;
            ts.emplace_back(worker, lo, hi);
        }
        for (auto& t : ts) t.join();
    }
    ran_ = true;
}

bool OUEnsemble::closable_states() const {
    if (x0_ && x0_->rep() != EntrancePath::Rep::Embedded) return false;
    for (const GaussDirection& g : law_.gaussians)
        if (g.element.rep() != EntrancePath::Rep::Embedded) return false;
    for (const JumpEntry& j : law_.jumps)
        if (j.element.rep() != EntrancePath::Rep::Embedded) return false;
    return true;
}

std::vector<double> OUEnsemble::element_pairings(const GridFunction& a, bool projection,
                                                 double s0) const {
    if (projection && !closable_states())
        throw std::logic_error("ensemble: projection pairing needs closable states");
    if (!projection && !(s0 > 0.0))
        throw std::domain_error("ensemble: section pairing needs positive s0");
    std::vector<double> gamma;
    for (const GaussDirection& g : law_.gaussians)
        gamma.push_back(projection ? inner(g.element.eval(0.0), a) : g.element.pair_with(a, s0));
    for (const JumpEntry& j : law_.jumps)
        gamma.push_back(projection ? inner(j.element.eval(0.0), a) : j.element.pair_with(a, s0));
    return gamma;
}

std::vector<double> OUEnsemble::driver_pair_samples(double t, const GridFunction& a,
                                                    bool projection, double s0) const {
    if (!ran_) throw std::logic_error("ensemble: run() first");
    const int ti = grid_index_of(grid_, t);
    const int dim = law_.dim();
    std::vector<double> gamma = element_pairings(a, projection, s0);
    std::vector<double> out(paths_);
    for (int p = 0; p < paths_; ++p) {
        double acc = 0.0;
        for (int e = 0; e < dim; ++e) acc += gamma[e] * coeffs_(p, ti * dim + e);
        out[p] = acc;
    }
    return out;
}

std::vector<double> OUEnsemble::pair_samples(double t, const GridFunction& a, bool projection,
                                             double s0) const {
    if (!ran_) throw std::logic_error("ensemble: run() first");
    const int ti = grid_index_of(grid_, t);
    const int dim = law_.dim();
    auto pair_value = [&](const EntrancePath& base, double shift, int deriv) {
        EntrancePath v = deriv ? base.differentiated() : base;
        if (shift > 0.0) v = v.shifted(shift);
        return projection ? inner(v.eval(0.0), a) : v.pair_with(a, s0);
    };
    std::vector<const EntrancePath*> els;
    for (const GaussDirection& g : law_.gaussians) els.push_back(&g.element);
    for (const JumpEntry& j : law_.jumps) els.push_back(&j.element);

    double p0 = x0_ ? pair_value(*x0_, t, 0) : 0.0;
    std::vector<double> gamma = element_pairings(a, projection, s0);
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(ti + 1, dim);
    for (int j = 1; j <= ti; ++j) {
        double dt = grid_[j] - grid_[j - 1];
        for (int e = 0; e < dim; ++e)
            delta(j, e) = dt * pair_value(*els[e], grid_[ti] - grid_[j], 1);
    }
    std::vector<double> out(paths_);
    for (int p = 0; p < paths_; ++p) {
        double acc = p0;
        for (int e = 0; e < dim; ++e) acc += gamma[e] * coeffs_(p, ti * dim + e);
        for (int j = 1; j <= ti; ++j)
            for (int e = 0; e < dim; ++e) acc += delta(j, e) * coeffs_(p, j * dim + e);
        out[p] = acc;
    }
    return out;
}

std::vector<double> OUEnsemble::driver_norm2_samples(double t, const EntranceParams& p) const {
    if (!ran_) throw std::logic_error("ensemble: run() first");
    const int ti = grid_index_of(grid_, t);
    const int dim = law_.dim();
    std::vector<const EntrancePath*> els;
    for (const GaussDirection& g : law_.gaussians) els.push_back(&g.element);
    for (const JumpEntry& j : law_.jumps) els.push_back(&j.element);
    Eigen::MatrixXd gram(dim, dim);
    for (int e = 0; e < dim; ++e)
        for (int f = e; f < dim; ++f) {
            gram(e, f) = entrance_inner(*els[e], *els[f], p);
            gram(f, e) = gram(e, f);
        }
    std::vector<double> out(paths_);
    for (int pth = 0; pth < paths_; ++pth) {
        Eigen::VectorXd c(dim);
        for (int e = 0; e < dim; ++e) c[e] = coeffs_(pth, ti * dim + e);
        out[pth] = c.dot(gram * c);
    }
    return out;
}

std::vector<double> OUEnsemble::state_norm2_samples(double t) const {
    if (!ran_) throw std::logic_error("ensemble: run() first");
    if (!closable_states()) throw std::logic_error("ensemble: state norms need closable states");
    const int ti = grid_index_of(grid_, t);
    const int dim = law_.dim();
    std::vector<const EntrancePath*> els;
    for (const GaussDirection& g : law_.gaussians) els.push_back(&g.element);
    for (const JumpEntry& j : law_.jumps) els.push_back(&j.element);

    GridFunction base0 = x0_ ? (t > 0.0 ? x0_->shifted(t) : *x0_).eval(0.0)
                             : zero_function(sc_->sg->space());
    // basis vector per (grid step, element): column e at step ti, generator
    // terms dt_j (T_{t-t_j} A e)(0) at steps 1..ti
    std::vector<GridFunction> basis;
    std::vector<double> bw;
    std::vector<int> bslot;  // coeff column index ti*dim+e resp. j*dim+e
    for (int e = 0; e < dim; ++e) {
        basis.push_back(els[e]->eval(0.0));
        bw.push_back(1.0);
        bslot.push_back(ti * dim + e);
    }
    for (int j = 1; j <= ti; ++j) {
        double dt = grid_[j] - grid_[j - 1];
        for (int e = 0; e < dim; ++e) {
            EntrancePath d = els[e]->differentiated();
            double sh = grid_[ti] - grid_[j];
            basis.push_back((sh > 0.0 ? d.shifted(sh) : d).eval(0.0));
            bw.push_back(dt);
            bslot.push_back(j * dim + e);
        }
    }
    const int K = static_cast<int>(basis.size());
    Eigen::MatrixXd G(K, K);
    Eigen::VectorXd g0(K);
    for (int k = 0; k < K; ++k) {
        g0[k] = inner(base0, basis[k]);
        for (int l = k; l < K; ++l) {
            G(k, l) = inner(basis[k], basis[l]);
            G(l, k) = G(k, l);
        }
    }
    double n0 = inner(base0, base0);
    std::vector<double> out(paths_);
    Eigen::VectorXd c(K);
    for (int p = 0; p < paths_; ++p) {
        for (int k = 0; k < K; ++k) c[k] = bw[k] * coeffs_(p, bslot[k]);
        out[p] = n0 + 2.0 * g0.dot(c) + c.dot(G * c);
    }
    return out;
}

std::vector<std::vector<double>> OUEnsemble::window_increments(
    int windows, const std::vector<double>& weights) const {
    if (!ran_) throw std::logic_error("ensemble: run() first");
    if (windows < 2) throw std::invalid_argument("window_increments: need at least two windows");
    const int dim = law_.dim();
    if (static_cast<int>(weights.size()) != dim)
        throw std::invalid_argument("window_increments: one weight per law element");
    const double T = grid_.back();
    std::vector<int> bounds;
    for (int w = 0; w <= windows; ++w) {
        double target = T * w / windows;
        int best = 0;
        for (std::size_t j = 0; j < grid_.size(); ++j)
            if (std::abs(grid_[j] - target) < std::abs(grid_[best] - target))
                best = static_cast<int>(j);
        bounds.push_back(best);
    }
    std::vector<std::vector<double>> out(windows, std::vector<double>(paths_));
    for (int w = 0; w < windows; ++w) {
        int j0 = bounds[w], j1 = bounds[w + 1];
        for (int p = 0; p < paths_; ++p) {
            double acc = 0.0;
            for (int e = 0; e < dim; ++e)
                acc += weights[e] * (coeffs_(p, j1 * dim + e) - coeffs_(p, j0 * dim + e));
            out[w][p] = acc;
        }
    }
    return out;
}

OUPathRecord OUEnsemble::record(std::uint64_t path_index, int term_cap) const {
    DriverPath d = simulate_driver(law_, grid_, seed_, path_index);
    OUPathRecord rec = construct_ou(*sc_, x0_ ? &*x0_ : nullptr, d, out_times_, term_cap);
    rec.substeps = substeps_;
    return rec;
}

CharfnResult empirical_charfn(const OUEnsemble& ens, double t, const GridFunction& a,
                              bool projection, double s0) {
    if (ens.paths() < 100)
        throw std::invalid_argument("empirical_charfn: refusing to estimate from fewer than 100 samples");
    std::vector<double> pr = ens.pair_samples(t, a, projection, s0);
    std::vector<std::complex<double>> z;
    z.reserve(pr.size());
    for (double v : pr) z.emplace_back(std::cos(v), std::sin(v));
    CharfnResult r;
    r.empirical = mean_with_se(z);
    const SCSemigroupSpec& sc = ens.sc();
    if (projection) {
        GridFunction x0v = ens.initial() ? ens.initial()->embedded_value()
                                         : zero_function(sc.sg->space());
        r.analytic = std::exp(mehler_exponent(sc, t, x0v, a));
    } else {
        double drift = ens.initial() ? ens.initial()->pair_with(a, t + s0) : 0.0;
        std::complex<double> psi = sc_exponent(sc, t + s0, a) - sc_exponent(sc, s0, a);
        r.analytic = std::exp(std::complex<double>(0.0, drift) - psi);
    }
    r.se_multiples = std::abs(r.empirical.mean - r.analytic) / std::max(r.empirical.se, 1e-300);
    return r;
}

CharfnResult driver_charfn(const OUEnsemble& ens, double t, const GridFunction& a,
                           bool projection, double s0) {
    if (ens.paths() < 100)
        throw std::invalid_argument("driver_charfn: refusing to estimate from fewer than 100 samples");
    std::vector<double> pr = ens.driver_pair_samples(t, a, projection, s0);
    std::vector<std::complex<double>> z;
    z.reserve(pr.size());
    for (double v : pr) z.emplace_back(std::cos(v), std::sin(v));
    CharfnResult r;
    r.empirical = mean_with_se(z);
    std::vector<double> gamma = ens.element_pairings(a, projection, s0);
    r.analytic = std::exp(-t * psi_of_pairings(ens.law(), gamma));
    r.se_multiples = std::abs(r.empirical.mean - r.analytic) / std::max(r.empirical.se, 1e-300);
    return r;
}

MarkovResult markov_increment_check(const OUEnsemble& ens, double r, double t,
                                    const GridFunction& a, bool projection, double s0) {
    if (ens.paths() < 100)
        throw std::invalid_argument("markov_increment_check: refusing fewer than 100 samples");
    const SCSemigroupSpec& sc = ens.sc();
    std::vector<double> later = ens.pair_samples(r + t, a, projection, s0);
    std::vector<double> earlier;
    std::complex<double> analytic;
    if (projection) {
        GridFunction b = sc.sg->adjoint_apply(t, a);
        earlier = ens.pair_samples(r, b, true, s0);
        analytic = std::exp(-sc_exponent(sc, t, a));
    } else {
        earlier = ens.pair_samples(r, a, false, s0 + t);
        analytic = std::exp(-(sc_exponent(sc, s0 + t, a) - sc_exponent(sc, s0, a)));
    }
    std::vector<std::complex<double>> z;
    z.reserve(later.size());
    for (std::size_t i = 0; i < later.size(); ++i) {
        double phase = later[i] - earlier[i];
        z.emplace_back(std::cos(phase), std::sin(phase));
    }
    MarkovResult res;
    res.empirical = mean_with_se(z);
    res.analytic = analytic;
    res.se_multiples = std::abs(res.empirical.mean - analytic) / std::max(res.empirical.se, 1e-300);
    return res;
}

DriverMomentResult driver_second_moment(const OUEnsemble& ens, double t, const EntranceParams& p) {
    if (ens.paths() < 100)
        throw std::invalid_argument("driver_second_moment: refusing fewer than 100 samples");
    std::vector<double> q = ens.driver_norm2_samples(t, p);
    MeanSE m = mean_with_se_real(q);
    DriverMomentResult r;
    r.empirical = m.mean.real();
    r.se = m.se;
    const IDLaw& law = ens.law();
    double acc = 0.0;
    for (const GaussDirection& g : law.gaussians)
        acc += g.sigma * g.sigma * entrance_inner(g.element, g.element, p);
    for (const JumpEntry& j : law.jumps)
        acc += j.rate * entrance_inner(j.element, j.element, p);
    r.analytic = t * acc;
    r.se_multiples = std::abs(r.empirical - r.analytic) / std::max(r.se, 1e-300);
    return r;
}

}  // namespace mehler
