// purity_bound.cpp — boundary / integral terms of the purity lower bound

#include "adfs/adiabatic_monitor.hpp"

#include <algorithm>
#include <cmath>

namespace adfs::adiabatic {

namespace {

// X_mj = <Phi_m^perp|d_t Phi_j> / (omega_mj + i Gamma_m), stored M x (N-M) as (j, m).
Matrix x_matrix(const OperatorSet& ops, const DfsDecomposition& dfs, const BasisDerivative& d) {
    const Spectral sp = spectral_quantities(ops, dfs);
    const Matrix conn = dfs.comp_basis.adjoint() * d.dfs;
    Matrix x(dfs.dfs_dim(), dfs.comp_dim());
    for (Index j = 0; j < x.rows(); ++j) {
        for (Index m = 0; m < x.cols(); ++m) {
            x(j, m) = conn(m, j) / cplx(sp.omega(m, j), sp.gamma_comp[m]);
        }
    }
    return x;
}

Matrix x_at(const DfsPath& path, double t, const DfsDecomposition& reference, DerivativeMethod method) {
    const auto dfs = path.decompose_near(t, reference);
    return x_matrix(model::evaluate(path.model(), t), dfs, path.derivative(t, dfs, method));
}

double trapezoid(const std::vector<double>& y, double h) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) s += y[k];
    return s * h;
}

}  // namespace

BoundSample bound_sample(const DfsPath& path, double t, double x_step, DerivativeMethod method) {
    const auto ops = model::evaluate(path.model(), t);
    const auto dfs = path.decompose(t);
    const auto d = path.derivative(t, dfs, method);
    const Index m = dfs.dfs_dim();
    const Index k = dfs.comp_dim();
    const Index n = dfs.dim();

    BoundSample s;
    s.t = t;
    s.a_j = RealVector::Zero(m);
    s.b_m = RealVector::Zero(k);
    s.x_abs = RealMatrix::Zero(m, k);
    s.weighted = RealMatrix::Zero(m, k);
    s.dx_abs = RealMatrix::Zero(m, k);
    if (m == 0 || k == 0) return s;

    const Matrix dd = dfs.dfs_basis.adjoint() * d.dfs;    // <Phi_k|d_t Phi_j>
    const Matrix cd = dfs.comp_basis.adjoint() * d.dfs;   // <Phi_n^perp|d_t Phi_j>
    const Matrix cc = dfs.comp_basis.adjoint() * d.comp;  // <Phi_n^perp|d_t Phi_m^perp>
    const Matrix dc = dfs.dfs_basis.adjoint() * d.comp;   // <Phi_i|d_t Phi_n^perp>
    Matrix gamma_op = Matrix::Zero(n, n);
    for (std::size_t a = 0; a < ops.lindblads.size(); ++a) {
        const Matrix shifted = ops.lindblads[a] - dfs.eigenvalues[a] * Matrix::Identity(n, n);
        gamma_op += 0.5 * shifted.adjoint() * shifted;
    }
    const Matrix gamma_comp = dfs.comp_basis.adjoint() * gamma_op * dfs.comp_basis;

    for (Index j = 0; j < m; ++j) s.a_j[j] = dd.col(j).cwiseAbs().sum() + cd.col(j).cwiseAbs().sum();
    for (Index mm = 0; mm < k; ++mm) {
        double off = 0.0;
        for (Index nn = 0; nn < k; ++nn) {
            if (nn != mm) off += std::abs(gamma_comp(nn, mm));
        }
        s.b_m[mm] = cd.row(mm).cwiseAbs().sum() + cc.row(mm).cwiseAbs().sum() + off;
    }
    s.c_term = (dc.cwiseAbs().sum() + cd.cwiseAbs().sum()) / static_cast<double>(m);

    const Matrix x = x_matrix(ops, dfs, d);
    s.x_abs = x.cwiseAbs();
    for (Index j = 0; j < m; ++j) {
        for (Index mm = 0; mm < k; ++mm) s.weighted(j, mm) = (s.a_j[j] + s.b_m[mm] + s.c_term) * s.x_abs(j, mm);
    }

    // d_t X from neighbouring bases re-gauged onto this one
    const auto& iv = path.model().interval();
    Matrix dx;
    if (iv.contains(t - x_step) && iv.contains(t + x_step)) {
        dx = (x_at(path, t + x_step, dfs, method) - x_at(path, t - x_step, dfs, method)) / (2.0 * x_step);
    } else if (iv.contains(t + 2.0 * x_step)) {
        dx = (-3.0 * x + 4.0 * x_at(path, t + x_step, dfs, method) - x_at(path, t + 2.0 * x_step, dfs, method)) /
             (2.0 * x_step);
    } else if (iv.contains(t - 2.0 * x_step)) {
        dx = (3.0 * x - 4.0 * x_at(path, t - x_step, dfs, method) + x_at(path, t - 2.0 * x_step, dfs, method)) /
             (2.0 * x_step);
    } else {
        throw RangeError("bound_sample: interval shorter than the derivative stencil");
    }
    s.dx_abs = dx.cwiseAbs();
    s.finite = s.x_abs.allFinite() && s.weighted.allFinite() && s.dx_abs.allFinite();
    return s;
}

PurityBoundTerms purity_lower_bound(const DfsPath& path, double T, const BoundOptions& opts) {
    if (!(T > 0.0)) throw ArgumentError("purity_lower_bound: T must be positive");
    if (opts.initial_intervals < 2 || opts.max_intervals < opts.initial_intervals) {
        throw ArgumentError("purity_lower_bound: bad interval counts");
    }
    const double t0 = path.model().interval().begin;
    if (!path.model().interval().contains(t0 + T)) throw RangeError("purity_lower_bound: T exceeds the model interval");
    const double x_step = opts.x_step_fraction * T;

    Index n = opts.initial_intervals;
    std::vector<BoundSample> samples;
    samples.reserve(static_cast<std::size_t>(n + 1));
    for (Index k = 0; k <= n; ++k) {
        samples.push_back(bound_sample(path, t0 + T * static_cast<double>(k) / static_cast<double>(n), x_step, opts.method));
    }

    auto integrate = [&](RealMatrix& iw, RealMatrix& id) {
        const Index m = samples.front().x_abs.rows();
        const Index kk = samples.front().x_abs.cols();
        iw = RealMatrix::Zero(m, kk);
        id = RealMatrix::Zero(m, kk);
        const double h = T / static_cast<double>(samples.size() - 1);
        std::vector<double> y(samples.size());
        for (Index j = 0; j < m; ++j) {
            for (Index c = 0; c < kk; ++c) {
                for (std::size_t s = 0; s < samples.size(); ++s) y[s] = samples[s].weighted(j, c);
                iw(j, c) = trapezoid(y, h);
                for (std::size_t s = 0; s < samples.size(); ++s) y[s] = samples[s].dx_abs(j, c);
                id(j, c) = trapezoid(y, h);
            }
        }
        return iw.sum() + id.sum();
    };

    PurityBoundTerms out;
    out.t_final = T;
    RealMatrix iw;
    RealMatrix id;
    double total = integrate(iw, id);
    bool finite = std::isfinite(total);
    while (finite && n < opts.max_intervals) {
        std::vector<BoundSample> refined;
        refined.reserve(static_cast<std::size_t>(2 * n + 1));
        for (Index k = 0; k <= n; ++k) {
            refined.push_back(std::move(samples[static_cast<std::size_t>(k)]));
            if (k < n) {
                const double t = t0 + T * static_cast<double>(2 * k + 1) / static_cast<double>(2 * n);
                refined.push_back(bound_sample(path, t, x_step, opts.method));
            }
        }
        samples = std::move(refined);
        n *= 2;
        const double next = integrate(iw, id);
        finite = std::isfinite(next);
        const bool done = std::abs(next - total) <= opts.rel_tol * std::max(std::abs(next), 1e-300);
        total = next;
        if (done) {
            out.converged = true;
            break;
        }
    }
    if (total == 0.0) out.converged = true;
    out.intervals = n;

    const Index m = samples.front().x_abs.rows();
    const Index kk = samples.front().x_abs.cols();
    const double four_m = 4.0 * static_cast<double>(m);
    RealMatrix sup_w = RealMatrix::Zero(m, kk);
    RealMatrix sup_d = RealMatrix::Zero(m, kk);
    RealMatrix sup_x = RealMatrix::Zero(m, kk);
    out.a_j = RealVector::Zero(m);
    out.b_m = RealVector::Zero(kk);
    for (const auto& s : samples) {
        finite = finite && s.finite;
        sup_w = sup_w.cwiseMax(s.weighted);
        sup_d = sup_d.cwiseMax(s.dx_abs);
        sup_x = sup_x.cwiseMax(s.x_abs);
        out.a_j = out.a_j.cwiseMax(s.a_j);
        out.b_m = out.b_m.cwiseMax(s.b_m);
        out.c_term = std::max(out.c_term, s.c_term);
    }
    const BoundSample& last = samples.back();
    out.boundary_term = four_m * last.x_abs.sum();
    out.integral_terms = four_m * total;
    out.bound = opts.p0 - out.boundary_term - out.integral_terms;
    out.sup_deficit = four_m * (last.x_abs.sum() + T * sup_w.sum() + T * sup_d.sum());
    out.sup_bound = opts.p0 - out.sup_deficit;
    out.scaled_coefficient = out.sup_deficit * T;
    if (m > 0 && kk > 0) {
        out.diag_boundary = sup_x.maxCoeff();
        out.diag_weighted = iw.maxCoeff();
        out.diag_derivative = id.maxCoeff();
    }
    out.finite = finite && std::isfinite(out.bound) && std::isfinite(out.sup_deficit);
    return out;
}

std::vector<double> purity_bound_profile(const DfsPath& path, std::span<const double> times, const BoundOptions& opts) {
    std::vector<double> out(times.size(), opts.p0);
    if (times.empty()) return out;
    const double span_t = times.back() - times.front();
    const double x_step = opts.x_step_fraction * (span_t > 0.0 ? span_t : 1.0);
    RealMatrix cum;
    BoundSample prev;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0 && !(times[k] > times[k - 1])) throw ArgumentError("purity_bound_profile: times must increase");
        BoundSample s = bound_sample(path, times[k], x_step, opts.method);
        const RealMatrix integrand = s.weighted + s.dx_abs;
        if (k == 0) {
            cum = RealMatrix::Zero(integrand.rows(), integrand.cols());
        } else {
            cum += 0.5 * (times[k] - times[k - 1]) * (integrand + prev.weighted + prev.dx_abs);
        }
        const double four_m = 4.0 * static_cast<double>(s.x_abs.rows());
        out[k] = opts.p0 - four_m * (s.x_abs.sum() + cum.sum());
        prev = std::move(s);
    }
    return out;
}

}  // namespace adfs::adiabatic
