// lindblad_integrator.cpp

#include "adfs/lindblad_integrator.hpp"

#include "adfs/csv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace adfs::lindblad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_dims(const OperatorSet& ops, const Matrix& rho) {
    if (rho.rows() != ops.dim() || rho.cols() != ops.dim()) {
        throw ArgumentError("liouvillian_apply: density matrix dimension does not match operators");
    }
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix data) : data_(std::move(data)) {
    if (data_.rows() == 0 || data_.rows() != data_.cols()) throw ArgumentError("DensityMatrix: must be square");
    if (hermiticity_error(data_) > 1e-10) throw ArgumentError("DensityMatrix: not Hermitian");
    if (std::abs(data_.trace() - cplx(1.0, 0.0)) > 1e-10) throw ArgumentError("DensityMatrix: trace != 1");
    if (min_eigenvalue(data_) < -1e-8) throw ArgumentError("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
    const double n = psi.norm();
    if (!(n > 0.0)) throw ArgumentError("DensityMatrix::pure: zero vector");
    const Vector u = psi / n;
    Matrix rho = u * u.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
    if (dim < 1) throw ArgumentError("DensityMatrix::maximally_mixed: dim must be positive");
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Matrix liouvillian_apply(const OperatorSet& ops, const Matrix& rho) {
    check_dims(ops, rho);
    Matrix out = -kI * (ops.hamiltonian * rho - rho * ops.hamiltonian);
    for (const auto& f : ops.lindblads) {
        const Matrix ff = f.adjoint() * f;
        out += f * rho * f.adjoint() - 0.5 * (ff * rho + rho * ff);
    }
    return out;
}

double purity(const Matrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return (rho.cwiseProduct(rho.transpose())).sum().real();
}

double fidelity_pure(const Matrix& rho, const Vector& phi) {
    if (phi.size() != rho.rows()) throw ArgumentError("fidelity_pure: dimension mismatch");
    if (std::abs(phi.norm() - 1.0) > 1e-10) throw ArgumentError("fidelity_pure: phi must be a unit vector");
    return phi.dot(rho * phi).real();
}

std::array<double, 3> bloch(const Matrix& rho) {
    if (rho.rows() != 2 || rho.cols() != 2) throw ArgumentError("bloch: requires a 2x2 density matrix");
    // basis order (|0>, |1>); sz = |1><1| - |0><0|
    const cplx r01 = rho(0, 1);
    return {2.0 * r01.real(), -2.0 * r01.imag(), (rho(1, 1) - rho(0, 0)).real()};
}

double min_eigenvalue(const Matrix& rho) {
    if (rho.rows() == 2) {
        const double a = rho(0, 0).real();
        const double d = rho(1, 1).real();
        const cplx b = 0.5 * (rho(0, 1) + std::conj(rho(1, 0)));
        return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    }
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double TrajectoryRecord::max_trace_err() const noexcept {
    return trace_err.empty() ? 0.0 : *std::max_element(trace_err.begin(), trace_err.end());
}

double TrajectoryRecord::max_herm_err() const noexcept {
    return herm_err.empty() ? 0.0 : *std::max_element(herm_err.begin(), herm_err.end());
}

double TrajectoryRecord::min_min_eig() const noexcept {
    return min_eig.empty() ? 0.0 : *std::min_element(min_eig.begin(), min_eig.end());
}

TrajectoryRecord propagate(const SystemModel& model, const DensityMatrix& rho0, std::span<const double> t_grid,
                           const PropagateOptions& opts) {
    if (rho0.dim() != model.dim()) throw ArgumentError("propagate: initial state dimension mismatch");
    if (t_grid.empty()) throw ArgumentError("propagate: empty time grid");
    if (!(opts.dt_max > 0.0)) throw ArgumentError("propagate: dt_max must be positive");
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > t_grid[k - 1])) throw ArgumentError("propagate: time grid must be increasing");
    }

    TrajectoryRecord rec;
    const std::size_t n = t_grid.size();
    rec.times.assign(t_grid.begin(), t_grid.end());
    rec.purity.reserve(n);
    rec.trace_err.reserve(n);
    rec.herm_err.reserve(n);
    rec.min_eig.reserve(n);
    if (opts.store_states) rec.states.reserve(n);

    auto record = [&](double t, const Matrix& rho) {
        if (opts.store_states) rec.states.push_back(rho);
        rec.purity.push_back(purity(rho));
        rec.trace_err.push_back(std::abs(rho.trace() - cplx(1.0, 0.0)));
        rec.herm_err.push_back(hermiticity_error(rho));
        rec.min_eig.push_back(min_eigenvalue(rho));
        if (opts.fidelity_target) rec.fidelity.push_back(fidelity_pure(rho, opts.fidelity_target(t)));
        if (rho.rows() == 2) rec.bloch.push_back(bloch(rho));
    };

    auto rhs = [&](double t, const Matrix& rho) { return liouvillian_apply(model::evaluate(model, t), rho); };

    Matrix rho = rho0.data();
    record(t_grid[0], rho);
    for (std::size_t k = 1; k < n; ++k) {
        const double t_a = t_grid[k - 1];
        const double span = t_grid[k] - t_a;
        const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / opts.dt_max - 1e-9)));
        const double dt = span / static_cast<double>(sub);
        for (std::size_t s = 0; s < sub; ++s) {
            const double t = t_a + static_cast<double>(s) * dt;
            const Matrix k1 = rhs(t, rho);
            const Matrix k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1);
            const Matrix k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2);
            const Matrix k4 = rhs(t + dt, rho + dt * k3);
            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ++rec.steps;
            const double lam = min_eigenvalue(rho);
            if (!(lam >= -opts.positivity_tol)) {
                std::ostringstream msg;
                msg << "density matrix eigenvalue " << lam << " at t = " << t + dt << " (dt = " << dt
                    << "); reduce the time step";
                throw PositivityViolation(msg.str());
            }
        }
        record(t_grid[k], rho);
    }
    return rec;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec) {
    csv::Writer w(out);
    w.header({"t", "purity", "fidelity", "bloch_x", "bloch_y", "bloch_z", "trace_err", "herm_err", "min_eig"});
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        w << rec.times[k] << rec.purity[k] << (rec.fidelity.empty() ? kNaN : rec.fidelity[k]);
        if (rec.bloch.empty()) {
            w << kNaN << kNaN << kNaN;
        } else {
            w << rec.bloch[k][0] << rec.bloch[k][1] << rec.bloch[k][2];
        }
        w << rec.trace_err[k] << rec.herm_err[k] << rec.min_eig[k];
        w.end_row();
    }
}

RotatingFrameDiag rotating_frame_diagnostics(const OperatorSet& ops, const dfs::DfsDecomposition& dfs_t,
                                             const dfs::BasisDerivative& basis_dt,
                                             const dfs::DfsDecomposition& dfs_0, const Matrix& rho,
                                             std::span<const double> phases) {
    const Index n = dfs_t.dim();
    const Index m = dfs_t.dfs_dim();
    if (rho.rows() != n || dfs_0.dim() != n || dfs_0.dfs_dim() != m) {
        throw ArgumentError("rotating_frame_diagnostics: dimension mismatch");
    }
    if (!phases.empty() && static_cast<Index>(phases.size()) != n) {
        throw ArgumentError("rotating_frame_diagnostics: need one phase per basis vector");
    }
    Matrix b_t(n, n);
    Matrix b_0(n, n);
    Matrix db(n, n);
    b_t << dfs_t.dfs_basis, dfs_t.comp_basis;
    b_0 << dfs_0.dfs_basis, dfs_0.comp_basis;
    db << basis_dt.dfs, basis_dt.comp;
    Vector ph = Vector::Ones(n);
    for (std::size_t b = 0; b < phases.size(); ++b) ph[static_cast<Index>(b)] = std::polar(1.0, phases[b]);

    const Matrix t_op = b_0 * ph.asDiagonal() * b_t.adjoint();
    // i (d_t T) T^+ without the (block-diagonal) phase-rate part, which drops out of Tr{rho_D [G, rho_N]}
    const Matrix g_bar = t_op * (kI * b_t * db.adjoint()) * t_op.adjoint();

    RotatingFrameDiag d;
    d.rho_bar = t_op * rho * t_op.adjoint();
    const Matrix p = dfs_0.dfs_basis * dfs_0.dfs_basis.adjoint();
    const Matrix q = Matrix::Identity(n, n) - p;
    d.rho_d = p * d.rho_bar * p;
    d.rho_c = q * d.rho_bar * q;
    d.rho_n = p * d.rho_bar * q + q * d.rho_bar * p;

    const Matrix comm = g_bar * d.rho_n - d.rho_n * g_bar;
    d.coherent_leak = 2.0 * (d.rho_d * (-kI * comm)).trace().real();
    double back = 0.0;
    for (std::size_t a = 0; a < ops.lindblads.size(); ++a) {
        const Matrix f = t_op * (ops.lindblads[a] - dfs_t.eigenvalues[a] * Matrix::Identity(n, n)) * t_op.adjoint();
        back += (d.rho_d * f * d.rho_c * f.adjoint()).trace().real();
    }
    d.backflow = 2.0 * back;
    return d;
}

}  // namespace adfs::lindblad
