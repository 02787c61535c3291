// sta_synthesis.cpp

#include "adfs/sta_synthesis.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace adfs::sta {

namespace {

Matrix polar_unitary(const Matrix& u) {
    Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

StaFields counterdiabatic_block(const OperatorSet& ops, const DfsDecomposition& dfs, const BasisDerivative& basis_dt) {
    const Index n = dfs.dim();
    StaFields f;
    f.offdiag_target = kI * (dfs.comp_basis.adjoint() * basis_dt.dfs);
    const Matrix lower = dfs.comp_basis * f.offdiag_target * dfs.dfs_basis.adjoint();  // Q H1 P
    f.h1 = lower + lower.adjoint();
    if (f.h1.rows() == 0) f.h1 = Matrix::Zero(n, n);
    f.h_total = ops.hamiltonian + f.h1;
    return f;
}

StaFields counterdiabatic_block(const DfsPath& path, double t, DerivativeMethod method, std::optional<double> h,
                                const DfsBlockHook& h_d) {
    const auto dfs = path.decompose(t);
    const auto d = path.derivative(t, dfs, method, h);
    StaFields f = counterdiabatic_block(model::evaluate(path.model(), t), dfs, d);
    if (h_d) {
        const Matrix block = h_d(t, dfs);
        if (block.rows() != dfs.dim() || block.cols() != dfs.dim()) {
            throw ArgumentError("counterdiabatic_block: H_D hook returned the wrong dimension");
        }
        const Matrix pd = dfs.proj_dfs * (0.5 * (block + block.adjoint())) * dfs.proj_dfs;
        f.h1 += pd;
        f.h_total += pd;
    }
    return f;
}

double verify_sta(const OperatorSet& ops, const DfsDecomposition& dfs, const BasisDerivative& basis_dt) {
    if (dfs.comp_dim() == 0 || dfs.dfs_dim() == 0) return 0.0;
    const Matrix heff = dfs::effective_hamiltonian(ops, dfs.eigenvalues);
    const Matrix lhs = dfs.comp_basis.adjoint() * heff * dfs.dfs_basis;
    const Matrix rhs = kI * (dfs.comp_basis.adjoint() * basis_dt.dfs);
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

model::SystemModel with_counterdiabatic(const DfsPath& path, DerivativeMethod method, DfsBlockHook h_d) {
    DfsPath copy = path;
    auto extra = [copy, method, h_d](double t) {
        const auto f = counterdiabatic_block(copy, t, method, std::nullopt, h_d);
        return f.h1;
    };
    return path.model().with_added_hamiltonian(extra);
}

TransportUnitary transport_unitary(const DfsPath& path, std::span<const double> times, double dt_max,
                                   DerivativeMethod method) {
    if (times.empty()) throw ArgumentError("transport_unitary: empty time grid");
    if (!(dt_max > 0.0)) throw ArgumentError("transport_unitary: dt_max must be positive");
    const auto& model = path.model();
    const Index n = model.dim();

    TransportUnitary out;
    out.times.assign(times.begin(), times.end());
    const auto bases = path.sample(times);
    const DfsDecomposition& start = bases.front();

    auto generator = [&](double t, const DfsDecomposition& ref) {
        const auto ops = model::evaluate(model, t);
        const auto dfs = path.decompose_near(t, ref);
        return dfs::effective_hamiltonian(ops, dfs.eigenvalues);
    };
    auto record = [&](std::size_t k, const Matrix& u) {
        const DfsDecomposition& b = bases[k];
        out.u.push_back(u);
        const Matrix c = b.dfs_basis.adjoint() * u * start.dfs_basis;
        out.coeffs.push_back(c);
        const Index m = c.rows();
        out.max_coeff_unitarity_err =
            std::max(out.max_coeff_unitarity_err, (c * c.adjoint() - Matrix::Identity(m, m)).norm());
        const auto ops = model::evaluate(model, times[k]);
        out.max_generator_residual =
            std::max(out.max_generator_residual, verify_sta(ops, b, path.derivative(times[k], b, method)));
    };

    Matrix u = Matrix::Identity(n, n);
    record(0, u);
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw ArgumentError("transport_unitary: times must increase");
        const double span = times[k] - times[k - 1];
        const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_max - 1e-9)));
        const double dt = span / static_cast<double>(sub);
        const DfsDecomposition& ref = bases[k - 1];
        for (std::size_t s = 0; s < sub; ++s) {
            const double t = times[k - 1] + static_cast<double>(s) * dt;
            const Matrix h0 = generator(t, ref);
            const Matrix hm = generator(t + 0.5 * dt, ref);
            const Matrix h1 = generator(t + dt, ref);
            const Matrix k1 = -kI * (h0 * u);
            const Matrix k2 = -kI * (hm * (u + 0.5 * dt * k1));
            const Matrix k3 = -kI * (hm * (u + 0.5 * dt * k2));
            const Matrix k4 = -kI * (h1 * (u + dt * k3));
            u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double drift = (u.adjoint() * u - Matrix::Identity(n, n)).norm();
            out.max_unitarity_err = std::max(out.max_unitarity_err, drift);
            if (drift > 1e-6) {
                std::ostringstream msg;
                msg << "transport unitary lost unitarity (" << drift << ") at t = " << t + dt
                    << "; reduce the step";
                throw StepSizeError(msg.str());
            }
            u = polar_unitary(u);
        }
        record(k, u);
    }
    return out;
}

}  // namespace adfs::sta
