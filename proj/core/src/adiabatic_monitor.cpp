// adiabatic_monitor.cpp — Xi in state and Lindblad-operator form

#include "adfs/adiabatic_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adfs::adiabatic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rate_scale(const OperatorSet& ops, const Matrix& heff) {
    double s = heff.norm();
    for (const auto& f : ops.lindblads) s += f.squaredNorm();
    return s > 0.0 ? s : 1.0;
}

}  // namespace

Spectral spectral_quantities(const OperatorSet& ops, const DfsDecomposition& dfs) {
    const Index m = dfs.dfs_dim();
    const Index k = dfs.comp_dim();
    const Index n = dfs.dim();
    const Matrix heff = dfs::effective_hamiltonian(ops, dfs.eigenvalues);
    Spectral s;
    s.omega = RealMatrix::Zero(k, m);
    s.gamma_comp = RealVector::Zero(k);
    for (Index c = 0; c < k; ++c) {
        const Vector& v = dfs.comp_basis.col(c);
        const double e_n = v.dot(heff * v).real();
        for (Index i = 0; i < m; ++i) {
            const Vector& u = dfs.dfs_basis.col(i);
            s.omega(c, i) = e_n - u.dot(heff * u).real();
        }
        double g = 0.0;
        for (std::size_t a = 0; a < ops.lindblads.size(); ++a) {
            const Matrix shifted = ops.lindblads[a] - dfs.eigenvalues[a] * Matrix::Identity(n, n);
            g += (shifted * v).squaredNorm();
        }
        s.gamma_comp[c] = 0.5 * g;
    }
    return s;
}

XiState xi_state(const OperatorSet& ops, const DfsDecomposition& dfs, const BasisDerivative& basis_dt) {
    XiState out;
    if (dfs.comp_dim() == 0 || dfs.dfs_dim() == 0) return out;
    const Spectral sp = spectral_quantities(ops, dfs);
    const Matrix conn = dfs.comp_basis.adjoint() * basis_dt.dfs;  // <Phi_n^perp|d_t Phi_i>
    const double tiny = 1e-14 * rate_scale(ops, dfs::effective_hamiltonian(ops, dfs.eigenvalues));
    for (Index n = 0; n < conn.rows(); ++n) {
        for (Index i = 0; i < conn.cols(); ++i) {
            const double den = std::hypot(sp.omega(n, i), sp.gamma_comp[n]);
            if (den < tiny) {
                if (!out.divergent) {
                    out.divergent = true;
                    out.n = n;
                    out.i = i;
                    out.value = kInf;
                }
                continue;
            }
            const double v = 4.0 * std::abs(conn(n, i)) / den;
            if (!out.divergent && (out.n < 0 || v > out.value)) {
                out.value = v;
                out.n = n;
                out.i = i;
            }
        }
    }
    return out;
}

XiState xi_state(const DfsPath& path, double t, DerivativeMethod method) {
    const auto at = path.decompose(t);
    const auto d = path.derivative(t, at, method);
    return xi_state(model::evaluate(path.model(), t), at, d);
}

double XiLindblad::max_value() const noexcept {
    double m = 0.0;
    for (double v : per_operator) m = std::max(m, v);
    return m;
}

double permutation_prefactor(Index comp_dim, double f_max) {
    if (comp_dim < 0) throw ArgumentError("permutation_prefactor: negative dimension");
    if (comp_dim == 0) return 1.0;
    // P_K^{a+1} = K (K-1) ... (K-a)
    double perm = 1.0;
    double power = 1.0;
    double sum = 0.0;
    for (Index a = 0; a < comp_dim; ++a) {
        perm *= static_cast<double>(comp_dim - a);
        sum += perm * power;
        power *= f_max;
    }
    return sum / static_cast<double>(comp_dim);
}

XiLindblad xi_lindblad(const OperatorSet& ops, const OperatorDerivative& d_ops, const DfsDecomposition& dfs) {
    if (d_ops.lindblads.size() != ops.lindblads.size()) {
        throw ArgumentError("xi_lindblad: derivative list does not match the Lindblad operators");
    }
    XiLindblad out;
    const std::size_t na = ops.lindblads.size();
    out.per_operator.assign(na, 0.0);
    out.f_max.assign(na, 0.0);
    out.prefactor.assign(na, 1.0);
    const Index k = dfs.comp_dim();
    const Index m = dfs.dfs_dim();
    if (k == 0 || m == 0) return out;

    const Spectral sp = spectral_quantities(ops, dfs);
    const double tiny = 1e-14 * rate_scale(ops, dfs::effective_hamiltonian(ops, dfs.eigenvalues));
    for (std::size_t a = 0; a < na; ++a) {
        const Matrix& f = ops.lindblads[a];
        const cplx c = dfs.eigenvalues[a];
        const Matrix f_comp = dfs.comp_basis.adjoint() * f * dfs.comp_basis;
        const Matrix df = dfs.comp_basis.adjoint() * d_ops.lindblads[a] * dfs.dfs_basis;
        const double f_scale = std::max(f.norm(), 1e-300);

        std::vector<cplx> gap(static_cast<std::size_t>(k));
        bool violated = false;
        for (Index n = 0; n < k; ++n) {
            gap[n] = c - f_comp(n, n);
            if (std::abs(gap[n]) < 1e-12 * f_scale) violated = true;
        }
        if (violated) {
            out.assumption_violated = true;
            out.per_operator[a] = kInf;
            continue;
        }
        double fmax = 0.0;
        for (Index n = 0; n < k; ++n) {
            for (Index l = 0; l < k; ++l) {
                if (l != n) fmax = std::max(fmax, std::abs(f_comp(n, l) / gap[n]));
            }
        }
        if (fmax < 1e-12) fmax = 0.0;
        out.f_max[a] = fmax;
        out.prefactor[a] = permutation_prefactor(k, fmax);

        double best = 0.0;
        for (Index n = 0; n < k; ++n) {
            for (Index i = 0; i < m; ++i) {
                const double den = std::hypot(sp.omega(n, i), sp.gamma_comp[n]);
                if (den < tiny) {
                    out.divergent = true;
                    best = kInf;
                    continue;
                }
                best = std::max(best, 4.0 * std::abs(df(n, i) / gap[n]) / den);
            }
        }
        out.per_operator[a] = best * out.prefactor[a];
    }
    return out;
}

AdiabaticReport report(const DfsPath& path, double t, const DfsDecomposition& at_t, DerivativeMethod method) {
    const auto ops = model::evaluate(path.model(), t);
    AdiabaticReport r;
    r.t = t;
    r.spectral = spectral_quantities(ops, at_t);
    r.xi_state = xi_state(ops, at_t, path.derivative(t, at_t, method));
    r.xi_lindblad = xi_lindblad(ops, dfs::operator_derivative(path.model(), t), at_t);
    return r;
}

}  // namespace adfs::adiabatic
