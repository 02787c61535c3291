// dfs_analysis.cpp — common eigenspaces, effective Hamiltonian, DFS conditions

#include "adfs/dfs_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adfs::dfs {

namespace {

struct PartialSpace {
    Matrix basis;  // N x k orthonormal
    std::vector<cplx> values;
    bool defective{false};
};

double operator_scale(const Matrix& f) { return f.norm(); }

// Groups eigenvalues whose mutual distance is below tol; returns index groups
// in a deterministic order (descending real part, then imaginary part).
std::vector<std::vector<Index>> cluster_eigenvalues(const Vector& values, double tol) {
    std::vector<Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
        return values[a].imag() > values[b].imag();
    });
    std::vector<std::vector<Index>> groups;
    std::vector<bool> used(order.size(), false);
    for (std::size_t p = 0; p < order.size(); ++p) {
        if (used[p]) continue;
        std::vector<Index> group{order[p]};
        used[p] = true;
        for (std::size_t q = p + 1; q < order.size(); ++q) {
            if (used[q]) continue;
            if (std::abs(values[order[q]] - values[order[p]]) <= tol) {
                group.push_back(order[q]);
                used[q] = true;
            }
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

// Orthonormal basis of {y : A y = 0} via SVD; singular values <= tol count as zero.
Matrix null_space(const Matrix& a, double tol) {
    const Index k = a.cols();
    if (k == 0) return Matrix(a.cols(), 0);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    // singular values are sorted descending; columns of V past rank span the kernel
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s[i] > tol) ++rank;
    }
    return svd.matrixV().rightCols(k - rank);
}

bool candidate_less(const DfsDecomposition& a, const DfsDecomposition& b) {
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) {
        const cplx x = a.eigenvalues[i];
        const cplx y = b.eigenvalues[i];
        if (x.real() != y.real()) return x.real() > y.real();
        if (x.imag() != y.imag()) return x.imag() > y.imag();
    }
    return a.dfs_dim() > b.dfs_dim();
}

}  // namespace

void DfsDecomposition::refresh_projectors() {
    proj_dfs = dfs_basis * dfs_basis.adjoint();
    proj_comp = comp_basis * comp_basis.adjoint();
}

double DfsConditionReport::max_residual() const noexcept {
    double m = std::max(invariance_residual, eigen_residual);
    if (coupling_residuals.size() > 0) m = std::max(m, coupling_residuals.maxCoeff());
    return m;
}

Matrix modified_gram_schmidt(const Matrix& vectors, const Matrix& against, double drop_tol) {
    const Index n = vectors.rows();
    Matrix out(n, vectors.cols());
    Index kept = 0;
    for (Index c = 0; c < vectors.cols(); ++c) {
        Vector v = vectors.col(c);
        const double original = v.norm();
        if (original == 0.0) continue;
        // two passes keep the result orthogonal to working precision
        for (int pass = 0; pass < 2; ++pass) {
            for (Index j = 0; j < against.cols(); ++j) v -= against.col(j).dot(v) * against.col(j);
            for (Index j = 0; j < kept; ++j) v -= out.col(j).dot(v) * out.col(j);
        }
        const double norm = v.norm();
        if (norm <= drop_tol * std::max(1.0, original)) continue;
        out.col(kept++) = v / norm;
    }
    return out.leftCols(kept);
}

std::vector<DfsDecomposition> common_degenerate_eigenspace(const OperatorSet& ops, double cluster_tol) {
    ops.validate();
    const Index n = ops.dim();
    if (n < 2) throw ArgumentError("common_degenerate_eigenspace: dim must be >= 2");
    if (ops.lindblads.empty()) throw ArgumentError("common_degenerate_eigenspace: need at least one Lindblad operator");

    std::vector<PartialSpace> spaces{{Matrix::Identity(n, n), {}, false}};
    bool first = true;
    for (const Matrix& f : ops.lindblads) {
        const double scale = operator_scale(f);
        std::vector<PartialSpace> next;
        for (const auto& space : spaces) {
            if (scale == 0.0) {
                PartialSpace s = space;
                s.values.push_back(cplx{0.0, 0.0});
                next.push_back(std::move(s));
                continue;
            }
            const Matrix compressed = space.basis.adjoint() * f * space.basis;
            Eigen::ComplexEigenSolver<Matrix> solver(compressed, false);
            const auto groups = cluster_eigenvalues(solver.eigenvalues(), cluster_tol * scale);
            for (const auto& group : groups) {
                cplx mean{0.0, 0.0};
                for (Index idx : group) mean += solver.eigenvalues()[idx];
                mean /= static_cast<double>(group.size());
                const Matrix shifted = (f - mean * Matrix::Identity(n, n)) * space.basis;
                const Matrix y = null_space(shifted, 10.0 * cluster_tol * scale);
                if (y.cols() == 0) continue;
                PartialSpace s;
                s.basis = modified_gram_schmidt(space.basis * y, Matrix(n, 0));
                if (s.basis.cols() == 0) continue;
                s.values = space.values;
                // Rayleigh-quotient refinement of the common eigenvalue
                const Matrix rq = s.basis.adjoint() * f * s.basis;
                s.values.push_back(rq.trace() / static_cast<double>(rq.rows()));
                s.defective = space.defective ||
                              (first && y.cols() < static_cast<Index>(group.size()));
                next.push_back(std::move(s));
            }
        }
        spaces = std::move(next);
        first = false;
        if (spaces.empty()) break;
    }

    // Right eigenvectors of the first nonzero operator seed the complement bases.
    Matrix seed = Matrix::Identity(n, n);
    for (const Matrix& f : ops.lindblads) {
        if (operator_scale(f) > 0.0) {
            Eigen::ComplexEigenSolver<Matrix> solver(f, true);
            const auto groups = cluster_eigenvalues(solver.eigenvalues(), cluster_tol * operator_scale(f));
            Matrix ordered(n, n);
            Index col = 0;
            for (const auto& group : groups) {
                for (Index idx : group) ordered.col(col++) = solver.eigenvectors().col(idx);
            }
            seed = ordered;
            break;
        }
    }

    std::vector<DfsDecomposition> out;
    for (auto& space : spaces) {
        DfsDecomposition d;
        d.dfs_basis = space.basis;
        d.eigenvalues = space.values;
        d.defective = space.defective;
        Matrix fill(n, 2 * n);
        fill << seed, Matrix::Identity(n, n);
        d.comp_basis = modified_gram_schmidt(fill, d.dfs_basis, 1e-8);
        if (d.comp_basis.cols() != n - d.dfs_basis.cols()) {
            d.comp_basis = d.comp_basis.leftCols(std::min(d.comp_basis.cols(), n - d.dfs_basis.cols())).eval();
        }
        // keep only genuine common eigenvectors
        bool ok = true;
        for (std::size_t a = 0; a < ops.lindblads.size(); ++a) {
            const double scale = std::max(operator_scale(ops.lindblads[a]), 1e-300);
            const Matrix r = ops.lindblads[a] * d.dfs_basis - d.eigenvalues[a] * d.dfs_basis;
            if (r.norm() > 100.0 * cluster_tol * scale) ok = false;
        }
        if (!ok) continue;
        fix_gauge(d);
        d.refresh_projectors();
        out.push_back(std::move(d));
    }
    std::stable_sort(out.begin(), out.end(), candidate_less);
    return out;
}

Matrix effective_hamiltonian(const OperatorSet& ops, std::span<const cplx> c) {
    if (c.size() != ops.lindblads.size()) {
        throw ArgumentError("effective_hamiltonian: need one eigenvalue per Lindblad operator");
    }
    Matrix h = ops.hamiltonian;
    for (std::size_t a = 0; a < c.size(); ++a) {
        const Matrix& f = ops.lindblads[a];
        h += 0.5 * kI * (std::conj(c[a]) * f - c[a] * f.adjoint());
    }
    return h;
}

Matrix required_control_offdiag(const OperatorSet& ops, const DfsDecomposition& dfs,
                                const BasisDerivative* basis_dt) {
    const Index m = dfs.dfs_dim();
    const Index k = dfs.comp_dim();
    Matrix req = Matrix::Zero(m, k);
    for (std::size_t a = 0; a < ops.lindblads.size(); ++a) {
        req -= 0.5 * kI * std::conj(dfs.eigenvalues[a]) *
               (dfs.dfs_basis.adjoint() * ops.lindblads[a] * dfs.comp_basis);
    }
    if (basis_dt != nullptr) {
        // <Phi_n^perp | d_t Phi_j>, (N - M) x M
        const Matrix conn = dfs.comp_basis.adjoint() * basis_dt->dfs;
        req -= kI * conn.adjoint();
    }
    return req;
}

DfsConditionReport check_conditions(const OperatorSet& ops, const DfsDecomposition& dfs) {
    if (dfs.dim() != ops.dim()) throw ArgumentError("check_conditions: dimension mismatch");
    DfsConditionReport rep;
    const Index m = dfs.dfs_dim();
    const Index k = dfs.comp_dim();
    rep.coupling_residuals = RealMatrix::Zero(m, k);
    for (std::size_t a = 0; a < ops.lindblads.size(); ++a) {
        const Matrix r = ops.lindblads[a] * dfs.dfs_basis - dfs.eigenvalues[a] * dfs.dfs_basis;
        for (Index j = 0; j < m; ++j) rep.eigen_residual = std::max(rep.eigen_residual, r.col(j).norm());
    }
    if (k == 0 || m == 0) return rep;
    const Matrix heff = effective_hamiltonian(ops, dfs.eigenvalues);
    rep.invariance_residual = (dfs.comp_basis.adjoint() * heff * dfs.dfs_basis).cwiseAbs().maxCoeff();
    const Matrix actual = dfs.dfs_basis.adjoint() * ops.hamiltonian * dfs.comp_basis;
    rep.coupling_residuals = (actual - required_control_offdiag(ops, dfs)).cwiseAbs();
    return rep;
}

BlockParts block_decompose(const Matrix& k, const DfsDecomposition& dfs) {
    if (k.rows() != dfs.dim() || k.cols() != dfs.dim()) {
        throw ArgumentError("block_decompose: dimension mismatch");
    }
    const Matrix& p = dfs.proj_dfs;
    const Matrix& q = dfs.proj_comp;
    return BlockParts{p * k * p, q * k * q, p * k * q + q * k * p};
}

void fix_gauge(DfsDecomposition& dfs) {
    auto fix = [](Matrix& basis) {
        for (Index c = 0; c < basis.cols(); ++c) {
            Index best = 0;
            double best_abs = -1.0;
            for (Index r = 0; r < basis.rows(); ++r) {
                // ties go to the lower index unless clearly larger
                const double a = std::abs(basis(r, c));
                if (a > best_abs * (1.0 + 1e-12)) {
                    best_abs = a;
                    best = r;
                }
            }
            if (best_abs > 0.0) basis.col(c) *= std::conj(basis(best, c)) / best_abs;
        }
    };
    fix(dfs.dfs_basis);
    fix(dfs.comp_basis);
}

double subspace_overlap(const Matrix& a, const Matrix& b) {
    if (a.cols() == 0 && b.cols() == 0) return 1.0;
    if (a.cols() != b.cols()) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a.adjoint() * b);
    return svd.singularValues().minCoeff();
}

double align_gauge(DfsDecomposition& dfs, const DfsDecomposition& reference) {
    if (dfs.dfs_dim() != reference.dfs_dim() || dfs.comp_dim() != reference.comp_dim() ||
        dfs.dim() != reference.dim()) {
        throw GaugeError("align_gauge: subspace dimensions differ");
    }
    auto procrustes = [](Matrix& basis, const Matrix& ref) {
        if (basis.cols() == 0) return 1.0;
        const Matrix overlap = ref.adjoint() * basis;
        Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
        basis = basis * (svd.matrixV() * svd.matrixU().adjoint());
        return svd.singularValues().minCoeff();
    };
    const double s = procrustes(dfs.dfs_basis, reference.dfs_basis);
    procrustes(dfs.comp_basis, reference.comp_basis);
    dfs.refresh_projectors();
    return s;
}

}  // namespace adfs::dfs
