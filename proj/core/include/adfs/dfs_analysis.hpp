// dfs_analysis.hpp — t-DFS detection as common degenerate right-eigenspaces of the
// Lindblad operators, the effective Hamiltonian, and the DFS condition residuals.

#pragma once

#include "adfs/operator_model.hpp"
#include "adfs/types.hpp"

#include <span>
#include <vector>

namespace adfs::dfs {

using model::OperatorSet;

// Relative tolerance on complex eigenvalue distance for "degenerate" grouping.
inline constexpr double kClusterTolerance = 1e-8;

struct DfsDecomposition {
    Matrix dfs_basis;               // N x M, orthonormal columns |Phi_i>
    Matrix comp_basis;              // N x (N - M), orthonormal columns |Phi_n^perp>
    std::vector<cplx> eigenvalues;  // c_a, one per Lindblad operator
    Matrix proj_dfs;                // P
    Matrix proj_comp;               // Q
    bool defective{false};          // some F_a lacked a full eigenbasis

    Index dim() const noexcept { return dfs_basis.rows(); }
    Index dfs_dim() const noexcept { return dfs_basis.cols(); }
    Index comp_dim() const noexcept { return comp_basis.cols(); }

    // Recompute P and Q from the stored bases.
    void refresh_projectors();
};

struct DfsConditionReport {
    double invariance_residual{0.0};  // max |<Phi_n^perp| H_eff^0 |Phi_j>|
    double eigen_residual{0.0};       // max_a,j ||(F_a - c_a) |Phi_j>||
    RealMatrix coupling_residuals;    // M x (N - M): |<Phi_j|H0|Phi_n^perp> - required|

    double max_residual() const noexcept;
};

// Time derivatives of the basis columns, in the same layout as the bases.
struct BasisDerivative {
    Matrix dfs;
    Matrix comp;
};

// Every common eigenspace of all F_a. Candidates are ordered by the eigenvalue
// of the first Lindblad operator (descending real part, then imaginary part).
std::vector<DfsDecomposition> common_degenerate_eigenspace(const OperatorSet& ops,
                                                           double cluster_tol = kClusterTolerance);

// H_eff^0 = H0 + (i/2) sum_a (c_a^* F_a - c_a F_a^+).
Matrix effective_hamiltonian(const OperatorSet& ops, std::span<const cplx> c);

DfsConditionReport check_conditions(const OperatorSet& ops, const DfsDecomposition& dfs);

struct BlockParts {
    Matrix dfs;      // P K P
    Matrix comp;     // Q K Q
    Matrix offdiag;  // P K Q + Q K P
};

BlockParts block_decompose(const Matrix& k, const DfsDecomposition& dfs);

// M x (N - M) matrix of <Phi_j|H|Phi_n^perp> that keeps the subspace dynamically
// stable:  -i conj(<Phi_n^perp|d_t Phi_j>) - (i/2) sum_a conj(c_a) <Phi_j|F_a|Phi_n^perp>.
// Without basis_dt the derivative term is dropped (static condition).
Matrix required_control_offdiag(const OperatorSet& ops, const DfsDecomposition& dfs,
                                const BasisDerivative* basis_dt = nullptr);

// Rotates each basis vector so its largest-modulus component is real positive.
void fix_gauge(DfsDecomposition& dfs);

// Re-expresses both bases of `dfs` to maximise overlap with `reference`
// (unitary Procrustes within each block). Returns the smallest singular value
// of the DFS overlap matrix, i.e. how well the two subspaces agree.
double align_gauge(DfsDecomposition& dfs, const DfsDecomposition& reference);

// Smallest singular value of A^+ B for orthonormal column sets (1 = same span).
double subspace_overlap(const Matrix& a, const Matrix& b);

// Orthonormalizes `vectors` column by column, first projecting out `against`
// (which must have orthonormal columns). Columns whose residual norm falls
// below drop_tol are skipped.
Matrix modified_gram_schmidt(const Matrix& vectors, const Matrix& against, double drop_tol = 1e-10);

}  // namespace adfs::dfs
