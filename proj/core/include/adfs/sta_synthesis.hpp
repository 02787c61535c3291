// sta_synthesis.hpp — counterdiabatic field H1 and the DFS transport unitary

#pragma once

#include "adfs/dfs_path.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace adfs::sta {

using dfs::BasisDerivative;
using dfs::DerivativeMethod;
using dfs::DfsDecomposition;
using dfs::DfsPath;
using model::OperatorSet;

struct StaFields {
    Matrix h1;              // N x N, Hermitian, block off-diagonal (plus an optional P-block)
    Matrix h_total;         // H0 + H1
    Matrix offdiag_target;  // (N-M) x M: i <Phi_n^perp|d_t Phi_k>
};

// Optional steering block H_D(t); only its P-block is used.
using DfsBlockHook = std::function<Matrix(double, const DfsDecomposition&)>;

// H1 = sum_{n,k} i <Phi_n^perp|d_t Phi_k> |Phi_n^perp><Phi_k| + h.c.
StaFields counterdiabatic_block(const OperatorSet& ops, const DfsDecomposition& dfs, const BasisDerivative& basis_dt);

StaFields counterdiabatic_block(const DfsPath& path, double t, DerivativeMethod method = DerivativeMethod::analytic,
                                std::optional<double> h = std::nullopt, const DfsBlockHook& h_d = {});

// max |<Phi_n^perp|H_eff|Phi_j> - i <Phi_n^perp|d_t Phi_j>| for the Hamiltonian in `ops`.
double verify_sta(const OperatorSet& ops, const DfsDecomposition& dfs, const BasisDerivative& basis_dt);

// Model whose Hamiltonian is H0(t) + H1(t) (+ H_D(t) when given).
model::SystemModel with_counterdiabatic(const DfsPath& path, DerivativeMethod method = DerivativeMethod::analytic,
                                        DfsBlockHook h_d = {});

struct TransportUnitary {
    std::vector<double> times;
    std::vector<Matrix> u;       // U_DFS(t)
    std::vector<Matrix> coeffs;  // M x M, u_ij = <Phi_i(t)|U|Phi_j(0)>
    double max_unitarity_err{0.0};        // ||U^+ U - I|| after each step, before re-unitarization
    double max_coeff_unitarity_err{0.0};  // ||u u^+ - I||
    double max_generator_residual{0.0};   // verify_sta residual of H_eff along the path
};

// Integrates i d_t U = H_eff(t) U (H_eff built from the path's model and DFS eigenvalues)
// with RK4 and polar re-unitarization. Throws StepSizeError if unitarity drifts above 1e-6 in one step.
TransportUnitary transport_unitary(const DfsPath& path, std::span<const double> times, double dt_max = 1e-3,
                                   DerivativeMethod method = DerivativeMethod::analytic);

}  // namespace adfs::sta
