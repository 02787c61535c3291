// adiabatic_monitor.hpp — adiabatic condition Xi(t), spectral gaps/rates, purity lower bound

#pragma once

#include "adfs/dfs_analysis.hpp"
#include "adfs/dfs_path.hpp"

#include <span>
#include <vector>

namespace adfs::adiabatic {

using dfs::BasisDerivative;
using dfs::DerivativeMethod;
using dfs::DfsDecomposition;
using dfs::DfsPath;
using model::OperatorDerivative;
using model::OperatorSet;

struct Spectral {
    RealMatrix omega;       // (N-M) x M, <H_eff>_n - <H_eff>_i
    RealVector gamma_comp;  // N-M, sum_a ||(F_a - c_a)|Phi_n^perp>||^2 / 2
};

Spectral spectral_quantities(const OperatorSet& ops, const DfsDecomposition& dfs);

struct XiState {
    double value{0.0};
    bool divergent{false};
    Index n{-1};  // offending / maximising pair
    Index i{-1};
};

// Max_{n,i} |4 <Phi_n^perp|d_t Phi_i> / (omega_ni + i Gamma_n)| from a basis and its derivative.
XiState xi_state(const OperatorSet& ops, const DfsDecomposition& dfs, const BasisDerivative& basis_dt);

// Same, evaluating the basis and derivative on the path at t.
XiState xi_state(const DfsPath& path, double t, DerivativeMethod method = DerivativeMethod::analytic);

struct XiLindblad {
    std::vector<double> per_operator;  // Xi_a, one per Lindblad operator
    std::vector<double> f_max;         // F_Max per operator
    std::vector<double> prefactor;     // permutation-weighted prefactor per operator
    bool assumption_violated{false};   // c_a = <F_a>_n somewhere
    bool divergent{false};             // omega + i Gamma vanished

    double max_value() const noexcept;
};

// Xi in the Lindblad-operator form, including the complement-size prefactor.
XiLindblad xi_lindblad(const OperatorSet& ops, const OperatorDerivative& d_ops, const DfsDecomposition& dfs);

// sum_{a=0}^{K-1} K!/(K-a-1)! * f_max^a / K.
double permutation_prefactor(Index comp_dim, double f_max);

struct AdiabaticReport {
    double t{0.0};
    XiState xi_state;
    XiLindblad xi_lindblad;
    Spectral spectral;
};

AdiabaticReport report(const DfsPath& path, double t, const DfsDecomposition& at_t,
                       DerivativeMethod method = DerivativeMethod::analytic);

// ---- purity lower bound -------------------------------------------------------

// Integrand quantities at one time, for every (j, m) pair (M x (N-M) matrices).
struct BoundSample {
    double t{0.0};
    RealMatrix x_abs;       // |<Phi_m^perp|d_t Phi_j> / (omega_mj + i Gamma_m)|
    RealMatrix weighted;    // (A_j + B_m + C) |X_mj|
    RealMatrix dx_abs;      // |d_t X_mj|
    RealVector a_j;
    RealVector b_m;
    double c_term{0.0};
    bool finite{true};
};

struct BoundOptions {
    DerivativeMethod method{DerivativeMethod::analytic};
    double x_step_fraction{1e-5};  // step for d_t X, relative to the interval length
    Index initial_intervals{64};
    Index max_intervals{1 << 16};
    double rel_tol{1e-8};
    double p0{1.0};  // purity at the start of the interval
};

BoundSample bound_sample(const DfsPath& path, double t, double x_step,
                         DerivativeMethod method = DerivativeMethod::analytic);

struct PurityBoundTerms {
    double t_final{0.0};
    RealVector a_j;             // sup over the interval
    RealVector b_m;             // sup over the interval
    double c_term{0.0};         // sup over the interval
    double boundary_term{0.0};  // 4M sum |X_mj(T)|
    double integral_terms{0.0}; // 4M sum (int (A+B+C)|X| + int |d_t X|)
    double bound{1.0};          // p0 - boundary_term - integral_terms
    double sup_deficit{0.0};    // right-hand side of the sup form at T
    double sup_bound{1.0};      // p0 - sup_deficit
    double scaled_coefficient{0.0};  // K with sup_deficit = K / T in s = t/T units
    // The three "stronger conditions": sup |X|, int (A+B+C)|X|, int |d_t X| (max over pairs).
    double diag_boundary{0.0};
    double diag_weighted{0.0};
    double diag_derivative{0.0};
    Index intervals{0};
    bool converged{false};
    bool finite{true};
};

// Bound over [begin, begin + T] of the path's model interval.
PurityBoundTerms purity_lower_bound(const DfsPath& path, double T, const BoundOptions& opts = {});

// Running integral-form bound p(t_k) >= ... on a given increasing grid (cumulative trapezoid).
std::vector<double> purity_bound_profile(const DfsPath& path, std::span<const double> times,
                                         const BoundOptions& opts = {});

}  // namespace adfs::adiabatic
