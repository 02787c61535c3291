// lindblad_integrator.hpp — master-equation propagation, observables, rotating-frame diagnostics

#pragma once

#include "adfs/dfs_analysis.hpp"
#include "adfs/operator_model.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace adfs::lindblad {

using model::OperatorSet;
using model::SystemModel;

class DensityMatrix {
public:
    // Validates Hermiticity (1e-10), unit trace (1e-10) and eigenvalues >= -1e-8.
    explicit DensityMatrix(Matrix data);

    // |psi><psi| after normalizing psi (throws ArgumentError for a zero vector).
    static DensityMatrix pure(const Vector& psi);
    static DensityMatrix maximally_mixed(Index dim);

    const Matrix& data() const noexcept { return data_; }
    Index dim() const noexcept { return data_.rows(); }

private:
    Matrix data_;
};

// -i[H, rho] + sum_a (F rho F^+ - 1/2 {F^+ F, rho}).
Matrix liouvillian_apply(const OperatorSet& ops, const Matrix& rho);

double purity(const Matrix& rho);
// <phi|rho|phi>; phi must be normalized to 1e-10.
double fidelity_pure(const Matrix& rho, const Vector& phi);
// (Tr rho sx, Tr rho sy, Tr rho sz) with sz = |1><1| - |0><0|; 2x2 only.
std::array<double, 3> bloch(const Matrix& rho);
// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const Matrix& rho);

struct PropagateOptions {
    double dt_max{1e-3};
    double positivity_tol{1e-6};
    // Optional target state |phi(t)> for the fidelity column.
    std::function<Vector(double)> fidelity_target;
    bool store_states{true};
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Matrix> states;  // empty unless store_states
    std::vector<double> purity;
    std::vector<double> fidelity;  // empty without a target
    std::vector<std::array<double, 3>> bloch;  // empty unless N = 2
    std::vector<double> trace_err;
    std::vector<double> herm_err;
    std::vector<double> min_eig;
    std::size_t steps{0};

    double max_trace_err() const noexcept;
    double max_herm_err() const noexcept;
    double min_min_eig() const noexcept;
};

// Fixed-step classic RK4; each grid interval is split into equal substeps no longer
// than dt_max. Throws PositivityViolation when an eigenvalue drops below -positivity_tol.
TrajectoryRecord propagate(const SystemModel& model, const DensityMatrix& rho0, std::span<const double> t_grid,
                           const PropagateOptions& opts = {});

// Columns t,purity,fidelity,bloch_x,bloch_y,bloch_z,trace_err,herm_err,min_eig.
// Missing fidelity/Bloch values are written as nan.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec);

struct RotatingFrameDiag {
    Matrix rho_d;
    Matrix rho_n;
    Matrix rho_c;
    Matrix rho_bar;
    double coherent_leak{0.0};  // 2 Re Tr{rho_D (-i[G, rho_N])}
    double backflow{0.0};       // 2 Re Tr{rho_D sum_a F~ rho_C F~^+}
};

// State in the frame T(t) = sum_b exp(i phase_b)|b(0)><b(t)| over DFS then complement
// bases, split into blocks, plus the two purity-rate contributions. `phases` holds the
// accumulated integrals of <H_eff>_b (length N; empty = zero). Only their real part
// enters T, so T is unitary and both rates are frame independent.
RotatingFrameDiag rotating_frame_diagnostics(const OperatorSet& ops, const dfs::DfsDecomposition& dfs_t,
                                             const dfs::BasisDerivative& basis_dt,
                                             const dfs::DfsDecomposition& dfs_0, const Matrix& rho,
                                             std::span<const double> phases = {});

}  // namespace adfs::lindblad
