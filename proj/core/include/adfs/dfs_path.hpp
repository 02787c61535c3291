// dfs_path.hpp — gauge-continuous t-DFS bases along a time-dependent model
//
// Bases are returned in a local parallel-transport gauge: derivatives carry no
// component inside their own block (<Phi_i|d_t Phi_j> = 0, <Phi_n^perp|d_t Phi_m^perp> = 0).

#pragma once

#include "adfs/dfs_analysis.hpp"
#include "adfs/operator_model.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace adfs::dfs {

using model::SystemModel;

// Picks one candidate out of common_degenerate_eigenspace's (ordered) output.
using Selector = std::function<std::size_t(const std::vector<DfsDecomposition>&)>;

// Candidate whose first eigenvalue has the largest real part (the first one).
Selector largest_real_eigenvalue();

enum class DerivativeMethod {
    finite_difference,  // central difference of aligned bases
    analytic,           // linear solve from d_t F and the eigen-equation
};

// Smallest DFS overlap tolerated between neighbouring bases before a GaugeError.
inline constexpr double kMinGaugeOverlap = 0.99;

class DfsPath {
public:
    explicit DfsPath(SystemModel model, Selector selector = largest_real_eigenvalue(),
                     double cluster_tol = kClusterTolerance);

    const SystemModel& model() const noexcept { return model_; }

    // Selected candidate at t in canonical gauge (largest component real-positive).
    DfsDecomposition decompose(double t) const;

    // Candidate at t that best overlaps `reference`, re-gauged onto it.
    // Throws GaugeError if the subspaces agree worse than kMinGaugeOverlap.
    DfsDecomposition decompose_near(double t, const DfsDecomposition& reference) const;

    // Sequentially aligned bases on an increasing grid (coarse gaps are bridged by bisection).
    std::vector<DfsDecomposition> sample(std::span<const double> times) const;

    // d_t of both bases at t, expressed for the basis `at_t` (which must be the
    // decomposition at t in any gauge). Default step: the model's fd step.
    BasisDerivative derivative(double t, const DfsDecomposition& at_t,
                               DerivativeMethod method = DerivativeMethod::analytic,
                               std::optional<double> h = std::nullopt) const;

private:
    SystemModel model_;
    Selector selector_;
    double cluster_tol_;
};

// d_t F_a at t, falling back to one-sided differences at the interval edges when
// the model has no analytic derivative.
model::OperatorDerivative operator_derivative(const SystemModel& model, double t,
                                              std::optional<double> h = std::nullopt);

}  // namespace adfs::dfs
