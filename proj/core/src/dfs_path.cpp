// dfs_path.cpp — candidate tracking, gauge alignment and basis derivatives

#include "adfs/dfs_path.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace adfs::dfs {

namespace {

enum class Stencil { central, forward, backward };

Stencil pick_stencil(const model::TimeInterval& iv, double t, double h) {
    if (iv.contains(t - h) && iv.contains(t + h)) return Stencil::central;
    if (iv.contains(t + 2.0 * h)) return Stencil::forward;
    if (iv.contains(t - 2.0 * h)) return Stencil::backward;
    throw RangeError("interval too short for a finite-difference stencil");
}

BasisDerivative finite_difference(const DfsPath& path, double t, const DfsDecomposition& at_t, double h) {
    const Stencil st = pick_stencil(path.model().interval(), t, h);
    auto at = [&](double s) { return path.decompose_near(s, at_t); };
    BasisDerivative d;
    switch (st) {
        case Stencil::central: {
            const auto p = at(t + h);
            const auto m = at(t - h);
            d.dfs = (p.dfs_basis - m.dfs_basis) / (2.0 * h);
            d.comp = (p.comp_basis - m.comp_basis) / (2.0 * h);
            break;
        }
        case Stencil::forward: {
            const auto p1 = at(t + h);
            const auto p2 = at(t + 2.0 * h);
            d.dfs = (-3.0 * at_t.dfs_basis + 4.0 * p1.dfs_basis - p2.dfs_basis) / (2.0 * h);
            d.comp = (-3.0 * at_t.comp_basis + 4.0 * p1.comp_basis - p2.comp_basis) / (2.0 * h);
            break;
        }
        case Stencil::backward: {
            const auto m1 = at(t - h);
            const auto m2 = at(t - 2.0 * h);
            d.dfs = (3.0 * at_t.dfs_basis - 4.0 * m1.dfs_basis + m2.dfs_basis) / (2.0 * h);
            d.comp = (3.0 * at_t.comp_basis - 4.0 * m1.comp_basis + m2.comp_basis) / (2.0 * h);
            break;
        }
    }
    return d;
}

}  // namespace

Selector largest_real_eigenvalue() {
    return [](const std::vector<DfsDecomposition>&) { return std::size_t{0}; };
}

model::OperatorDerivative operator_derivative(const SystemModel& model, double t, std::optional<double> h) {
    if (model.has_analytic_derivative()) return model::evaluate_derivative(model, t);
    const double step = h.value_or(model.fd_step());
    const Stencil st = pick_stencil(model.interval(), t, step);
    if (st == Stencil::central) {
        return model::evaluate_derivative(model, t, step, model::DerivativeSource::finite_difference);
    }
    const double sgn = st == Stencil::forward ? 1.0 : -1.0;
    const auto f0 = model::evaluate(model, t);
    const auto f1 = model::evaluate(model, t + sgn * step);
    const auto f2 = model::evaluate(model, t + 2.0 * sgn * step);
    model::OperatorDerivative d;
    const double denom = 2.0 * sgn * step;
    d.hamiltonian = (-3.0 * f0.hamiltonian + 4.0 * f1.hamiltonian - f2.hamiltonian) / denom;
    d.lindblads.resize(f0.lindblads.size());
    for (std::size_t a = 0; a < f0.lindblads.size(); ++a) {
        d.lindblads[a] = (-3.0 * f0.lindblads[a] + 4.0 * f1.lindblads[a] - f2.lindblads[a]) / denom;
    }
    return d;
}

DfsPath::DfsPath(SystemModel model, Selector selector, double cluster_tol)
    : model_(std::move(model)), selector_(std::move(selector)), cluster_tol_(cluster_tol) {
    if (!selector_) selector_ = largest_real_eigenvalue();
}

DfsDecomposition DfsPath::decompose(double t) const {
    const auto ops = model::evaluate(model_, t);
    auto candidates = common_degenerate_eigenspace(ops, cluster_tol_);
    if (candidates.empty()) {
        std::ostringstream msg;
        msg << "no common eigenspace of the Lindblad operators at t = " << t;
        throw GaugeError(msg.str());
    }
    const std::size_t k = selector_(candidates);
    if (k >= candidates.size()) throw ArgumentError("DfsPath: selector returned an invalid index");
    return std::move(candidates[k]);
}

DfsDecomposition DfsPath::decompose_near(double t, const DfsDecomposition& reference) const {
    const auto ops = model::evaluate(model_, t);
    auto candidates = common_degenerate_eigenspace(ops, cluster_tol_);
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (candidates[k].dfs_dim() != reference.dfs_dim()) continue;
        const double o = subspace_overlap(reference.dfs_basis, candidates[k].dfs_basis);
        if (o > best) {
            best = o;
            best_k = k;
        }
    }
    if (best < kMinGaugeOverlap) {
        std::ostringstream msg;
        msg << "gauge discontinuity at t = " << t << ": subspace overlap " << best;
        throw GaugeError(msg.str());
    }
    DfsDecomposition d = std::move(candidates[best_k]);
    align_gauge(d, reference);
    return d;
}

namespace {

// Transports the gauge from (t0, d0) to t1, bisecting when the subspace turns too far
// between the two points for a direct overlap match.
DfsDecomposition carry(const DfsPath& path, double t0, const DfsDecomposition& d0, double t1, int depth) {
    try {
        return path.decompose_near(t1, d0);
    } catch (const GaugeError&) {
        constexpr int kMaxDepth = 40;
        if (depth >= kMaxDepth) throw;
    }
    const double mid = 0.5 * (t0 + t1);
    const auto dm = carry(path, t0, d0, mid, depth + 1);
    return carry(path, mid, dm, t1, depth + 1);
}

}  // namespace

std::vector<DfsDecomposition> DfsPath::sample(std::span<const double> times) const {
    std::vector<DfsDecomposition> out;
    out.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k == 0) {
            out.push_back(decompose(times[0]));
        } else {
            if (!(times[k] > times[k - 1])) throw ArgumentError("DfsPath::sample: times must increase");
            out.push_back(carry(*this, times[k - 1], out.back(), times[k], 0));
        }
    }
    return out;
}

BasisDerivative DfsPath::derivative(double t, const DfsDecomposition& at_t, DerivativeMethod method,
                                    std::optional<double> h) const {
    const double step = h.value_or(model_.fd_step());
    if (method == DerivativeMethod::finite_difference || at_t.comp_dim() == 0 || at_t.dfs_dim() == 0) {
        if (at_t.comp_dim() == 0 || at_t.dfs_dim() == 0) {
            const Index n = at_t.dim();
            return BasisDerivative{Matrix::Zero(n, at_t.dfs_dim()), Matrix::Zero(n, at_t.comp_dim())};
        }
        return finite_difference(*this, t, at_t, step);
    }

    // Differentiating F|Phi_j> = c|Phi_j> and projecting on the complement:
    //   Q (F - c) Q d_t|Phi_j> = -Q (d_t F) |Phi_j>,
    // stacked over all Lindblad operators and solved in least squares.
    const auto ops = model::evaluate(model_, t);
    const auto dops = operator_derivative(model_, t, step);
    const Index k = at_t.comp_dim();
    const Index m = at_t.dfs_dim();
    const std::size_t na = ops.lindblads.size();
    Matrix lhs(static_cast<Index>(na) * k, k);
    Matrix rhs(static_cast<Index>(na) * k, m);
    for (std::size_t a = 0; a < na; ++a) {
        const Matrix shifted = ops.lindblads[a] - at_t.eigenvalues[a] * Matrix::Identity(at_t.dim(), at_t.dim());
        lhs.middleRows(static_cast<Index>(a) * k, k) = at_t.comp_basis.adjoint() * shifted * at_t.comp_basis;
        rhs.middleRows(static_cast<Index>(a) * k, k) = -at_t.comp_basis.adjoint() * dops.lindblads[a] * at_t.dfs_basis;
    }
    Eigen::JacobiSVD<Matrix> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    double scale = 0.0;
    for (const auto& f : ops.lindblads) scale = std::max(scale, f.norm());
    if (s.size() == 0 || s[s.size() - 1] <= 1e-10 * std::max(scale, 1e-300)) {
        // complement not resolved by the operators: fall back to differences
        return finite_difference(*this, t, at_t, step);
    }
    const Matrix x = svd.solve(rhs);  // <Phi_n^perp | d_t Phi_j>
    return BasisDerivative{at_t.comp_basis * x, -at_t.dfs_basis * x.adjoint()};
}

}  // namespace adfs::dfs
