// test_dfs_path.cpp

#include "adfs/dfs_path.hpp"
#include "adfs/squeezed_qubit.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace adfs;
using namespace adfs::dfs;

namespace {

DfsPath qubit_path(double r0, double mu, double nu, double t_final) {
    model::SqueezeSchedule s{r0, 0.2, mu, nu, 1.0, 0.0};
    return DfsPath(qubit::make_model(s, model::ControlMode::engineered, t_final));
}

// d_t P from the hand-derived vector, independent of any gauge.
Matrix projector_rate_oracle(double r0, double mu, double nu, double t) {
    auto proj = [&](double s) {
        const Vector v = oracle::phi1(r0 + mu * s, 0.2 + nu * s);
        return Matrix(v * v.adjoint());
    };
    const double h = 1e-4;
    return (-proj(t + 2 * h) + 8.0 * proj(t + h) - 8.0 * proj(t - h) + proj(t - 2 * h)) / (12.0 * h);
}

}  // namespace

TEST(DfsPath, DerivativeMatchesGaugeInvariantOracle) {
    const auto path = qubit_path(0.3, 0.4, 0.7, 3.0);
    for (double t : {0.5, 1.5, 2.5}) {
        const auto d0 = path.decompose(t);
        for (auto method : {DerivativeMethod::analytic, DerivativeMethod::finite_difference}) {
            const auto d = path.derivative(t, d0, method);
            const Matrix dp = d.dfs * d0.dfs_basis.adjoint() + d0.dfs_basis * d.dfs.adjoint();
            EXPECT_LT((dp - projector_rate_oracle(0.3, 0.4, 0.7, t)).norm(), method == DerivativeMethod::analytic ? 1e-10 : 1e-6);
        }
    }
}

TEST(DfsPath, ParallelTransportGauge) {
    const auto path = qubit_path(0.3, 0.4, 0.7, 3.0);
    const auto d0 = path.decompose(1.0);
    for (auto method : {DerivativeMethod::analytic, DerivativeMethod::finite_difference}) {
        const auto d = path.derivative(1.0, d0, method);
        EXPECT_LT(std::abs(d0.dfs_basis.col(0).dot(d.dfs.col(0))), 1e-6);
        EXPECT_LT(std::abs(d0.comp_basis.col(0).dot(d.comp.col(0))), 1e-6);
        // <perp|d phi> = -<d perp|phi> by orthogonality
        EXPECT_LT(std::abs(d0.comp_basis.col(0).dot(d.dfs.col(0)) + d.comp.col(0).dot(d0.dfs_basis.col(0))), 1e-6);
    }
}

TEST(DfsPath, DerivativeAtIntervalEdgesUsesOneSidedStencils) {
    const auto path = qubit_path(0.3, 0.4, 0.7, 3.0);
    for (double t : {0.0, 3.0}) {
        const auto d0 = path.decompose(t);
        const auto a = path.derivative(t, d0, DerivativeMethod::analytic);
        const auto f = path.derivative(t, d0, DerivativeMethod::finite_difference);
        EXPECT_LT((a.dfs - f.dfs).norm(), 1e-6);
    }
}

TEST(DfsPath, SampleKeepsGaugeContinuousOnCoarseGrids) {
    const auto path = qubit_path(1e-6, 0.1, 0.1, 31.4);
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(31.4 * k / 20.0);
    const auto bases = path.sample(times);
    ASSERT_EQ(bases.size(), times.size());
    for (std::size_t k = 0; k < bases.size(); ++k) {
        const Vector v = oracle::phi1(1e-6 + 0.1 * times[k], 0.2 + 0.1 * times[k]);
        EXPECT_NEAR(std::abs(v.dot(bases[k].dfs_basis.col(0))), 1.0, 1e-10);
    }
    EXPECT_THROW(path.sample(std::vector<double>{1.0, 1.0}), ArgumentError);
}

TEST(DfsPath, DecomposeNearRejectsForeignSubspace) {
    const auto path = qubit_path(0.5, 0.0, 0.0, 1.0);
    auto other = path.decompose(0.0);
    std::swap(other.dfs_basis, other.comp_basis);
    other.refresh_projectors();
    EXPECT_THROW(path.decompose_near(0.5, other), GaugeError);
}

TEST(DfsPath, SelectorChoosesCandidate) {
    model::SqueezeSchedule s{0.5, 0.0, 0.0, 0.0, 1.0, 0.0};
    const auto m = qubit::make_model(s, model::ControlMode::none, 1.0);
    const DfsPath last(m, [](const std::vector<DfsDecomposition>& c) { return c.size() - 1; });
    EXPECT_LT(last.decompose(0.0).eigenvalues[0].real(), 0.0);
    EXPECT_GT(DfsPath(m).decompose(0.0).eigenvalues[0].real(), 0.0);
}

TEST(OperatorDerivative, FallsBackToOneSidedAtEdges) {
    model::OperatorSet a;
    a.hamiltonian = Matrix::Zero(2, 2);
    a.lindblads.push_back(Matrix::Zero(2, 2));
    model::OperatorSet b = a;
    b.lindblads[0](0, 1) = 2.0;
    const auto m = model::SystemModel::from_grid({0.0, 1.0}, {a, b});
    EXPECT_NEAR(operator_derivative(m, 0.0).lindblads[0](0, 1).real(), 2.0, 1e-8);
    EXPECT_NEAR(operator_derivative(m, 1.0).lindblads[0](0, 1).real(), 2.0, 1e-8);
}
