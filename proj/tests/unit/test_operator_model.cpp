// test_operator_model.cpp

#include "adfs/operator_model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace adfs;
using namespace adfs::model;

namespace {

OperatorSet pair_ops(double a) {
    OperatorSet ops;
    ops.hamiltonian = Matrix::Identity(2, 2) * a;
    ops.lindblads.push_back(Matrix::Identity(2, 2) * (2.0 * a));
    return ops;
}

}  // namespace

TEST(SqueezeSchedule, LinearRampsAndOffset) {
    SqueezeSchedule s{0.5, 0.25, 0.1, 0.2, 1.0, 0.01};
    EXPECT_DOUBLE_EQ(s.r(2.0), 0.5 + 0.2 + 0.01);
    EXPECT_DOUBLE_EQ(s.theta(2.0), 0.25 + 0.4);
    EXPECT_DOUBLE_EQ(s.default_fd_step(), 1e-5);
}

TEST(SqueezeSchedule, RejectsNegativeSqueezingAndRates) {
    SqueezeSchedule s{0.1, 0.0, -0.1, 0.0, 1.0, 0.0};
    EXPECT_NO_THROW(s.validate(0.0, 1.0));
    EXPECT_THROW(s.validate(0.0, 2.0), ArgumentError);
    s.mu = 0.0;
    s.gamma = 0.0;
    EXPECT_THROW(s.validate(0.0, 1.0), ArgumentError);
}

TEST(SystemModel, EvaluateChecksInterval) {
    const auto m = SystemModel::constant(pair_ops(1.0), {0.0, 1.0});
    EXPECT_NO_THROW(evaluate(m, 0.5));
    EXPECT_THROW(evaluate(m, 1.5), RangeError);
    EXPECT_THROW(evaluate(m, -0.1), RangeError);
    const auto d = evaluate_derivative(m, 0.5);
    EXPECT_DOUBLE_EQ(d.hamiltonian.norm(), 0.0);
}

TEST(SystemModel, SymmetrizesHamiltonianAndRecordsDrift) {
    OperatorSet ops = pair_ops(1.0);
    ops.hamiltonian(0, 1) = cplx(1e-13, 0.0);
    const auto m = SystemModel::constant(ops, {0.0, 1.0});
    const auto e = evaluate(m, 0.2);
    EXPECT_LT(hermiticity_error(e.hamiltonian), 1e-15);
    EXPECT_GT(e.hermiticity_drift, 0.0);
}

TEST(SystemModel, GridInterpolationIsLinear) {
    const auto m = SystemModel::from_grid({0.0, 1.0, 3.0}, {pair_ops(0.0), pair_ops(1.0), pair_ops(5.0)});
    EXPECT_NEAR(evaluate(m, 0.5).hamiltonian(0, 0).real(), 0.5, 1e-14);
    EXPECT_NEAR(evaluate(m, 2.0).hamiltonian(0, 0).real(), 3.0, 1e-14);
    EXPECT_NEAR(evaluate_derivative(m, 2.0).hamiltonian(0, 0).real(), 2.0, 1e-6);
    EXPECT_THROW(SystemModel::from_grid({0.0, 0.0}, {pair_ops(0.0), pair_ops(1.0)}), ArgumentError);
}

TEST(SystemModel, AnalyticAndFiniteDifferenceDerivativesAgree) {
    auto eval = [](double t) {
        OperatorSet ops;
        ops.hamiltonian = Matrix::Zero(2, 2);
        ops.hamiltonian(0, 1) = std::sin(t);
        ops.hamiltonian(1, 0) = std::sin(t);
        ops.lindblads.push_back(Matrix::Identity(2, 2) * std::exp(t));
        return ops;
    };
    auto deriv = [](double t) {
        OperatorDerivative d;
        d.hamiltonian = Matrix::Zero(2, 2);
        d.hamiltonian(0, 1) = std::cos(t);
        d.hamiltonian(1, 0) = std::cos(t);
        d.lindblads.push_back(Matrix::Identity(2, 2) * std::exp(t));
        return d;
    };
    const SystemModel m(2, {0.0, 2.0}, eval, deriv);
    const auto a = evaluate_derivative(m, 1.0);
    const auto f = evaluate_derivative(m, 1.0, 1e-5, DerivativeSource::finite_difference);
    EXPECT_LT((a.hamiltonian - f.hamiltonian).norm(), 1e-9);
    EXPECT_LT((a.lindblads[0] - f.lindblads[0]).norm(), 1e-9);
    EXPECT_THROW(evaluate_derivative(m, 2.0, 1e-5, DerivativeSource::finite_difference), RangeError);
}

TEST(SystemModel, AddedHamiltonianCombinesDerivatives) {
    auto eval = [](double t) {
        OperatorSet ops;
        ops.hamiltonian = Matrix::Identity(2, 2) * t;
        ops.lindblads.push_back(Matrix::Zero(2, 2));
        return ops;
    };
    auto deriv = [](double) {
        OperatorDerivative d;
        d.hamiltonian = Matrix::Identity(2, 2);
        d.lindblads.push_back(Matrix::Zero(2, 2));
        return d;
    };
    const SystemModel m(2, {0.0, 1.0}, eval, deriv);
    const auto sum = m.with_added_hamiltonian([](double t) { return Matrix(Matrix::Identity(2, 2) * (t * t)); },
                                              [](double t) { return Matrix(Matrix::Identity(2, 2) * (2 * t)); });
    EXPECT_TRUE(sum.has_analytic_derivative());
    EXPECT_NEAR(evaluate(sum, 0.5).hamiltonian(0, 0).real(), 0.75, 1e-15);
    EXPECT_NEAR(evaluate_derivative(sum, 0.5).hamiltonian(0, 0).real(), 2.0, 1e-15);
    const auto fd_only = m.with_added_hamiltonian([](double t) { return Matrix(Matrix::Identity(2, 2) * (t * t)); });
    EXPECT_FALSE(fd_only.has_analytic_derivative());
    EXPECT_NEAR(evaluate_derivative(fd_only, 0.5).hamiltonian(0, 0).real(), 2.0, 1e-8);
}

TEST(OperatorSet, ValidateRejectsMismatchedShapes) {
    OperatorSet ops = pair_ops(1.0);
    ops.lindblads.push_back(Matrix::Zero(3, 3));
    EXPECT_THROW(ops.validate(), ArgumentError);
}

TEST(SystemDefinition, JsonRoundTrip) {
    SystemDefinition def;
    def.schedule = SqueezeSchedule{0.2, 0.1, 0.3, 0.4, 2.0, 0.05};
    def.control = ControlMode::sta;
    const auto back = parse_system_definition(to_json(def));
    EXPECT_EQ(back.control, ControlMode::sta);
    EXPECT_DOUBLE_EQ(back.schedule.offset_o, 0.05);
    EXPECT_DOUBLE_EQ(back.schedule.gamma, 2.0);
    EXPECT_THROW(parse_system_definition(nlohmann::json{{"dim", 2}, {"bogus", 1}}), ArgumentError);
    EXPECT_THROW(parse_control_mode("magic"), ArgumentError);
    EXPECT_STREQ(to_string(ControlMode::engineered), "engineered");
}
