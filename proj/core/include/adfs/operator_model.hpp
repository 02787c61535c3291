// operator_model.hpp — time-dependent Hamiltonian + Lindblad operator schedules
//
// A SystemModel maps a time t onto the instantaneous OperatorSet (H0(t), {F_a(t)}).
// Lindblad operators carry their rate inside them (F = sqrt(gamma) L), so the
// dissipator is always sum_a (F rho F^+ - 1/2 {F^+ F, rho}).

#pragma once

#include "adfs/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace adfs::model {

struct OperatorSet {
    Matrix hamiltonian;
    std::vector<Matrix> lindblads;
    // ||H - H^+|| removed by symmetrization in evaluate(); 0 for exact inputs.
    double hermiticity_drift{0.0};

    Index dim() const noexcept { return hamiltonian.rows(); }
    // Throws ArgumentError if matrices are not square or disagree in size.
    void validate() const;
};

struct OperatorDerivative {
    Matrix hamiltonian;
    std::vector<Matrix> lindblads;
};

// r(t) = r0 + mu t + o, theta(t) = theta0 + nu t (rates in units where hbar = 1).
struct SqueezeSchedule {
    double r0{0.0};
    double theta0{0.0};
    double mu{0.0};
    double nu{0.0};
    double gamma{1.0};
    double offset_o{0.0};

    double r(double t) const noexcept { return r0 + mu * t + offset_o; }
    double theta(double t) const noexcept { return theta0 + nu * t; }
    // Default central-difference step 1e-5 / max(gamma, |mu|, |nu|).
    double default_fd_step() const noexcept;
    // gamma > 0 and r(t) >= 0 on [t_begin, t_end].
    void validate(double t_begin, double t_end) const;
};

struct TimeInterval {
    double begin{0.0};
    double end{0.0};

    bool contains(double t) const noexcept;
    double length() const noexcept { return end - begin; }
};

enum class DerivativeSource { automatic, finite_difference };

class SystemModel {
public:
    using Evaluator = std::function<OperatorSet(double)>;
    using DerivativeEvaluator = std::function<OperatorDerivative(double)>;

    SystemModel(Index dim, TimeInterval interval, Evaluator evaluator,
                DerivativeEvaluator derivative = {}, double fd_step = 1e-5);

    // Time-independent matrices on the given interval; derivative is exactly zero.
    static SystemModel constant(OperatorSet ops, TimeInterval interval);
    // Piecewise-linear interpolation between samples (times strictly increasing).
    static SystemModel from_grid(std::vector<double> times, std::vector<OperatorSet> samples);

    Index dim() const noexcept { return dim_; }
    const TimeInterval& interval() const noexcept { return interval_; }
    double fd_step() const noexcept { return fd_step_; }
    bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }

    // Raw access used by evaluate()/evaluate_derivative().
    const Evaluator& evaluator() const noexcept { return evaluator_; }
    const DerivativeEvaluator& derivative_evaluator() const noexcept { return derivative_; }

    // New model with extra(t) added to the Hamiltonian; derivatives are combined
    // when both sides provide them, otherwise the result falls back to finite differences.
    SystemModel with_added_hamiltonian(std::function<Matrix(double)> extra,
                                       std::function<Matrix(double)> extra_derivative = {}) const;

private:
    Index dim_;
    TimeInterval interval_;
    Evaluator evaluator_;
    DerivativeEvaluator derivative_;
    double fd_step_;
};

// Instantaneous operators; H0 is symmetrized to (H + H^+)/2 and the removed part
// recorded in hermiticity_drift. Throws RangeError outside the model interval.
OperatorSet evaluate(const SystemModel& model, double t);

// Analytic derivative when the model provides one (and source == automatic),
// otherwise the central difference (X(t+h) - X(t-h)) / 2h.
// Throws RangeError when t or t +/- h leaves the interval.
OperatorDerivative evaluate_derivative(const SystemModel& model, double t,
                                       std::optional<double> h = std::nullopt,
                                       DerivativeSource source = DerivativeSource::automatic);

enum class ControlMode { none, engineered, sta };

const char* to_string(ControlMode mode) noexcept;
ControlMode parse_control_mode(const std::string& text);

// {"dim": N, "schedule": {"r0", "theta0", "mu", "nu", "gamma", "o"}, "control": ...}
struct SystemDefinition {
    Index dim{2};
    SqueezeSchedule schedule;
    ControlMode control{ControlMode::engineered};
};

SystemDefinition parse_system_definition(const nlohmann::json& doc);
nlohmann::json to_json(const SystemDefinition& def);
nlohmann::json to_json(const SqueezeSchedule& schedule);
SqueezeSchedule parse_schedule(const nlohmann::json& doc);

}  // namespace adfs::model
