// operator_model.cpp — schedule evaluation, finite differences, JSON system definitions

#include "adfs/operator_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace adfs::model {

namespace {

double interval_slack(const TimeInterval& iv) {
    return 1e-12 * std::max({1.0, std::abs(iv.begin), std::abs(iv.end)});
}

void require_in_interval(const SystemModel& model, double t, const char* what) {
    if (!model.interval().contains(t)) {
        std::ostringstream msg;
        msg << what << ": t = " << t << " outside [" << model.interval().begin << ", "
            << model.interval().end << "]";
        throw RangeError(msg.str());
    }
}

}  // namespace

void OperatorSet::validate() const {
    const Index n = hamiltonian.rows();
    if (n == 0 || hamiltonian.cols() != n) {
        throw ArgumentError("OperatorSet: Hamiltonian must be a non-empty square matrix");
    }
    for (const auto& f : lindblads) {
        if (f.rows() != n || f.cols() != n) {
            throw ArgumentError("OperatorSet: Lindblad operator dimension mismatch");
        }
    }
}

double SqueezeSchedule::default_fd_step() const noexcept {
    const double scale = std::max({gamma, std::abs(mu), std::abs(nu)});
    return 1e-5 / (scale > 0.0 ? scale : 1.0);
}

void SqueezeSchedule::validate(double t_begin, double t_end) const {
    if (!(gamma > 0.0)) throw ArgumentError("SqueezeSchedule: gamma must be positive");
    if (!std::isfinite(r0) || !std::isfinite(theta0) || !std::isfinite(mu) ||
        !std::isfinite(nu) || !std::isfinite(offset_o)) {
        throw ArgumentError("SqueezeSchedule: non-finite parameter");
    }
    // r is linear, so checking the end points suffices.
    if (r(t_begin) < 0.0 || r(t_end) < 0.0) {
        throw ArgumentError("SqueezeSchedule: r(t) must stay >= 0 on the simulated interval");
    }
}

bool TimeInterval::contains(double t) const noexcept {
    const double slack = interval_slack(*this);
    return t >= begin - slack && t <= end + slack;
}

SystemModel::SystemModel(Index dim, TimeInterval interval, Evaluator evaluator,
                         DerivativeEvaluator derivative, double fd_step)
    : dim_(dim),
      interval_(interval),
      evaluator_(std::move(evaluator)),
      derivative_(std::move(derivative)),
      fd_step_(fd_step) {
    if (dim_ < 1) throw ArgumentError("SystemModel: dim must be positive");
    if (!(interval_.end >= interval_.begin)) throw ArgumentError("SystemModel: empty interval");
    if (!evaluator_) throw ArgumentError("SystemModel: evaluator required");
    if (!(fd_step_ > 0.0)) throw ArgumentError("SystemModel: finite-difference step must be positive");
}

SystemModel SystemModel::constant(OperatorSet ops, TimeInterval interval) {
    ops.validate();
    const Index n = ops.dim();
    OperatorDerivative zero;
    zero.hamiltonian = Matrix::Zero(n, n);
    zero.lindblads.assign(ops.lindblads.size(), Matrix::Zero(n, n));
    return SystemModel(
        n, interval, [ops](double) { return ops; }, [zero](double) { return zero; });
}

SystemModel SystemModel::from_grid(std::vector<double> times, std::vector<OperatorSet> samples) {
    if (times.size() < 2 || times.size() != samples.size()) {
        throw ArgumentError("SystemModel::from_grid: need >= 2 samples with matching times");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) {
            throw ArgumentError("SystemModel::from_grid: times must be strictly increasing");
        }
    }
    for (const auto& s : samples) {
        s.validate();
        if (s.dim() != samples.front().dim() ||
            s.lindblads.size() != samples.front().lindblads.size()) {
            throw ArgumentError("SystemModel::from_grid: inconsistent samples");
        }
    }
    const Index n = samples.front().dim();
    const TimeInterval iv{times.front(), times.back()};
    auto eval = [times, samples](double t) {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
        k = std::min(k, times.size() - 2);
        const double w = std::clamp((t - times[k]) / (times[k + 1] - times[k]), 0.0, 1.0);
        OperatorSet out;
        out.hamiltonian = (1.0 - w) * samples[k].hamiltonian + w * samples[k + 1].hamiltonian;
        out.lindblads.resize(samples[k].lindblads.size());
        for (std::size_t a = 0; a < out.lindblads.size(); ++a) {
            out.lindblads[a] = (1.0 - w) * samples[k].lindblads[a] + w * samples[k + 1].lindblads[a];
        }
        return out;
    };
    double min_spacing = times.back() - times.front();
    for (std::size_t k = 1; k < times.size(); ++k) min_spacing = std::min(min_spacing, times[k] - times[k - 1]);
    return SystemModel(n, iv, eval, {}, 1e-3 * min_spacing);
}

SystemModel SystemModel::with_added_hamiltonian(std::function<Matrix(double)> extra,
                                                std::function<Matrix(double)> extra_derivative) const {
    auto base_eval = evaluator_;
    Evaluator eval = [base_eval, extra](double t) {
        OperatorSet ops = base_eval(t);
        ops.hamiltonian += extra(t);
        return ops;
    };
    DerivativeEvaluator deriv;
    if (derivative_ && extra_derivative) {
        auto base_deriv = derivative_;
        deriv = [base_deriv, extra_derivative](double t) {
            OperatorDerivative d = base_deriv(t);
            d.hamiltonian += extra_derivative(t);
            return d;
        };
    }
    return SystemModel(dim_, interval_, std::move(eval), std::move(deriv), fd_step_);
}

OperatorSet evaluate(const SystemModel& model, double t) {
    require_in_interval(model, t, "evaluate");
    OperatorSet ops = model.evaluator()(t);
    ops.validate();
    if (ops.dim() != model.dim()) throw ArgumentError("evaluate: evaluator returned wrong dimension");
    const Matrix herm = 0.5 * (ops.hamiltonian + ops.hamiltonian.adjoint());
    ops.hermiticity_drift = (ops.hamiltonian - herm).norm();
    ops.hamiltonian = herm;
    return ops;
}

OperatorDerivative evaluate_derivative(const SystemModel& model, double t, std::optional<double> h,
                                       DerivativeSource source) {
    require_in_interval(model, t, "evaluate_derivative");
    if (source == DerivativeSource::automatic && model.has_analytic_derivative()) {
        return model.derivative_evaluator()(t);
    }
    const double step = h.value_or(model.fd_step());
    if (!(step > 0.0)) throw ArgumentError("evaluate_derivative: step must be positive");
    require_in_interval(model, t - step, "evaluate_derivative (t - h)");
    require_in_interval(model, t + step, "evaluate_derivative (t + h)");
    const OperatorSet plus = evaluate(model, t + step);
    const OperatorSet minus = evaluate(model, t - step);
    OperatorDerivative d;
    d.hamiltonian = (plus.hamiltonian - minus.hamiltonian) / (2.0 * step);
    d.lindblads.resize(plus.lindblads.size());
    for (std::size_t a = 0; a < plus.lindblads.size(); ++a) {
        d.lindblads[a] = (plus.lindblads[a] - minus.lindblads[a]) / (2.0 * step);
    }
    return d;
}

const char* to_string(ControlMode mode) noexcept {
    switch (mode) {
        case ControlMode::none: return "none";
        case ControlMode::engineered: return "engineered";
        case ControlMode::sta: return "sta";
    }
    return "unknown";
}

ControlMode parse_control_mode(const std::string& text) {
    if (text == "none") return ControlMode::none;
    if (text == "engineered") return ControlMode::engineered;
    if (text == "sta" || text == "engineered+sta") return ControlMode::sta;
    throw ArgumentError("unknown control mode '" + text + "' (expected none|engineered|sta)");
}

nlohmann::json to_json(const SqueezeSchedule& s) {
    return nlohmann::json{{"r0", s.r0},       {"theta0", s.theta0}, {"mu", s.mu},
                          {"nu", s.nu},       {"gamma", s.gamma},   {"o", s.offset_o}};
}

SqueezeSchedule parse_schedule(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ArgumentError("schedule must be a JSON object");
    SqueezeSchedule s;
    s.r0 = doc.value("r0", 0.0);
    s.theta0 = doc.value("theta0", 0.0);
    s.mu = doc.value("mu", 0.0);
    s.nu = doc.value("nu", 0.0);
    s.gamma = doc.value("gamma", 1.0);
    s.offset_o = doc.value("o", 0.0);
    for (const auto& [key, _] : doc.items()) {
        if (key != "r0" && key != "theta0" && key != "mu" && key != "nu" && key != "gamma" && key != "o") {
            throw ArgumentError("schedule: unknown key '" + key + "'");
        }
    }
    return s;
}

SystemDefinition parse_system_definition(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ArgumentError("system definition must be a JSON object");
    SystemDefinition def;
    def.dim = doc.value("dim", Index{2});
    if (def.dim != 2) throw ArgumentError("system definition: only the two-level schedule (dim = 2) is supported");
    if (!doc.contains("schedule")) throw ArgumentError("system definition: missing 'schedule'");
    def.schedule = parse_schedule(doc.at("schedule"));
    def.control = parse_control_mode(doc.value("control", std::string{"engineered"}));
    return def;
}

nlohmann::json to_json(const SystemDefinition& def) {
    return nlohmann::json{{"dim", def.dim}, {"schedule", to_json(def.schedule)}, {"control", to_string(def.control)}};
}

}  // namespace adfs::model
