// experiments.cpp

#include "adfs/experiments.hpp"

#include "adfs/csv.hpp"
#include "adfs/sta_synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace adfs::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double a, double b, Index n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

// Shortest text that parses back to the same double (for override values).
std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Non-finite doubles become null so the document stays valid JSON.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::ofstream open_file(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
    return out;
}

nlohmann::json bound_terms_json(const adiabatic::PurityBoundTerms& b) {
    auto vec = [](const RealVector& v) {
        nlohmann::json a = nlohmann::json::array();
        for (Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
        return a;
    };
    return nlohmann::json{{"t_final", b.t_final},
                          {"a_j", vec(b.a_j)},
                          {"b_m", vec(b.b_m)},
                          {"c_term", num(b.c_term)},
                          {"boundary_term", num(b.boundary_term)},
                          {"integral_terms", num(b.integral_terms)},
                          {"bound", num(b.bound)},
                          {"sup_deficit", num(b.sup_deficit)},
                          {"sup_bound", num(b.sup_bound)},
                          {"scaled_coefficient", num(b.scaled_coefficient)},
                          {"diag_boundary", num(b.diag_boundary)},
                          {"diag_weighted", num(b.diag_weighted)},
                          {"diag_derivative", num(b.diag_derivative)},
                          {"intervals", b.intervals},
                          {"converged", b.converged},
                          {"finite", b.finite}};
}

}  // namespace

EmitSet parse_emit(const std::string& list) {
    EmitSet e{false, false, false, false, false};
    std::stringstream ss(list);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        any = true;
        if (item == "all") {
            e = EmitSet{true, true, true, true, true};
        } else if (item == "trajectory") {
            e.trajectory = true;
        } else if (item == "xi") {
            e.xi = true;
        } else if (item == "bound") {
            e.bound = true;
        } else if (item == "sta_fields") {
            e.sta_fields = true;
        } else if (item == "diagnostics") {
            e.diagnostics = true;
        } else {
            throw ArgumentError("unknown output '" + item +
                                "' (expected trajectory,xi,bound,sta_fields,diagnostics or all)");
        }
    }
    if (!any) throw ArgumentError("--emit: empty output list");
    return e;
}

nlohmann::json RunResult::summary() const {
    nlohmann::json bound = nullptr;
    if (!bound_profile.empty()) {
        bound = nlohmann::json{{"min_margin", num(min_bound_margin)},
                               {"valid", min_bound_margin >= 0.0},
                               {"final_profile", num(bound_profile.back())}};
        if (has_bound_terms) bound["terms"] = bound_terms_json(bound_terms);
    }
    return nlohmann::json{
        {"schema_version", kSchemaVersion},
        {"params", qubit::to_json(params)},
        {"final", {{"purity", num(final_purity)}, {"fidelity", num(final_fidelity)}}},
        {"min_purity",
         {{"value", num(min_purity)}, {"t", t_min_purity}, {"xi_state", num(xi_at_min)}, {"interior", interior_minimum}}},
        {"max_xi", {{"state", num(max_xi_state)}, {"lindblad", num(max_xi_lindblad)}}},
        {"bound", bound},
        {"residuals",
         {{"invariance", num(max_invariance_residual)},
          {"eigen", num(max_eigen_residual)},
          {"sta", num(max_sta_residual)}}},
        {"integrator",
         {{"steps", trajectory.steps},
          {"dt", params.dt},
          {"max_trace_err", trajectory.max_trace_err()},
          {"max_herm_err", trajectory.max_herm_err()},
          {"min_eigenvalue", trajectory.min_min_eig()}}}};
}

RunResult simulate(const QubitExampleParams& p, const RunOptions& opts) {
    p.validate();
    RunResult res;
    res.params = p;
    const auto model = qubit::make_model(p);
    const dfs::DfsPath path(model);
    const auto times = linspace(0.0, p.t_final, p.samples);
    const auto bases = path.sample(times);
    const Matrix rho0 = qubit::initial_density(p, path);

    lindblad::PropagateOptions po;
    po.dt_max = p.dt;
    po.store_states = false;
    std::size_t next_basis = 0;
    // the propagator asks for targets on the sample grid in order
    po.fidelity_target = [&](double t) -> Vector {
        while (next_basis + 1 < times.size() && times[next_basis] < t) ++next_basis;
        if (times[next_basis] == t) return bases[next_basis].dfs_basis.col(0);
        return path.decompose(t).dfs_basis.col(0);
    };
    res.trajectory = lindblad::propagate(model, lindblad::DensityMatrix(rho0), times, po);

    const auto& pur = res.trajectory.purity;
    res.final_purity = pur.back();
    res.final_fidelity = res.trajectory.fidelity.back();
    const auto it = std::min_element(pur.begin(), pur.end());
    const auto imin = static_cast<std::size_t>(it - pur.begin());
    res.min_purity = *it;
    res.t_min_purity = times[imin];
    res.interior_minimum = imin > 0 && imin + 1 < pur.size();
    res.xi_at_min = kNaN;

    const std::size_t n = times.size();
    const bool want_xi = opts.emit.xi;
    if (want_xi) {
        res.xi_state.resize(n);
        res.xi_lindblad.resize(n);
        res.xi_closed_form.resize(n);
        res.omega_gap.resize(n);
        res.gamma_comp.resize(n);
        res.f_max.resize(n);
        res.prefactor.resize(n);
        res.divergent.resize(n);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double t = times[k];
        const auto ops = model::evaluate(model, t);
        const auto cond = dfs::check_conditions(ops, bases[k]);
        res.max_invariance_residual = std::max(res.max_invariance_residual, cond.invariance_residual);
        res.max_eigen_residual = std::max(res.max_eigen_residual, cond.eigen_residual);
        if (!want_xi) continue;
        const auto d = path.derivative(t, bases[k], opts.method);
        res.max_sta_residual = std::max(res.max_sta_residual, sta::verify_sta(ops, bases[k], d));
        const auto xs = adiabatic::xi_state(ops, bases[k], d);
        const auto xl = adiabatic::xi_lindblad(ops, dfs::operator_derivative(model, t), bases[k]);
        const auto sp = adiabatic::spectral_quantities(ops, bases[k]);
        const double r = p.schedule.r(t);
        res.xi_state[k] = xs.value;
        res.xi_lindblad[k] = xl.max_value();
        res.xi_closed_form[k] =
            r > 0.0 ? qubit::xi_closed_form(r, p.schedule.mu, p.schedule.nu, p.schedule.gamma) : kNaN;
        res.omega_gap[k] = sp.omega(0, 0);
        res.gamma_comp[k] = sp.gamma_comp(0);
        res.f_max[k] = xl.f_max.front();
        res.prefactor[k] = xl.prefactor.front();
        res.divergent[k] = xs.divergent || xl.divergent;
        res.max_xi_state = std::max(res.max_xi_state, xs.value);
        res.max_xi_lindblad = std::max(res.max_xi_lindblad, xl.max_value());
    }
    if (want_xi) res.xi_at_min = res.xi_state[imin];

    if (opts.emit.bound) {
        adiabatic::BoundOptions bo;
        bo.method = opts.method;
        bo.p0 = pur.front();
        bo.max_intervals = opts.bound_max_intervals;
        res.bound_profile = adiabatic::purity_bound_profile(path, times, bo);
        res.min_bound_margin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (std::isfinite(res.bound_profile[k])) {
                res.min_bound_margin = std::min(res.min_bound_margin, pur[k] - res.bound_profile[k]);
            }
        }
        res.bound_terms = adiabatic::purity_lower_bound(path, p.t_final, bo);
        res.has_bound_terms = true;
    }
    return res;
}

void write_xi_csv(std::ostream& out, const RunResult& r) {
    if (r.xi_state.empty()) throw ArgumentError("write_xi_csv: run was simulated without the xi output");
    csv::Writer w(out);
    w.header({"t", "r", "theta", "xi_state", "xi_lindblad", "xi_closed_form", "omega", "gamma", "f_max", "prefactor",
              "divergent", "bound"});
    const auto& s = r.params.schedule;
    for (std::size_t k = 0; k < r.xi_state.size(); ++k) {
        const double t = r.trajectory.times[k];
        w << t << s.r(t) << s.theta(t) << r.xi_state[k] << r.xi_lindblad[k] << r.xi_closed_form[k] << r.omega_gap[k]
          << r.gamma_comp[k] << r.f_max[k] << r.prefactor[k] << static_cast<bool>(r.divergent[k])
          << (r.bound_profile.empty() ? kNaN : r.bound_profile[k]);
        w.end_row();
    }
}

void write_sta_fields_csv(std::ostream& out, const QubitExampleParams& p, dfs::DerivativeMethod method) {
    const auto path = qubit::make_dfs_path(p);
    const auto times = linspace(0.0, p.t_final, p.samples);
    csv::Writer w(out);
    w.header({"t", "r", "theta", "closed_form_re", "closed_form_im", "coupling_abs", "block_residual", "h1_00_re",
              "h1_00_im", "h1_01_re", "h1_01_im", "h1_10_re", "h1_10_im", "h1_11_re", "h1_11_im"});
    const auto& s = p.schedule;
    for (double t : times) {
        const auto dfs = path.decompose(t);
        const auto f = sta::counterdiabatic_block(path, t, method);
        const double r = s.r(t);
        // The closed-form field is a pure sigma_x/sigma_y drive; only its P-Q block has to
        // agree with the block-off-diagonal H1, so compare Q (H1 - H(Omega')) P.
        cplx closed(kNaN, kNaN);
        double residual = kNaN;
        if (r > 0.0) {
            closed = qubit::sta_omega_prime(r, s.theta(t), s.mu, s.nu);
            residual = (dfs.proj_comp * (f.h1 - qubit::hamiltonian(closed)) * dfs.proj_dfs).norm();
        }
        w << t << r << s.theta(t) << closed.real() << closed.imag() << f.offdiag_target.norm() << residual;
        for (Index i = 0; i < 2; ++i) {
            for (Index j = 0; j < 2; ++j) w << f.h1(i, j).real() << f.h1(i, j).imag();
        }
        w.end_row();
    }
}

void write_diagnostics_csv(std::ostream& out, const QubitExampleParams& p, dfs::DerivativeMethod method) {
    const auto model = qubit::make_model(p);
    const dfs::DfsPath path(model);
    const auto times = linspace(0.0, p.t_final, p.samples);
    const auto bases = path.sample(times);
    lindblad::PropagateOptions po;
    po.dt_max = p.dt;
    const auto rec = lindblad::propagate(model, lindblad::DensityMatrix(qubit::initial_density(p, path)), times, po);

    const Index n = model.dim();
    std::vector<double> phases(static_cast<std::size_t>(n), 0.0);
    std::vector<double> prev_rate;
    csv::Writer w(out);
    w.header({"t", "coherent_leak", "backflow", "dpdt"});
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const auto ops = model::evaluate(model, t);
        const Matrix heff = dfs::effective_hamiltonian(ops, bases[k].eigenvalues);
        Matrix b(n, n);
        b << bases[k].dfs_basis, bases[k].comp_basis;
        std::vector<double> rate(static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j) rate[static_cast<std::size_t>(j)] = b.col(j).dot(heff * b.col(j)).real();
        if (k > 0) {
            const double h = t - times[k - 1];
            for (std::size_t j = 0; j < phases.size(); ++j) phases[j] += 0.5 * h * (rate[j] + prev_rate[j]);
        }
        prev_rate = rate;
        const auto d = path.derivative(t, bases[k], method);
        const Matrix& rho = rec.states[k];
        const auto diag = lindblad::rotating_frame_diagnostics(ops, bases[k], d, bases.front(), rho, phases);
        const double dpdt = 2.0 * (rho * lindblad::liouvillian_apply(ops, rho)).trace().real();
        w << t << diag.coherent_leak << diag.backflow << dpdt;
        w.end_row();
    }
}

RunResult run_to_directory(const QubitExampleParams& p, const std::filesystem::path& dir, const RunOptions& opts) {
    std::filesystem::create_directories(dir);
    RunResult res = simulate(p, opts);
    if (opts.emit.trajectory) {
        auto out = open_file(dir / "trajectory.csv");
        lindblad::write_trajectory_csv(out, res.trajectory);
    }
    if (opts.emit.xi) {
        auto out = open_file(dir / "xi.csv");
        write_xi_csv(out, res);
    }
    if (opts.emit.bound) {
        auto out = open_file(dir / "bound.json");
        const nlohmann::json doc{{"schema_version", kSchemaVersion},
                                 {"p0", res.trajectory.purity.front()},
                                 {"profile_valid", res.min_bound_margin >= 0.0},
                                 {"min_margin", num(res.min_bound_margin)},
                                 {"purity_lower_bound", bound_terms_json(res.bound_terms)}};
        out << doc.dump(2) << '\n';
    }
    if (opts.emit.sta_fields) {
        auto out = open_file(dir / "sta_fields.csv");
        write_sta_fields_csv(out, p, opts.method);
    }
    if (opts.emit.diagnostics) {
        auto out = open_file(dir / "diagnostics.csv");
        write_diagnostics_csv(out, p, opts.method);
    }
    auto out = open_file(dir / "summary.json");
    out << res.summary().dump(2) << '\n';
    return res;
}

std::vector<RunResult> run_variants(const std::string& scenario, const qubit::Overrides& base,
                                    const std::filesystem::path& dir, const RunOptions& opts) {
    const auto variants = qubit::scenario_variants(scenario);
    std::vector<QubitExampleParams> params;
    for (const auto& [label, extra] : variants) {
        qubit::Overrides ov = base;
        ov.insert(ov.end(), extra.begin(), extra.end());
        auto p = qubit::scenario(scenario, ov);
        p.variant = label;
        params.push_back(std::move(p));
    }
    std::vector<RunResult> results(params.size());
    parallel_for(params.size(), [&](std::size_t i) {
        results[i] = run_to_directory(params[i], dir / params[i].variant, opts);
    });

    auto index = open_file(dir / "variants.csv");
    csv::Writer w(index);
    w.header({"variant", "final_purity", "final_fidelity", "min_purity", "t_min_purity", "max_xi_state"});
    for (const auto& r : results) {
        w << r.params.variant << r.final_purity << r.final_fidelity << r.min_purity << r.t_min_purity
          << r.max_xi_state;
        w.end_row();
    }
    if (scenario == "fig3") {
        auto surf = open_file(dir / "surface.csv");
        csv::Writer s(surf);
        s.header({"phi0", "t", "fidelity", "purity"});
        for (const auto& r : results) {
            for (std::size_t k = 0; k < r.trajectory.times.size(); ++k) {
                s << r.params.initial.phi0 << r.trajectory.times[k] << r.trajectory.fidelity[k]
                  << r.trajectory.purity[k];
                s.end_row();
            }
        }
    }
    return results;
}

std::vector<SweepAxis> parse_grid(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ArgumentError("grid must be a JSON object of key -> values");
    std::vector<SweepAxis> axes;
    for (const auto& [key, spec] : doc.items()) {
        SweepAxis axis{key, {}};
        if (spec.is_array()) {
            for (const auto& v : spec) {
                if (v.is_number()) {
                    axis.values.push_back(shortest(v.get<double>()));
                } else if (v.is_string()) {
                    axis.values.push_back(v.get<std::string>());
                } else {
                    throw ArgumentError("grid '" + key + "': values must be numbers or strings");
                }
            }
        } else if (spec.is_object()) {
            try {
                const double a = spec.at("start").get<double>();
                const double b = spec.at("stop").get<double>();
                const auto count = spec.at("count").get<std::int64_t>();
                if (count < 0) throw ArgumentError("grid '" + key + "': count must be >= 0");
                for (std::int64_t i = 0; i < count; ++i) {
                    const double v = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
                    axis.values.push_back(shortest(v));
                }
            } catch (const nlohmann::json::exception& e) {
                throw ArgumentError("grid '" + key + "': expected {start, stop, count}: " + e.what());
            }
        } else {
            throw ArgumentError("grid '" + key + "': expected a list or {start, stop, count}");
        }
        axes.push_back(std::move(axis));
    }
    return axes;
}

std::vector<qubit::Overrides> expand_grid(const std::vector<SweepAxis>& axes) {
    if (axes.empty()) return {};
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();
    std::vector<qubit::Overrides> out;
    out.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        qubit::Overrides point(axes.size());
        std::size_t rest = i;
        for (std::size_t a = axes.size(); a-- > 0;) {
            const auto& vals = axes[a].values;
            point[a] = {axes[a].key, vals[rest % vals.size()]};
            rest /= vals.size();
        }
        out.push_back(std::move(point));
    }
    return out;
}

std::vector<SweepRow> sweep(const std::string& scenario, const qubit::Overrides& base,
                            const std::vector<SweepAxis>& axes, const std::filesystem::path& dir) {
    const auto points = expand_grid(axes);
    if (points.empty()) throw ArgumentError("sweep: the grid is empty");
    // validate every point up front so usage errors surface before any work
    std::vector<QubitExampleParams> params;
    for (const auto& pt : points) {
        qubit::Overrides ov = base;
        ov.insert(ov.end(), pt.begin(), pt.end());
        params.push_back(qubit::scenario(scenario, ov));
    }
    std::vector<SweepRow> rows(points.size());
    RunOptions opts;
    opts.emit = EmitSet{true, true, false, false, false};
    parallel_for(points.size(), [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.index = i;
        row.point = points[i];
        row.final_purity = row.final_fidelity = row.min_purity = row.max_xi = kNaN;
        try {
            const auto r = simulate(params[i], opts);
            row.final_purity = r.final_purity;
            row.final_fidelity = r.final_fidelity;
            row.min_purity = r.min_purity;
            row.max_xi = r.max_xi_state;
            row.status = "ok";
        } catch (const PositivityViolation&) {
            row.status = "positivity_violation";
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
    });

    std::filesystem::create_directories(dir);
    auto out = open_file(dir / "sweep.csv");
    csv::Writer w(out);
    out << "index";
    for (const auto& a : axes) out << ',' << csv::escape(a.key);
    out << ",final_purity,final_fidelity,min_purity,max_xi,status\r\n";
    for (const auto& row : rows) {
        w << static_cast<std::int64_t>(row.index);
        for (const auto& [k, v] : row.point) w << std::string_view(v);
        w << row.final_purity << row.final_fidelity << row.min_purity << row.max_xi << std::string_view(row.status);
        w.end_row();
    }
    return rows;
}

unsigned worker_count() {
    if (const char* env = std::getenv("ADFS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace adfs::experiments
