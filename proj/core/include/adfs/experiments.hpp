// experiments.hpp — scenario runs, variant fan-out and parameter sweeps with CSV/JSON output

#pragma once

#include "adfs/adiabatic_monitor.hpp"
#include "adfs/lindblad_integrator.hpp"
#include "adfs/squeezed_qubit.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace adfs::experiments {

using qubit::QubitExampleParams;

inline constexpr int kSchemaVersion = 1;

struct EmitSet {
    bool trajectory{true};
    bool xi{true};
    bool bound{true};
    bool sta_fields{false};
    bool diagnostics{false};
};

// Comma-separated subset of trajectory,xi,bound,sta_fields,diagnostics, or "all".
EmitSet parse_emit(const std::string& list);

struct RunOptions {
    EmitSet emit;
    dfs::DerivativeMethod method{dfs::DerivativeMethod::analytic};
    Index bound_max_intervals{1 << 12};
};

struct RunResult {
    QubitExampleParams params;
    lindblad::TrajectoryRecord trajectory;  // states not stored

    // Per-sample series (empty unless the matching output was requested).
    std::vector<double> xi_state;
    std::vector<double> xi_lindblad;
    std::vector<double> xi_closed_form;  // nan where r <= 0
    std::vector<double> omega_gap;       // omega_{11}
    std::vector<double> gamma_comp;      // Gamma_1
    std::vector<double> f_max;
    std::vector<double> prefactor;
    std::vector<bool> divergent;
    std::vector<double> bound_profile;  // running lower bound with p0 = purity(rho0)

    bool has_bound_terms{false};
    adiabatic::PurityBoundTerms bound_terms;

    double final_purity{0.0};
    double final_fidelity{0.0};
    double min_purity{1.0};
    double t_min_purity{0.0};
    double xi_at_min{0.0};
    bool interior_minimum{false};
    double max_xi_state{0.0};
    double max_xi_lindblad{0.0};
    double min_bound_margin{0.0};  // min_k purity(t_k) - bound(t_k); >= 0 when the bound holds
    double max_invariance_residual{0.0};
    double max_eigen_residual{0.0};
    double max_sta_residual{0.0};

    nlohmann::json summary() const;
};

// Integrates the scenario and evaluates the requested monitors on the sample grid.
RunResult simulate(const QubitExampleParams& p, const RunOptions& opts = {});

void write_xi_csv(std::ostream& out, const RunResult& r);
void write_sta_fields_csv(std::ostream& out, const QubitExampleParams& p,
                          dfs::DerivativeMethod method = dfs::DerivativeMethod::analytic);
void write_diagnostics_csv(std::ostream& out, const QubitExampleParams& p,
                           dfs::DerivativeMethod method = dfs::DerivativeMethod::analytic);

// simulate() + every requested file in `dir` (created if missing); summary.json always.
RunResult run_to_directory(const QubitExampleParams& p, const std::filesystem::path& dir, const RunOptions& opts = {});

// One subdirectory per variant of the scenario; fig3 also gets a long-format surface.csv.
std::vector<RunResult> run_variants(const std::string& scenario, const qubit::Overrides& base,
                                    const std::filesystem::path& dir, const RunOptions& opts = {});

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;  // override values (numbers already formatted)
};

// JSON object: key -> [values...] (numbers or strings) or {"start", "stop", "count"};
// axes in sorted key order.
std::vector<SweepAxis> parse_grid(const nlohmann::json& doc);
// Cartesian product, last axis fastest. Empty if any axis is empty.
std::vector<qubit::Overrides> expand_grid(const std::vector<SweepAxis>& axes);

struct SweepRow {
    std::size_t index{0};
    qubit::Overrides point;
    double final_purity{0.0};
    double final_fidelity{0.0};
    double min_purity{0.0};
    double max_xi{0.0};
    std::string status;  // ok | positivity_violation | error: ...
};

// Runs every grid point (trajectory + xi only) and writes sweep.csv in index order.
// Throws ArgumentError for an empty grid.
std::vector<SweepRow> sweep(const std::string& scenario, const qubit::Overrides& base,
                            const std::vector<SweepAxis>& axes, const std::filesystem::path& dir);

// Worker count from ADFS_THREADS, else hardware concurrency (at least 1).
unsigned worker_count();
// Calls fn(i) for i in [0, n) on worker_count() threads; rethrows the first exception.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace adfs::experiments
