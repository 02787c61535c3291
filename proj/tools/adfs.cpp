// adfs.cpp — command-line front end: run / sweep / show

#include "adfs/experiments.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace {

namespace ex = adfs::experiments;
namespace qb = adfs::qubit;

constexpr int kExitUsage = 2;
constexpr int kExitPositivity = 3;

qb::Overrides parse_overrides(const std::vector<std::string>& items) {
    qb::Overrides out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw adfs::ArgumentError("override '" + item + "' is not of the form key=value");
        }
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

nlohmann::json parse_inline_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw adfs::ArgumentError(std::string("--grid: ") + e.what());
    }
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw adfs::ArgumentError("cannot read " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw adfs::ArgumentError(path + ": " + e.what());
    }
}

adfs::dfs::DerivativeMethod parse_method(const std::string& m) {
    if (m == "analytic") return adfs::dfs::DerivativeMethod::analytic;
    if (m == "fd") return adfs::dfs::DerivativeMethod::finite_difference;
    throw adfs::ArgumentError("unknown derivative method '" + m + "' (expected analytic|fd)");
}

void print_result(const ex::RunResult& r) {
    std::cout << r.params.scenario << '/' << r.params.variant << ": final purity " << r.final_purity
              << ", final fidelity " << r.final_fidelity << ", min purity " << r.min_purity << " at t = "
              << r.t_min_purity << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-dependent decoherence-free subspaces: simulation and adiabatic diagnostics"};
    app.require_subcommand(1);

    std::string scenario;
    std::vector<std::string> override_items;
    std::string out_dir;
    std::string emit = "trajectory,xi,bound";
    std::string config;
    std::string method = "analytic";
    bool all_variants = false;
    std::string grid;

    auto* run = app.add_subcommand("run", "Integrate one scenario and write its outputs");
    run->add_option("--scenario", scenario, "fig1a|fig1b|fig2|fig3|fig4|fig5");
    run->add_option("--override", override_items, "Parameter override key=value (repeatable)");
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--emit", emit, "Comma list of trajectory,xi,bound,sta_fields,diagnostics or all");
    run->add_option("--config", config, "JSON parameter file (replaces --scenario)");
    run->add_option("--method", method, "Basis derivative: analytic|fd");
    run->add_flag("--all-variants", all_variants, "Run every curve of the scenario into subdirectories");

    auto* sw = app.add_subcommand("sweep", "Run a cartesian parameter grid");
    sw->add_option("--scenario", scenario, "Base scenario")->required();
    sw->add_option("--grid", grid, "JSON grid (inline or file): key -> list or {start, stop, count}")->required();
    sw->add_option("--out", out_dir, "Output directory")->required();
    sw->add_option("--override", override_items, "Base override key=value (repeatable)");

    auto* show = app.add_subcommand("show", "Print the resolved parameters of a scenario");
    show->add_option("--scenario", scenario, "Scenario name")->required();
    show->add_option("--override", override_items, "Parameter override key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const auto overrides = parse_overrides(override_items);
        if (*run) {
            ex::RunOptions opts;
            opts.emit = ex::parse_emit(emit);
            opts.method = parse_method(method);
            if (all_variants) {
                if (scenario.empty()) throw adfs::ArgumentError("--all-variants needs --scenario");
                for (const auto& r : ex::run_variants(scenario, overrides, out_dir, opts)) print_result(r);
                return 0;
            }
            qb::QubitExampleParams p;
            if (!config.empty()) {
                p = qb::params_from_json(read_json(config));
                for (const auto& [k, v] : overrides) qb::apply_override(p, k, v);
                qb::finalize(p);
            } else if (!scenario.empty()) {
                p = qb::scenario(scenario, overrides);
            } else {
                throw adfs::ArgumentError("run needs --scenario or --config");
            }
            print_result(ex::run_to_directory(p, out_dir, opts));
        } else if (*sw) {
            const auto axes = ex::parse_grid(grid.starts_with('{') ? parse_inline_json(grid) : read_json(grid));
            const auto rows = ex::sweep(scenario, overrides, axes, out_dir);
            std::size_t ok = 0;
            for (const auto& r : rows) ok += r.status == "ok" ? 1 : 0;
            std::cout << "sweep: " << ok << '/' << rows.size() << " points ok\n";
        } else if (*show) {
            const auto p = qb::scenario(scenario, overrides);
            // stdout stays loadable by --config; the variant labels go to stderr
            std::cout << qb::to_json(p).dump(2) << '\n';
            std::cerr << "variants:";
            for (const auto& [label, _] : qb::scenario_variants(scenario)) std::cerr << ' ' << label;
            std::cerr << '\n';
        }
    } catch (const adfs::ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const adfs::PositivityViolation& e) {
        std::cerr << "positivity violation: " << e.what() << '\n';
        return kExitPositivity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
