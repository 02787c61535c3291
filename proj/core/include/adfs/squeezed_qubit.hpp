// squeezed_qubit.hpp — two-level atom in a squeezed-vacuum reservoir
//
// Basis order (|0>, |1>), |1> excited; sigma_- = |0><1|. With sh = sinh r, ch = cosh r:
//   L = ch e^{-i theta/2} sigma_- + sh e^{i theta/2} sigma_+,   F = sqrt(gamma) L,
// and H0 = Omega |0><1| + h.c.

#pragma once

#include "adfs/dfs_path.hpp"
#include "adfs/operator_model.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <utility>
#include <vector>

namespace adfs::qubit {

using model::ControlMode;
using model::SqueezeSchedule;

Matrix sigma_minus();
Matrix sigma_plus();

// Throws DomainError for r < 0.
Matrix lindblad_L(double r, double theta);
// dL/dt for r' = dr/dt, theta' = dtheta/dt.
Matrix lindblad_L_rate(double r, double theta, double dr, double dtheta);

// Engineered field making H_eff^0 vanish on the +sqrt(sh ch) eigenvector:
//   Omega = -i gamma e^{-r} e^{-i theta/2} sqrt(sh ch) / 2   (0 at r = 0).
cplx control_omega(double r, double theta, double gamma);
// Alternative published form of the field (different phase); kept for comparison only.
cplx printed_control_omega(double r, double theta, double gamma);

// 4 |mu + i nu sh ch| / (gamma sqrt(sh ch) e^{3r}). Throws DomainError for r <= 0.
double xi_closed_form(double r, double mu, double nu, double gamma);

// Counterdiabatic field <0|H1|1>:
//   Omega' = e^{-i theta/2} (-e^{r} nu sqrt(sh ch)/2 - i e^{-r} mu / (2 sqrt(sh ch))).
// Throws DomainError for r <= 0 (use the offset o to stay away from r = 0).
cplx sta_omega_prime(double r, double theta, double mu, double nu);
// The printed version (e^{-r} on the nu-term); kept for comparison only.
cplx printed_sta_omega_prime(double r, double theta, double mu, double nu);

// Alternative published form of the eigenvector: (sqrt(sh) e^{i theta/2}, sqrt(ch)) / (sh + ch).
Vector printed_phi1(double r, double theta);

// Four-term squeezed-vacuum dissipator, each jump term paired with its own
// anticommutator (gamma ch^2 for sigma_-, gamma sh^2 for sigma_+, plus the
// two gamma sh ch e^{-/+ i theta} cross terms).
Matrix four_term_dissipator(const Matrix& rho, double r, double theta, double gamma);

Matrix hamiltonian(cplx omega);

enum class InitialKind { dfs, pure, maximally_mixed };

struct InitialState {
    InitialKind kind{InitialKind::dfs};
    double phi0{0.0};  // pure: sin(phi0)|0> + cos(phi0)|1>
};

struct QubitExampleParams {
    std::string scenario;
    std::string variant;
    SqueezeSchedule schedule;
    ControlMode control{ControlMode::engineered};
    InitialState initial;
    double horizon{3.14159265358979323846};  // max(|mu|,|nu|) * t_final
    double t_final{0.0};
    double dt{0.0};
    Index samples{2001};
    bool r0_perturbed{false};
    bool t_final_fixed{false};
    bool dt_fixed{false};

    void validate() const;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

inline constexpr double kStartPerturbation = 1e-6;

// Base bundle for fig1a|fig1b|fig2|fig3|fig4|fig5 with overrides applied in order.
// Throws ArgumentError for unknown names or keys.
QubitExampleParams scenario(const std::string& name, const Overrides& overrides = {});

// Labelled override sets reproducing every curve of a figure.
std::vector<std::pair<std::string, Overrides>> scenario_variants(const std::string& name);

const std::vector<std::string>& scenario_names();

void apply_override(QubitExampleParams& p, const std::string& key, const std::string& value);
// Fills t_final / dt / start perturbation from the schedule unless fixed explicitly.
void finalize(QubitExampleParams& p);

// Model on [0, t_final]; analytic d_t F, Hamiltonian per control mode.
model::SystemModel make_model(const QubitExampleParams& p);
model::SystemModel make_model(const SqueezeSchedule& s, ControlMode control, double t_final);

// Path tracking the +sqrt(sh ch) eigenvector (no Hamiltonian dependence).
dfs::DfsPath make_dfs_path(const QubitExampleParams& p);

Matrix initial_density(const QubitExampleParams& p, const dfs::DfsPath& path);

nlohmann::json to_json(const QubitExampleParams& p);
QubitExampleParams params_from_json(const nlohmann::json& doc);

}  // namespace adfs::qubit
