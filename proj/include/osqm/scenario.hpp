#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "osqm/transition.hpp"

namespace osqm {

inline constexpr const char* kVersion = "0.1.0";

struct ScenarioConfig {
    std::string scenario = "trajectory";  // trajectory, measurement, zeno
    std::string backend = "oracle";       // oracle, phase

    struct Grid {
        int n = 1;
        int N = 64;
        double hbar = 1.0;
        std::vector<double> x_ext;  // empty: symmetric grid
    } grid;

    struct Hamiltonian {
        std::string preset = "oscillator";
        nlohmann::json params = nlohmann::json::object();
    } hamiltonian;

    struct Partition {
        std::vector<std::vector<double>> cuts;  // x1..xn, p1..pn
        std::vector<std::string> labels;
    } partition;

    struct InitialState {
        std::string preset = "coherent";
        nlohmann::json params = nlohmann::json::object();
        std::string project_onto;  // optional region label; applies that exact projector
    } initial_state;

    ProjectionSchedule schedule;
    UpdateForm form = UpdateForm::povm;

    struct Ensemble {
        long num_seeds = 100;
        std::uint64_t base_seed = 1;
    } ensemble;

    struct Output {
        std::string dir = "out";
        int snapshot_stride = 0;
        int trajectory_files = 10;
    } output;

    struct Zeno {
        std::vector<double> dt_proj;
        double t_total = 0;
        std::string home;
        long seeds = 0;
    } zeno;

    nlohmann::json to_json() const;
};

std::vector<std::string> hamiltonian_presets();
std::vector<std::string> initial_state_presets();

// Strict: unknown keys, wrong types and physics-invalid values are all
// collected and reported together in one ValidationError.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_json(const nlohmann::json& j);
nlohmann::json config_echo(const ScenarioConfig& cfg);  // to_json without output.dir
std::string config_hash(const ScenarioConfig& cfg);

PhaseGrid make_grid(const ScenarioConfig& cfg);
struct HamiltonianModel {
    OperatorMatrix H;
    std::optional<WeylSymbol> symbol;           // polynomial presets
    std::optional<VonNeumannCoupling> coupling;  // von-neumann-coupling, per unit time
};
HamiltonianModel make_hamiltonian(const ScenarioConfig& cfg, const PhaseGrid& g);
Partition make_partition(const ScenarioConfig& cfg, const PhaseGrid& g);
WaveFunction make_initial_state(const ScenarioConfig& cfg, const PhaseGrid& g, const Partition& P,
                                const ExactProjectors* E);

// Pointer on dof 1 with regions as position bands, observed system on dof 2.
struct MeasurementScenario {
    PhaseGrid composite, pointer_grid, observed_grid;
    Partition partition;
    int ready = 0;
    std::vector<int> outcome_region;  // per eigenvalue
    VonNeumannCoupling coupling;      // strength = rate * t_final
    double rate = 0;
    std::vector<cplx> amplitudes;
    WaveFunction ready_state, observed_state;
};
MeasurementScenario make_measurement(const ScenarioConfig& cfg);

struct MeasurementSummary {
    std::vector<std::string> labels;
    std::vector<double> eigenvalues;
    std::vector<double> born;         // |c_j|^2
    std::vector<double> born_oracle;  // <psi|Pi_R|psi> on the premeasured composite state
    std::vector<long> counts;
    std::vector<double> frequency, sigma;
    EnsembleSummary ensemble;
};
MeasurementSummary run_measurement_scenario(const ScenarioConfig& cfg);
MeasurementSummary run_measurement_scenario(const ScenarioConfig& cfg, const MeasurementScenario& ms);

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> snapshots;
    std::optional<std::string> backend;
};
ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOverrides& o);

// Runs the scenario and writes its outputs under cfg.output.dir. Returns the
// metadata written to metadata.json plus a text "summary".
nlohmann::json run_scenario(const ScenarioConfig& cfg);

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec, const Partition& P);
void write_snapshots_csv(const std::string& path, const TrajectoryRecord& rec);
void write_ensemble_csv(const std::string& path, const EnsembleSummary& s, const Partition& P);
void write_zeno_csv(const std::string& path, const ZenoResult& z);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace osqm
