#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "osqm/coarse_graining.hpp"
#include "osqm/moyal.hpp"

namespace osqm {

struct RegionDecomposition {
    std::vector<cplx> c;            // <u_j|psi>, u_j = Pperp_j psi / ||Pperp_j psi||
    std::vector<double> c_formula;  // <psi|Pperp_j|psi>, to compare with |c_j|^2
    std::vector<double> p;          // tr(Pi_j rho)
    double residual = 0;            // ||psi - sum c_j u_j||
    double povm_residual = 0;       // same with u_j = Pi_j^{1/2} psi / ||Pi_j^{1/2} psi||
};
RegionDecomposition decompose_over_regions(const WaveFunction& psi, const Partition& P, const ExactProjectors& E);

// Symbol side: p_j = int Pi_j W dz. Tiny negatives are clipped and audited.
std::vector<double> transition_probabilities(const WignerState& W, const Partition& P);
// Trace side: <psi|Pi_j|psi>.
std::vector<double> transition_probabilities(const WaveFunction& psi, const Partition& P);

// Uniform in [0, 1) fixed by (seed, counter).
double uniform_draw(std::uint64_t seed, std::uint64_t counter);
int sample_index(const std::vector<double>& p, double u);
int sample_transition(const std::vector<double>& p, std::uint64_t seed, std::uint64_t counter);

enum class UpdateForm { povm, projector };
// Pi_R^{1/2} psi (or Pperp_R psi), renormalised.
WaveFunction apply_quasiprojection(const WaveFunction& psi, const Partition& P, int region, UpdateForm form,
                                   const ExactProjectors* E = nullptr);

enum class ScheduleMode { continuous, periodic, single_shot };
struct ProjectionSchedule {
    double dt = 0.01;
    double dt_proj = 0.1;
    double t_final = 1.0;
    ScheduleMode mode = ScheduleMode::periodic;

    void validate() const;
    long steps() const;
    double step_size() const { return t_final / steps(); }
    bool fires(long step) const;  // step in 1..steps()
};

enum class Backend { oracle, phase };

// Time evolution between projections. The oracle backend propagates the state
// vector with exp(-i H h / hbar); the phase backend integrates the
// Liouville-von Neumann equation on W and returns to a state vector only when
// a projection fires (n = 1).
struct Dynamics {
    Backend backend = Backend::oracle;
    PhaseGrid grid;
    OperatorMatrix H;
    std::optional<HamiltonianSymbol> symbol;
    double lvn_dt = 0;  // inner step for the phase backend; 0 means the schedule step

    static Dynamics oracle(const OperatorMatrix& H, const PhaseGrid& g);
    static Dynamics phase(const WeylSymbol& H, double lvn_dt = 0);
};

struct TransitionEvent {
    long step = 0;
    double time = 0;
    int from = 0, to = 0;
    double probability = 0;
};

struct Snapshot {
    long step = 0;
    double time = 0;
    VecC coeffs;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    int initial_region = 0;
    std::vector<double> times;                       // per step
    std::vector<int> region;                         // per step, after any projection
    std::vector<std::vector<double>> probabilities;  // per step, before any projection
    std::vector<char> event;                         // projection fired at this step
    std::vector<TransitionEvent> transitions;        // events that changed region
    std::vector<Snapshot> snapshots;
    long restriction_checks = 0, restriction_failures = 0;
    double restriction_worst = 0;

    int final_region() const { return region.empty() ? initial_region : region.back(); }
    bool stayed() const;
};

struct TrajectoryOptions {
    UpdateForm form = UpdateForm::povm;
    int snapshot_stride = 0;  // 0: none
    double restriction_tol = 1e-3;
};

// Shares segments of trajectories that made the same choices; thread safe.
class BranchCache {
public:
    explicit BranchCache(std::size_t max_nodes = 20000) : max_nodes_(max_nodes) {}
    struct Node;
    std::shared_ptr<Node> root(const WaveFunction& psi0);
    std::size_t nodes() const;

private:
    friend struct TrajectoryRunner;
    std::size_t max_nodes_;
    mutable std::mutex mu_;
    std::size_t count_ = 0;
    std::shared_ptr<Node> root_;
};

struct TrajectoryContext {
    const Partition* partition = nullptr;
    const ExactProjectors* exact = nullptr;  // needed for UpdateForm::projector
    Dynamics dynamics;
    ProjectionSchedule schedule;
    TrajectoryOptions options;
};

// Initial region: the most probable region among those psi0 is quasirestricted to.
int initial_region(const WaveFunction& psi0, const Partition& P, double tol = 1e-3);

TrajectoryRecord run_trajectory(const WaveFunction& psi0, const TrajectoryContext& ctx, std::uint64_t seed,
                                BranchCache* cache = nullptr);

struct EnsembleSummary {
    long runs = 0;
    std::vector<long> final_counts;
    std::vector<double> frequency, sigma, wilson_lo, wilson_hi;  // 95% Wilson interval
    long stayed = 0;                                             // never left the initial region
    long restriction_checks = 0, restriction_failures = 0;
    double restriction_worst = 0;
    std::size_t cache_nodes = 0;
    std::vector<TrajectoryRecord> kept;  // the first `keep` records
};
EnsembleSummary run_ensemble(const WaveFunction& psi0, const TrajectoryContext& ctx, std::uint64_t base_seed, long seeds,
                             long keep = 0);

struct ZenoRow {
    double dt_proj = 0;
    long intervals = 0;
    double misprojection = 0;  // mean per-interval probability of leaving, along the surviving branch
    double survival = 0;       // product of the per-interval staying probabilities
    double survival_ensemble = -1, survival_sigma = 0;
    bool flagged = false;  // leakage saturated; excluded from the fit
};
struct ZenoResult {
    std::vector<ZenoRow> rows;
    double unmonitored = 0;  // probability of being home at t_total without projections
    double slope = 0, intercept = 0;
    int fitted = 0;
};
ZenoResult zeno_experiment(const WaveFunction& psi0, const OperatorMatrix& H, const Partition& P,
                           const ExactProjectors* E, UpdateForm form, int home, const std::vector<double>& dt_proj,
                           double t_total, long seeds = 0, std::uint64_t base_seed = 1);

}  // namespace osqm
