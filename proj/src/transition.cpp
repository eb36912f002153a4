#include "osqm/transition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

namespace osqm {

namespace {

void require_normalized(double norm2, const char* what) {
    if (std::abs(norm2 - 1) > 1e-8)
        throw ValidationError(fmt::format("{}: state must be normalised (norm^2 = {:.12g})", what, norm2));
}

// Negative probabilities above -1e-8 are quadrature noise; anything worse is not.
void clip(std::vector<double>& p, const char* what) {
    for (double& x : p) {
        if (x >= 0) continue;
        if (x < -1e-8) throw NumericalAbort(fmt::format("{}: transition probability {:.3e} below -1e-8", what, x));
        audit(std::string(what) + ": negative probability clipped", -x);
        x = 0;
    }
}

void check_sum(const std::vector<double>& p, const char* what) {
    double s = 0;
    for (double x : p) s += x;
    if (std::abs(s - 1) > 1e-6) throw ValidationError(fmt::format("{}: probabilities sum to {:.9f}, not 1", what, s));
}

// The column of rho through its largest diagonal entry is psi up to a phase.
VecC state_from_wigner(const WignerState& W) {
    const MatC rho = density_from_wigner(W).matrix;
    Eigen::Index k = 0;
    rho.diagonal().real().maxCoeff(&k);
    VecC v = rho.col(k) / std::sqrt(rho(k, k).real());
    return v / v.norm();
}

}  // namespace

RegionDecomposition decompose_over_regions(const WaveFunction& psi, const Partition& P, const ExactProjectors& E) {
    P.grid().require_same(psi.grid, "decompose_over_regions");
    VecC v = psi.coeffs();
    require_normalized(v.squaredNorm(), "decompose_over_regions");
    RegionDecomposition d;
    d.p = transition_probabilities(psi, P);
    VecC sum = VecC::Zero(v.size()), sum_povm = VecC::Zero(v.size());
    for (std::size_t j = 0; j < P.size(); ++j) {
        VecC u = E.proj[j].apply(v);
        const double n = u.norm();
        const cplx c = n > 0 ? u.dot(v) / n : cplx(0);
        d.c.push_back(c);
        d.c_formula.push_back(v.dot(u).real());
        if (n > 0) sum += c * u / n;
        VecC s = P[j].sqrt_op.apply(v);
        const double ns = s.norm();
        if (ns > 0) sum_povm += c * s / ns;
    }
    d.residual = (v - sum).norm();
    d.povm_residual = (v - sum_povm).norm();
    return d;
}

std::vector<double> transition_probabilities(const WignerState& W, const Partition& P) {
    P.grid().require_same(W.grid, "transition_probabilities");
    const double dv = W.grid.cell_volume();
    std::vector<double> p(P.size(), 0.0);
    for (std::size_t j = 0; j < P.size(); ++j) {
        const auto& s = P[j].symbol.values;
        // serial on purpose: a fixed summation order keeps runs bit-identical
        double acc = 0;
        for (std::size_t i = 0; i < s.size(); ++i) acc += s[i].real() * W.values[i];
        p[j] = acc * dv;
    }
    clip(p, "transition_probabilities");
    check_sum(p, "transition_probabilities");
    return p;
}

std::vector<double> transition_probabilities(const WaveFunction& psi, const Partition& P) {
    P.grid().require_same(psi.grid, "transition_probabilities");
    VecC v = psi.coeffs();
    require_normalized(v.squaredNorm(), "transition_probabilities");
    std::vector<double> p(P.size());
    for (std::size_t j = 0; j < P.size(); ++j) p[j] = v.dot(P[j].op.apply(v)).real();
    clip(p, "transition_probabilities");
    check_sum(p, "transition_probabilities");
    return p;
}

double uniform_draw(std::uint64_t seed, std::uint64_t counter) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(counter),
                      std::uint32_t(counter >> 32)};
    std::mt19937_64 eng(seq);
    return double(eng() >> 11) * 0x1.0p-53;
}

int sample_index(const std::vector<double>& p, double u) {
    double total = 0;
    for (double x : p) total += std::max(x, 0.0);
    if (!(total > 0)) throw ValidationError("sample_transition: all probabilities are zero");
    const double target = u * total;
    double cum = 0;
    int last = -1;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0) continue;
        last = int(j);
        cum += p[j];
        if (target < cum) return int(j);
    }
    return last;
}

int sample_transition(const std::vector<double>& p, std::uint64_t seed, std::uint64_t counter) {
    return sample_index(p, uniform_draw(seed, counter));
}

WaveFunction apply_quasiprojection(const WaveFunction& psi, const Partition& P, int region, UpdateForm form,
                                   const ExactProjectors* E) {
    if (region < 0 || std::size_t(region) >= P.size())
        throw ValidationError(fmt::format("apply_quasiprojection: no region {}", region));
    if (form == UpdateForm::projector && !E)
        throw ValidationError("apply_quasiprojection: projector form needs the exact projectors");
    P.grid().require_same(psi.grid, "apply_quasiprojection");
    VecC v = psi.coeffs();
    v /= v.norm();
    VecC w = form == UpdateForm::povm ? P[region].sqrt_op.apply(v) : E->proj[region].apply(v);
    const double pr = w.squaredNorm();
    if (!(pr > 1e-12))
        throw NumericalAbort(fmt::format("apply_quasiprojection: region '{}' has probability {:.3e}; a forbidden "
                                         "transition was sampled",
                                         P[region].label, pr));
    return WaveFunction::from_coeffs(psi.grid, w / std::sqrt(pr));
}

void ProjectionSchedule::validate() const {
    if (!(dt > 0)) throw ValidationError("schedule: dt must be positive");
    if (!(t_final > 0)) throw ValidationError("schedule: t_final must be positive");
    if (t_final < dt * (1 - 1e-9)) throw ValidationError("schedule: t_final must be at least dt");
    if (mode != ScheduleMode::continuous && !(dt_proj >= dt * (1 - 1e-9)))
        throw ValidationError(fmt::format("schedule: dt_proj = {:g} must be >= dt = {:g}", dt_proj, dt));
}

long ProjectionSchedule::steps() const { return std::max(1L, long(std::ceil(t_final / dt - 1e-9))); }

bool ProjectionSchedule::fires(long step) const {
    const long K = steps();
    if (step < 1 || step > K) return false;
    switch (mode) {
        case ScheduleMode::continuous:
            return true;
        case ScheduleMode::single_shot:
            return step == K;
        case ScheduleMode::periodic: {
            const long stride = std::max(1L, std::lround(dt_proj / step_size()));
            return step % stride == 0;
        }
    }
    return false;
}

Dynamics Dynamics::oracle(const OperatorMatrix& H, const PhaseGrid& g) {
    if (!H.hermitian) throw ValidationError("dynamics: Hamiltonian must be Hermitian");
    if (std::size_t(H.m.rows()) != g.config_dim())
        throw ValidationError("dynamics: Hamiltonian does not match the grid");
    Dynamics d;
    d.backend = Backend::oracle;
    d.grid = g;
    d.H = H;
    return d;
}

Dynamics Dynamics::phase(const WeylSymbol& H, double lvn_dt) {
    if (H.grid.dof() != 1) throw ValidationError("dynamics: the phase-space backend runs n = 1 only");
    if (!H.hermitian) throw ValidationError("dynamics: Hamiltonian symbol must be real");
    Dynamics d;
    d.backend = Backend::phase;
    d.grid = H.grid;
    d.symbol = HamiltonianSymbol::constant(H);
    d.H = OperatorMatrix::hermitian_op(weyl_operator_from_symbol(H));
    d.lvn_dt = lvn_dt;
    return d;
}

bool TrajectoryRecord::stayed() const {
    return std::all_of(region.begin(), region.end(), [&](int r) { return r == initial_region; });
}

struct BranchCache::Node {
    std::mutex mu;
    bool ready = false;
    long first_step = 0;  // the node's state lives at this step
    int region = 0;
    VecC start;
    QuasiRestriction restriction;
    bool projected = false;
    // Filled on first visit: steps first_step+1 .. last_step.
    long last_step = 0;
    bool ends_in_event = false;
    std::vector<std::vector<double>> rows;
    std::vector<Snapshot> snaps;
    VecC pre_event;
    std::map<int, std::shared_ptr<Node>> children;
};

std::shared_ptr<BranchCache::Node> BranchCache::root(const WaveFunction& psi0) {
    std::lock_guard<std::mutex> lk(mu_);
    if (!root_) {
        root_ = std::make_shared<Node>();
        root_->start = psi0.coeffs();
        ++count_;
    }
    return root_;
}

std::size_t BranchCache::nodes() const {
    std::lock_guard<std::mutex> lk(mu_);
    return count_;
}

int initial_region(const WaveFunction& psi0, const Partition& P, double tol) {
    const auto p = transition_probabilities(psi0, P);
    int best = -1;
    std::string residuals;
    for (std::size_t j = 0; j < P.size(); ++j) {
        auto q = is_quasirestricted(psi0, P[j], tol);
        residuals += fmt::format("{}{}: {:.2e}", j ? ", " : "", P[j].label, q.residual);
        if (q.ok && (best < 0 || p[j] > p[best])) best = int(j);
    }
    if (best < 0)
        throw ValidationError("run_trajectory: the initial state is not quasirestricted to any region (residuals " +
                              residuals + "); a state must lie in some coarse-graining region at all times");
    return best;
}

struct TrajectoryRunner {
    const TrajectoryContext& ctx;
    const Partition& P;
    long K;
    double h;
    MatC U;  // oracle step
    HamiltonianSymbol Hsym;
    double lvn_dt = 0;

    explicit TrajectoryRunner(const TrajectoryContext& c) : ctx(c), P(*c.partition) {
        if (!c.partition) throw ValidationError("run_trajectory: no partition");
        c.schedule.validate();
        if (c.options.form == UpdateForm::projector && !c.exact)
            throw ValidationError("run_trajectory: projector form needs the exact projectors");
        P.grid().require_same(c.dynamics.grid, "run_trajectory");
        K = c.schedule.steps();
        h = c.schedule.step_size();
        if (c.dynamics.backend == Backend::oracle) {
            U = propagator(c.dynamics.H.m, h, P.grid().hbar());
        } else {
            if (!c.dynamics.symbol) throw ValidationError("run_trajectory: phase backend needs a Hamiltonian symbol");
            Hsym = *c.dynamics.symbol;
            lvn_dt = c.dynamics.lvn_dt > 0 ? std::min(c.dynamics.lvn_dt, h) : h;
        }
    }

    // Born weights of the update in use: tr(Pi rho) for the POVM form, ||Pperp psi||^2 for projectors.
    std::vector<double> probabilities(const VecC& v, const WignerState* W) const {
        if (ctx.options.form == UpdateForm::projector) {
            std::vector<double> p(P.size());
            for (std::size_t j = 0; j < P.size(); ++j) p[j] = ctx.exact->proj[j].apply(v).squaredNorm();
            clip(p, "transition_probabilities");
            check_sum(p, "transition_probabilities");
            return p;
        }
        if (W) return transition_probabilities(*W, P);
        return transition_probabilities(WaveFunction::from_coeffs(P.grid(), v), P);
    }

    HamiltonianSymbol shifted(double t0) const {
        HamiltonianSymbol s = Hsym;
        for (double& t : s.times) t -= t0;
        return s;
    }

    // Evolve from the node's state up to the next projection event or the end.
    void fill(BranchCache::Node& n) const {
        const int stride = ctx.options.snapshot_stride;
        VecC v = n.start;
        WignerState W;
        const bool phase = ctx.dynamics.backend == Backend::phase;
        if (phase) W = wigner_from_wavefunction(WaveFunction::from_coeffs(P.grid(), v));
        if (stride > 0 && n.first_step == 0) n.snaps.push_back({0, 0.0, v});
        long k = n.first_step;
        while (k < K) {
            ++k;
            if (phase) {
                const double t0 = (k - 1) * h;
                W = evolve_lvn(W, Hsym.time_dependent() ? shifted(t0) : Hsym, h, lvn_dt);
            } else {
                v = U * v;
            }
            const bool event = ctx.schedule.fires(k);
            const bool need_v = (stride > 0 && k % stride == 0) || event || ctx.options.form == UpdateForm::projector;
            if (phase && need_v) v = state_from_wigner(W);
            n.rows.push_back(probabilities(v, phase ? &W : nullptr));
            if ((stride > 0 && k % stride == 0) || event) {
                if (stride > 0 && k % stride == 0) n.snaps.push_back({k, k * h, v});
            }
            if (event) {
                n.ends_in_event = true;
                break;
            }
        }
        n.last_step = k;
        if (n.ends_in_event) n.pre_event = v;
        n.ready = true;
    }

    std::shared_ptr<BranchCache::Node> child(BranchCache& cache, BranchCache::Node& n, int j) const {
        auto it = n.children.find(j);
        if (it != n.children.end()) return it->second;
        auto c = std::make_shared<BranchCache::Node>();
        c->first_step = n.last_step;
        c->region = j;
        c->projected = true;
        const auto psi = apply_quasiprojection(WaveFunction::from_coeffs(P.grid(), n.pre_event), P, j,
                                               ctx.options.form, ctx.exact);
        c->start = psi.coeffs();
        c->restriction = is_quasirestricted(psi, P[j], ctx.options.restriction_tol);
        std::lock_guard<std::mutex> lk(cache.mu_);
        if (cache.count_ < cache.max_nodes_) {
            n.children[j] = c;
            ++cache.count_;
        }
        return c;
    }

    TrajectoryRecord run(BranchCache& cache, std::uint64_t seed, int r0) const {
        TrajectoryRecord rec;
        rec.seed = seed;
        rec.initial_region = r0;
        rec.times.reserve(K);
        auto node = cache.root_;
        int region = r0;
        while (true) {
            std::shared_ptr<BranchCache::Node> next;
            {
                std::lock_guard<std::mutex> lk(node->mu);
                if (!node->ready) fill(*node);
                for (auto& s : node->snaps) rec.snapshots.push_back(s);
                for (long k = node->first_step + 1; k <= node->last_step; ++k) {
                    rec.times.push_back(k * h);
                    rec.probabilities.push_back(node->rows[k - node->first_step - 1]);
                    rec.region.push_back(region);
                    rec.event.push_back(0);
                }
                if (!node->ends_in_event) break;
                const long k = node->last_step;
                const auto& p = node->rows.back();
                const int j = sample_transition(p, seed, std::uint64_t(k));
                next = child(cache, *node, j);
                rec.event.back() = 1;
                rec.region.back() = j;
                ++rec.restriction_checks;
                rec.restriction_worst = std::max(rec.restriction_worst, next->restriction.residual);
                if (!next->restriction.ok) ++rec.restriction_failures;
                if (j != region) rec.transitions.push_back({k, k * h, region, j, p[j]});
                region = j;
            }
            node = next;
        }
        return rec;
    }
};

TrajectoryRecord run_trajectory(const WaveFunction& psi0, const TrajectoryContext& ctx, std::uint64_t seed,
                                BranchCache* cache) {
    TrajectoryRunner runner(ctx);
    const int r0 = initial_region(psi0, *ctx.partition, ctx.options.restriction_tol);
    BranchCache local(1u << 30);
    BranchCache& c = cache ? *cache : local;
    c.root(psi0)->region = r0;
    return runner.run(c, seed, r0);
}

EnsembleSummary run_ensemble(const WaveFunction& psi0, const TrajectoryContext& ctx, std::uint64_t base_seed, long seeds,
                             long keep) {
    if (seeds < 1) throw ValidationError("run_ensemble: need at least one seed");
    TrajectoryRunner runner(ctx);
    const Partition& P = *ctx.partition;
    const int r0 = initial_region(psi0, P, ctx.options.restriction_tol);
    BranchCache cache;
    cache.root(psi0)->region = r0;

    struct Outcome {
        int final_region = 0;
        bool stayed = false;
        long checks = 0, failures = 0;
        double worst = 0;
    };
    std::vector<Outcome> out(seeds);
    std::vector<TrajectoryRecord> kept(std::min(keep, seeds));
    std::string error;
    bool numerical = false;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < seeds; ++i) {
        try {
            auto rec = runner.run(cache, base_seed + std::uint64_t(i), r0);
            out[i] = {rec.final_region(), rec.stayed(), rec.restriction_checks, rec.restriction_failures, rec.restriction_worst};
            if (i < long(kept.size())) kept[i] = std::move(rec);
        } catch (const std::exception& e) {
#pragma omp critical(osqm_ensemble_error)
            if (error.empty()) {
                error = e.what();
                numerical = dynamic_cast<const NumericalAbort*>(&e) != nullptr;
            }
        }
    }
    if (!error.empty()) {
        if (numerical) throw NumericalAbort(error);
        throw ValidationError(error);
    }

    EnsembleSummary s;
    s.runs = seeds;
    s.final_counts.assign(P.size(), 0);
    for (const auto& o : out) {
        ++s.final_counts[o.final_region];
        s.stayed += o.stayed;
        s.restriction_checks += o.checks;
        s.restriction_failures += o.failures;
        s.restriction_worst = std::max(s.restriction_worst, o.worst);
    }
    const double n = double(seeds), z = 1.96;
    for (long c : s.final_counts) {
        const double f = c / n;
        s.frequency.push_back(f);
        s.sigma.push_back(std::sqrt(f * (1 - f) / n));
        const double den = 1 + z * z / n;
        const double mid = (f + z * z / (2 * n)) / den;
        const double half = z * std::sqrt(f * (1 - f) / n + z * z / (4 * n * n)) / den;
        s.wilson_lo.push_back(std::max(0.0, mid - half));
        s.wilson_hi.push_back(std::min(1.0, mid + half));
    }
    s.cache_nodes = cache.nodes();
    s.kept = std::move(kept);
    return s;
}

ZenoResult zeno_experiment(const WaveFunction& psi0, const OperatorMatrix& H, const Partition& P,
                           const ExactProjectors* E, UpdateForm form, int home, const std::vector<double>& dt_proj,
                           double t_total, long seeds, std::uint64_t base_seed) {
    if (home < 0 || std::size_t(home) >= P.size()) throw ValidationError("zeno_experiment: no such home region");
    if (form == UpdateForm::projector && !E)
        throw ValidationError("zeno_experiment: projector form needs the exact projectors");
    if (!(t_total > 0)) throw ValidationError("zeno_experiment: t_total must be positive");
    const auto& g = P.grid();
    const double hbar = g.hbar();
    VecC v0 = psi0.coeffs();
    v0 /= v0.norm();
    const KronOp& proj = form == UpdateForm::povm ? P[home].sqrt_op : E->proj[home];
    auto p_home = [&](const VecC& s) { return proj.apply(s).squaredNorm() / s.squaredNorm(); };

    ZenoResult res;
    res.unmonitored = p_home(propagator(H.m, t_total, hbar) * v0);
    for (double dt : dt_proj) {
        if (!(dt > 0) || dt > t_total * (1 + 1e-9))
            throw ValidationError(fmt::format("zeno_experiment: dt_proj = {:g} outside (0, t_total]", dt));
        ZenoRow row;
        row.intervals = std::max(1L, std::lround(t_total / dt));
        row.dt_proj = t_total / row.intervals;
        const MatC U = propagator(H.m, row.dt_proj, hbar);
        VecC s = v0;
        double surv = 1, mis = 0;
        for (long k = 0; k < row.intervals; ++k) {
            s = U * s;
            VecC w = proj.apply(s);
            const double ph = w.squaredNorm() / s.squaredNorm();
            mis += 1 - ph;
            surv *= ph;
            if (!(ph > 1e-300)) break;
            s = w / w.norm();
        }
        row.misprojection = mis / row.intervals;
        row.survival = surv;
        row.flagged = row.misprojection > 0.05;
        if (seeds > 0) {
            TrajectoryContext ctx;
            ctx.partition = &P;
            ctx.exact = E;
            ctx.dynamics = Dynamics::oracle(H, g);
            ctx.schedule = {row.dt_proj, row.dt_proj, t_total, ScheduleMode::periodic};
            ctx.options.form = form;
            auto ens = run_ensemble(psi0, ctx, base_seed, seeds);
            row.survival_ensemble = double(ens.stayed) / seeds;
            row.survival_sigma = std::sqrt(surv * (1 - surv) / seeds);
        }
        res.rows.push_back(row);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : res.rows) {
        if (r.flagged || !(r.misprojection > 0)) continue;
        const double x = std::log(r.dt_proj), y = std::log(r.misprojection);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++res.fitted;
    }
    if (res.fitted >= 2) {
        const double n = res.fitted;
        res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        res.intercept = (sy - res.slope * sx) / n;
    }
    return res;
}

}  // namespace osqm
