#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "osqm/transition.hpp"

using namespace osqm;
using namespace osqm::testing;

namespace {

Partition half_planes(const PhaseGrid& g, double cut = 0.0) { return Partition::build(g, BoxSpec{{{cut}, {}}, {}}); }

WaveFunction cat(const PhaseGrid& g, cplx a, const PhasePoint& za, cplx b, const PhasePoint& zb) {
    WaveFunction psi{g, a * coherent_state(g, za).values + b * coherent_state(g, zb).values};
    psi.normalize();
    return psi;
}

double fidelity(const VecC& a, const VecC& b) { return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm()); }

OperatorMatrix oscillator(const PhaseGrid& g) { return OperatorMatrix::hermitian_op(oscillator_matrix(g)); }

}  // namespace

TEST(Decompose, CoherentAndCats) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto P = half_planes(g);
    auto E = classicality_projectors(P, false);

    auto d = decompose_over_regions(coherent_state(g, pt(-6, 0)), P, E);
    EXPECT_NEAR(std::abs(d.c[0]), 1.0, 1e-6);
    EXPECT_LT(std::abs(d.c[1]), 1e-6);
    EXPECT_LT(d.residual, 1e-10);

    auto even = decompose_over_regions(cat(g, 1, pt(-6, 0), 1, pt(6, 0)), P, E);
    EXPECT_NEAR(even.p[0], 0.5, 1e-3);
    EXPECT_NEAR(even.p[1], 0.5, 1e-3);

    auto psi = cat(g, 0.6, pt(-6, 0.5), 0.8, pt(6, -0.5));
    auto d2 = decompose_over_regions(psi, P, E);
    VecC v = psi.coeffs();
    for (int j = 0; j < 2; ++j) {
        const double oracle = v.dot(P[j].op.dense() * v).real();
        EXPECT_NEAR(d2.p[j], oracle, 1e-12);
        EXPECT_NEAR(std::norm(d2.c[j]), d2.c_formula[j], 1e-12);
    }
    EXPECT_NEAR(d2.p[0], 0.36, 1e-3);
    EXPECT_NEAR(d2.p[1], 0.64, 1e-3);
    EXPECT_LT(d2.residual, 1e-10);
    EXPECT_LT(d2.povm_residual, 1e-3);

    WaveFunction bad = psi;
    bad.values *= 2.0;
    EXPECT_THROW(decompose_over_regions(bad, P, E), ValidationError);
}

TEST(Probabilities, SymbolSideMatchesTraceOnRandomPairs) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> cut(-2.5, 2.5);
    int pairs = 0;
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
        // one cut per axis, alternating single and crossed cuts
        BoxSpec spec{{{cut(rng)}, {}}, {}};
        if (k % 2) spec.cuts[1] = {cut(rng)};
        auto P = Partition::build(g, spec);
        for (int s = 0; s < 5; ++s, ++pairs) {
            auto psi = random_localized_state(g, rng);
            auto ps = transition_probabilities(wigner_from_wavefunction(psi), P);
            auto pt = transition_probabilities(psi, P);
            double sum = 0;
            for (std::size_t j = 0; j < P.size(); ++j) worst = std::max(worst, std::abs(ps[j] - pt[j])), sum += ps[j];
            EXPECT_NEAR(sum, 1.0, 1e-6);
        }
    }
    EXPECT_EQ(pairs, 50);
    EXPECT_LT(worst, 1e-8);
}

TEST(Probabilities, Examples) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto one = Partition::build(g, BoxSpec{{{}, {}}, {}});
    auto W = wigner_from_wavefunction(coherent_state(g, pt(1, 1)));
    auto p1 = transition_probabilities(W, one);
    ASSERT_EQ(p1.size(), 1u);
    EXPECT_NEAR(p1[0], 1.0, 1e-10);

    auto P = half_planes(g);
    EXPECT_NEAR(transition_probabilities(wigner_from_wavefunction(coherent_state(g, pt(-6, 0))), P)[0], 1.0, 1e-6);

    // equal mixture of mirror-image packets
    auto Wa = wigner_from_wavefunction(coherent_state(g, pt(-4, 1)));
    auto Wb = wigner_from_wavefunction(coherent_state(g, pt(4, -1)));
    WignerState mix{g, Wa.values};
    for (std::size_t i = 0; i < mix.values.size(); ++i) mix.values[i] = (Wa.values[i] + Wb.values[i]) / 2;
    auto pm = transition_probabilities(mix, P);
    EXPECT_NEAR(pm[0], 0.5, 1e-3);
    EXPECT_NEAR(pm[1], 0.5, 1e-3);
}

TEST(Sampling, FrequenciesAndDeterminism) {
    for (int s = 0; s < 100; ++s) EXPECT_EQ(sample_transition({1.0, 0.0}, s, 3), 0);
    auto freq = [](std::vector<double> p) {
        int hits = 0;
        for (int s = 0; s < 10000; ++s) hits += sample_transition(p, 1000 + s, 7) == 0;
        return hits / 1e4;
    };
    EXPECT_NEAR(freq({0.5, 0.5}), 0.5, 0.015);
    EXPECT_NEAR(freq({0.36, 0.64}), 0.36, 0.015);
    EXPECT_EQ(uniform_draw(42, 9), uniform_draw(42, 9));
    EXPECT_NE(uniform_draw(42, 9), uniform_draw(42, 10));
    EXPECT_NE(uniform_draw(42, 9), uniform_draw(43, 9));
    double u = uniform_draw(1, 1);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_THROW(sample_transition({0.0, 0.0}, 1, 1), ValidationError);
}

TEST(Quasiprojection, Examples) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto P = half_planes(g);
    auto E = classicality_projectors(P, false);
    auto D = quasiprojector_defect(P);

    auto inside = coherent_state(g, pt(-6, 0.5));
    auto post = apply_quasiprojection(inside, P, 0, UpdateForm::povm);
    EXPECT_GT(fidelity(post.coeffs(), inside.coeffs()), 1 - 1e-4);

    auto psi = cat(g, 1, pt(-6, 0), 1, pt(6, 0));
    auto left = apply_quasiprojection(psi, P, 0, UpdateForm::povm);
    EXPECT_TRUE(is_quasirestricted(left, P[0]).ok);
    EXPECT_LT(fidelity(left.coeffs(), coherent_state(g, pt(6, 0)).coeffs()), 1e-3);

    // projector limit, on a state straddling the boundary
    auto straddle = coherent_state(g, pt(-0.7, 0.3));
    VecC a = apply_quasiprojection(straddle, P, 0, UpdateForm::povm).coeffs();
    VecC b = apply_quasiprojection(straddle, P, 0, UpdateForm::projector, &E).coeffs();
    b *= std::polar(1.0, std::arg(b.dot(a)));
    EXPECT_LT((a - b).norm(), 3 * D.operator_norm);

    EXPECT_THROW(apply_quasiprojection(coherent_state(g, pt(-8, 0)), P, 1, UpdateForm::projector, &E), NumericalAbort);
    EXPECT_THROW(apply_quasiprojection(psi, P, 0, UpdateForm::projector), ValidationError);
}

TEST(Schedule, ValidationAndFiring) {
    ProjectionSchedule s{0.1, 0.05, 1.0, ScheduleMode::periodic};
    EXPECT_THROW(s.validate(), ValidationError);
    s.dt_proj = 0.3;
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.steps(), 10);
    EXPECT_TRUE(s.fires(3));
    EXPECT_FALSE(s.fires(4));
    EXPECT_TRUE(s.fires(9));
    s.mode = ScheduleMode::single_shot;
    EXPECT_FALSE(s.fires(9));
    EXPECT_TRUE(s.fires(10));
    s.mode = ScheduleMode::continuous;
    for (int k = 1; k <= 10; ++k) EXPECT_TRUE(s.fires(k));
    EXPECT_FALSE(s.fires(0));
    EXPECT_THROW((ProjectionSchedule{0.0, 1, 1, ScheduleMode::periodic}.validate()), ValidationError);
}

TEST(Trajectory, NoDynamicsNeverLeaves) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto P = half_planes(g);
    auto E = classicality_projectors(P, false);
    auto psi0 = coherent_state(g, pt(-4, 0));
    MatC zero = MatC::Zero(64, 64);
    for (auto mode : {ScheduleMode::continuous, ScheduleMode::periodic, ScheduleMode::single_shot})
        for (auto form : {UpdateForm::povm, UpdateForm::projector}) {
            TrajectoryContext ctx;
            ctx.partition = &P;
            ctx.exact = &E;
            ctx.dynamics = Dynamics::oracle(OperatorMatrix::hermitian_op(zero), g);
            ctx.schedule = {0.05, 0.2, 1.0, mode};
            ctx.options.form = form;
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                auto rec = run_trajectory(psi0, ctx, seed);
                EXPECT_EQ(rec.initial_region, 0);
                EXPECT_TRUE(rec.stayed());
                EXPECT_TRUE(rec.transitions.empty());
                EXPECT_EQ(rec.restriction_failures, 0);
                EXPECT_EQ(rec.times.size(), 20u);
            }
        }
    TrajectoryContext ctx;
    ctx.partition = &P;
    ctx.dynamics = Dynamics::phase(WeylSymbol::from_real(g, std::vector<double>(g.size(), 0.0)));
    ctx.schedule = {0.1, 0.1, 0.5, ScheduleMode::continuous};
    auto rec = run_trajectory(psi0, ctx, 3);
    EXPECT_TRUE(rec.stayed());
    EXPECT_EQ(rec.restriction_checks, 5);
}

TEST(Trajectory, RejectsStateOutsideEveryRegion) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto P = half_planes(g);
    TrajectoryContext ctx;
    ctx.partition = &P;
    ctx.dynamics = Dynamics::oracle(oscillator(g), g);
    ctx.schedule = {0.1, 0.1, 1.0, ScheduleMode::periodic};
    try {
        run_trajectory(cat(g, 1, pt(-6, 0), 1, pt(6, 0)), ctx, 1);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("quasirestricted"), std::string::npos);
    }
}

TEST(Trajectory, DeterministicWithAndWithoutCache) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto P = half_planes(g);
    TrajectoryContext ctx;
    ctx.partition = &P;
    ctx.dynamics = Dynamics::oracle(oscillator(g), g);
    ctx.schedule = {2 * kPi / 64, 2 * kPi / 16, 2 * kPi, ScheduleMode::periodic};
    ctx.options.snapshot_stride = 8;
    auto psi0 = coherent_state(g, pt(-3, 0));
    BranchCache cache;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto a = run_trajectory(psi0, ctx, seed);
        auto b = run_trajectory(psi0, ctx, seed);
        auto c = run_trajectory(psi0, ctx, seed, &cache);
        for (const auto* r : {&b, &c}) {
            EXPECT_EQ(a.region, r->region);
            EXPECT_EQ(a.times, r->times);
            EXPECT_EQ(a.probabilities, r->probabilities);
            EXPECT_EQ(a.event, r->event);
            ASSERT_EQ(a.snapshots.size(), r->snapshots.size());
            for (std::size_t k = 0; k < a.snapshots.size(); ++k) EXPECT_EQ(a.snapshots[k].coeffs, r->snapshots[k].coeffs);
        }
        EXPECT_EQ(a.restriction_failures, 0);
        for (const auto& row : a.probabilities) {
            double s = 0;
            for (double x : row) s += x;
            EXPECT_NEAR(s, 1.0, 1e-6);
        }
        EXPECT_EQ(a.snapshots.size(), 9u);
    }
    // the packet rotates through the right half-plane: some seeds must switch
    auto ens = run_ensemble(psi0, ctx, 0, 200);
    EXPECT_GT(ens.final_counts[0], 0);
    EXPECT_GT(ens.final_counts[1], 0);
    EXPECT_EQ(ens.restriction_failures, 0);
    EXPECT_GT(ens.restriction_checks, 0);
}

// A packet heading right through x = 0. One projection at the end reproduces
// the unprojected Born weights; projecting every step freezes the packet.
TEST(Trajectory, FreeParticleCrossingAndZenoSuppression) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto P = half_planes(g);
    auto E = classicality_projectors(P, false);
    MatC Pm = momentum_operator(g, 0);
    auto H = OperatorMatrix::hermitian_op(Pm * Pm / 2.0);
    auto psi0 = apply_quasiprojection(coherent_state(g, pt(-4, 2)), P, 0, UpdateForm::projector, &E);
    const double T = 4.0;
    auto free_end = schrodinger_propagate(psi0, H, T);
    const double born_right = transition_probabilities(free_end, P)[1];

    TrajectoryContext ctx;
    ctx.partition = &P;
    ctx.exact = &E;
    ctx.dynamics = Dynamics::oracle(H, g);
    ctx.options.form = UpdateForm::projector;
    ctx.schedule = {T / 100, T, T, ScheduleMode::single_shot};
    auto shot = run_ensemble(psi0, ctx, 7, 1000);
    EXPECT_NEAR(shot.frequency[1], born_right, 0.05);

    ctx.schedule.mode = ScheduleMode::continuous;
    auto cont = run_ensemble(psi0, ctx, 7, 1000);
    EXPECT_LT(cont.frequency[1], born_right - 0.3);
    EXPECT_EQ(cont.restriction_failures, 0);
}

// Deep inside a region, projecting every step changes nothing measurable.
TEST(Trajectory, InteriorDynamicsUnaffectedByProjection) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto P = Partition::build(g, BoxSpec{{{-8.5, 8.5}, {}}, {}});
    auto psi0 = coherent_state(g, pt(1, 0));
    auto H = oscillator(g);
    const double T = 2 * kPi;

    auto inner = interior_region(P[1]);
    auto W0 = wigner_from_wavefunction(psi0);
    double outside = 0;
    for (std::size_t i = 0; i < inner.size(); ++i)
        if (!inner[i]) outside += std::abs(W0.values[i]) * g.cell_volume();
    ASSERT_LT(outside, 1e-6);

    TrajectoryContext ctx;
    ctx.partition = &P;
    ctx.dynamics = Dynamics::oracle(H, g);
    ctx.schedule = {T / 200, T / 200, T, ScheduleMode::continuous};
    ctx.options.snapshot_stride = 20;
    auto rec = run_trajectory(psi0, ctx, 5);
    EXPECT_TRUE(rec.stayed());
    for (const auto& s : rec.snapshots) {
        if (s.step == 0) continue;
        auto free = schrodinger_propagate(psi0, H, s.time).coeffs();
        EXPECT_GT(fidelity(free, s.coeffs), 1 - 1e-4 * s.time) << "t = " << s.time;
    }
}

TEST(Trajectory, PhaseBackendMatchesOracleBackend) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto P = half_planes(g);
    auto Hs = WeylSymbol::from_poly(g, (Poly::var(2, 0) * Poly::var(2, 0) + Poly::var(2, 1) * Poly::var(2, 1)) * 0.5);
    TrajectoryContext a, b;
    a.partition = b.partition = &P;
    a.dynamics = Dynamics::oracle(oscillator(g), g);
    b.dynamics = Dynamics::phase(Hs, 2 * kPi / 1000);
    a.schedule = b.schedule = {kPi / 100, kPi / 4, kPi, ScheduleMode::periodic};
    auto psi0 = coherent_state(g, pt(-3, 0));
    for (std::uint64_t seed : {2u}) {
        auto ra = run_trajectory(psi0, a, seed), rb = run_trajectory(psi0, b, seed);
        EXPECT_EQ(ra.region, rb.region);
        for (std::size_t k = 0; k < ra.probabilities.size(); ++k)
            for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(ra.probabilities[k][j], rb.probabilities[k][j], 1e-5);
    }
}

TEST(Zeno, DtSquaredLawAndSingleShot) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto P = half_planes(g);
    auto E = classicality_projectors(P, false);
    auto psi0 = apply_quasiprojection(coherent_state(g, pt(-2, 0)), P, 0, UpdateForm::projector, &E);
    auto H = oscillator(g);
    std::vector<double> dts{1e-4, 2e-4, 5e-4, 1e-3};
    auto z = zeno_experiment(psi0, H, P, &E, UpdateForm::projector, 0, dts, 1e-2);
    EXPECT_EQ(z.fitted, 4);
    EXPECT_NEAR(z.slope, 2.0, 0.2);
    EXPECT_NEAR(z.rows[0].misprojection / z.rows[1].misprojection, 0.25, 0.03);

    auto one = zeno_experiment(psi0, H, P, &E, UpdateForm::projector, 0, {2.0}, 2.0);
    EXPECT_NEAR(one.rows[0].survival, one.unmonitored, 1e-12);
    EXPECT_NEAR(1 - one.rows[0].misprojection, one.unmonitored, 1e-12);
}

TEST(Zeno, SurvivalMonotoneAndEnsembleAgrees) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto P = half_planes(g);
    auto E = classicality_projectors(P, false);
    auto psi0 = apply_quasiprojection(coherent_state(g, pt(-2, 0)), P, 0, UpdateForm::projector, &E);
    const double T = 2 * kPi;
    std::vector<double> dts;
    for (int K : {3, 4, 6, 8, 16, 32, 64, 128}) dts.push_back(T / K);
    auto z = zeno_experiment(psi0, oscillator(g), P, &E, UpdateForm::projector, 0, dts, T, 2000, 17);
    for (std::size_t i = 1; i < z.rows.size(); ++i) EXPECT_GT(z.rows[i].survival, z.rows[i - 1].survival);
    for (const auto& r : z.rows)
        EXPECT_LE(std::abs(r.survival_ensemble - r.survival), 4 * r.survival_sigma + 1e-3) << "K = " << r.intervals;
}
