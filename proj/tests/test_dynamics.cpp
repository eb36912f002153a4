#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "osqm/classical.hpp"
#include "osqm/hilbert_oracle.hpp"
#include "osqm/moyal.hpp"

using namespace osqm;
using namespace osqm::testing;

namespace {

Poly X(int n = 1, int i = 0) { return Poly::var(2 * n, i); }
Poly P(int n = 1, int i = 0) { return Poly::var(2 * n, n + i); }
Poly C(double c, int n = 1) { return Poly::constant(2 * n, c); }

Poly oscillator() { return (X() * X() + P() * P()) * 0.5; }

// Smooth periodic-safe field: a Gaussian bump well inside the grid.
std::vector<double> bump(const PhaseGrid& g, double x0, double p0, double s) {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        double x = g.coord(k, 0) - x0, p = g.coord(k, 1) - p0;
        v[k] = std::exp(-(x * x + p * p) / (2 * s * s));
    }
    return v;
}

WeylSymbol random_symbol(const PhaseGrid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    std::vector<cplx> v(g.size());
    for (auto& a : v) a = cplx(n(rng), n(rng));
    return WeylSymbol(g, v);
}

double energy(const Poly& H, const PhasePoint& z) {
    double v[2] = {z.x[0], z.p[0]};
    return H.eval(v).real();
}

}  // namespace

TEST(Poisson, CanonicalPairsAndPolynomials) {
    auto g = PhaseGrid::symmetric(1, 32, 1.0);
    auto x = ClassicalObservable::from_poly(g, X());
    auto p = ClassicalObservable::from_poly(g, P());
    auto b = poisson_bracket(x, p);
    for (double v : b.values) EXPECT_NEAR(v, 1.0, 1e-14);
    auto x3 = ClassicalObservable::from_poly(g, X() * X() * X());
    auto b3 = poisson_bracket(x3, p);
    auto expect = ClassicalObservable::from_poly(g, X() * X() * 3.0);
    EXPECT_LT(max_abs(b3.values, expect.values), 1e-12);
}

TEST(Poisson, JacobiIdentity) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto a = ClassicalObservable::from_poly(g, X() * X() * P() + C(1.0));
    auto b = ClassicalObservable::from_poly(g, P() * P() * P() - X());
    auto c = ClassicalObservable::from_poly(g, X() * P() * P() * X());
    auto cyc = [](auto& a, auto& b, auto& c) { return poisson_bracket(a, poisson_bracket(b, c)).values; };
    auto j1 = cyc(a, b, c), j2 = cyc(b, c, a), j3 = cyc(c, a, b);
    double m = 0;
    for (std::size_t k = 0; k < j1.size(); ++k) m = std::max(m, std::abs(j1[k] + j2[k] + j3[k]));
    EXPECT_LT(m, 1e-6);

    // sampled fields go through spectral derivatives
    auto f = ClassicalObservable::from_values(g, bump(g, 1, 0, 1.2));
    auto h = ClassicalObservable::from_values(g, bump(g, -1, 0.5, 1.5));
    auto k = ClassicalObservable::from_values(g, bump(g, 0, -1, 1.0));
    auto s1 = cyc(f, h, k), s2 = cyc(h, k, f), s3 = cyc(k, f, h);
    m = 0;
    for (std::size_t i = 0; i < s1.size(); ++i) m = std::max(m, std::abs(s1[i] + s2[i] + s3[i]));
    EXPECT_LT(m, 1e-8);
}

TEST(Flow, OscillatorPeriodAndEnergy) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto H = ClassicalObservable::from_poly(g, oscillator());
    auto z0 = pt(2.0, 0.5);
    auto z = flow_map(H, z0, 2 * kPi, 2 * kPi / 2000);
    EXPECT_NEAR(z.x[0], 2.0, 1e-5);
    EXPECT_NEAR(z.p[0], 0.5, 1e-5);

    auto r = hamilton_flow(H, z0, 200 * kPi, 0.01);
    EXPECT_FALSE(r.escaped);
    double e0 = energy(oscillator(), z0), drift = 0;
    for (auto& q : r.points) drift = std::max(drift, std::abs(energy(oscillator(), q) - e0));
    EXPECT_LT(drift / e0, 1e-4);
}

TEST(Flow, AnharmonicMonodromyIsSymplectic) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    Poly Hp = P() * P() * 0.5 + X() * X() * X() * X() * 0.25;
    auto H = ClassicalObservable::from_poly(g, Hp);
    const double t = 3.0, dt = 1e-3, h = 1e-5;
    auto f = [&](double x, double p) { return flow_map(H, pt(x, p), t, dt); };
    auto xp = f(1 + h, 0.3), xm = f(1 - h, 0.3), pp = f(1, 0.3 + h), pm = f(1, 0.3 - h);
    double a = (xp.x[0] - xm.x[0]) / (2 * h), b = (pp.x[0] - pm.x[0]) / (2 * h);
    double c = (xp.p[0] - xm.p[0]) / (2 * h), d = (pp.p[0] - pm.p[0]) / (2 * h);
    EXPECT_NEAR(a * d - b * c, 1.0, 1e-6);

    // non-separable H goes through the implicit midpoint rule, also symplectic
    Poly Hn = (X() * X() + P() * P()) * (X() * X() + P() * P()) * 0.25;
    auto Hq = ClassicalObservable::from_poly(g, Hn);
    auto q = [&](double x, double p) { return flow_map(Hq, pt(x, p), 2.0, 1e-3); };
    xp = q(1 + h, 0.3), xm = q(1 - h, 0.3), pp = q(1, 0.3 + h), pm = q(1, 0.3 - h);
    a = (xp.x[0] - xm.x[0]) / (2 * h), b = (pp.x[0] - pm.x[0]) / (2 * h);
    c = (xp.p[0] - xm.p[0]) / (2 * h), d = (pp.p[0] - pm.p[0]) / (2 * h);
    EXPECT_NEAR(a * d - b * c, 1.0, 1e-6);
    auto z = q(1, 0.3);
    EXPECT_NEAR(energy(Hn, z), energy(Hn, pt(1, 0.3)), 1e-10);
}

TEST(Flow, FreeParticleAndEscape) {
    auto g = PhaseGrid::symmetric(1, 32, 1.0);
    auto H = ClassicalObservable::from_poly(g, P() * P() * 0.5);
    auto z = flow_map(H, pt(-1.0, 0.5), 2.0, 0.01);
    EXPECT_NEAR(z.x[0], 0.0, 1e-12);
    EXPECT_NEAR(z.p[0], 0.5, 1e-12);
    auto r = hamilton_flow(H, pt(0.0, 3.0), 10.0, 0.01);
    EXPECT_TRUE(r.escaped);
}

TEST(Flow, RegionRotatesUnderOscillator) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto H = ClassicalObservable::from_poly(g, oscillator());
    CellMask R(g.size(), 0);
    for (std::size_t k = 0; k < R.size(); ++k) {
        double x = g.coord(k, 0), p = g.coord(k, 1);
        R[k] = (x > 1 && x < 4 && std::abs(p) < 1) ? 1 : 0;
    }
    // a quarter period maps (x, p) -> (p, -x)
    auto Rt = evolve_region_classically(R, H, kPi / 2);
    long area = 0, area_t = 0, mismatch = 0;
    for (std::size_t k = 0; k < R.size(); ++k) {
        double x = g.coord(k, 0), p = g.coord(k, 1);
        bool want = (-p > 1 && -p < 4 && std::abs(x) < 1);
        area += R[k];
        area_t += Rt[k];
        mismatch += (bool(Rt[k]) != want);
    }
    EXPECT_NEAR(double(area_t), double(area), 0.05 * area);
    EXPECT_LT(mismatch, 0.05 * area);
    EXPECT_THROW(evolve_region_classically(R, ClassicalObservable::from_poly(g, P() * P() * 0.5), 20.0),
                 ValidationError);
}

TEST(Moyal, FastMatchesSerialTwistedConvolution) {
    std::mt19937_64 rng(11);
    auto g = PhaseGrid::symmetric(1, 16, 1.0);
    auto plan = StarProductPlan::make(g);
    for (int t = 0; t < 3; ++t) {
        auto a = random_symbol(g, rng), b = random_symbol(g, rng);
        auto fast = moyal_product(a, b);
        auto slow = moyal_product_serial(plan, a, b);
        EXPECT_LT(max_abs(fast.values, slow.values), 1e-9);
    }
}

TEST(Moyal, OperatorIdentityAndAssociativity) {
    std::mt19937_64 rng(12);
    auto g = PhaseGrid::symmetric(1, 32, 1.0);
    auto plan = StarProductPlan::make(g);
    auto a = random_symbol(g, rng), b = random_symbol(g, rng), c = random_symbol(g, rng);
    // serial route checked against the plain matrix product
    auto ab = moyal_product_serial(plan, a, b);
    MatC want = weyl_operator_from_symbol(a) * weyl_operator_from_symbol(b);
    EXPECT_LT((weyl_operator_from_symbol(ab) - want).cwiseAbs().maxCoeff(), 1e-9);
    auto l = moyal_product_serial(plan, ab, c);
    auto r = moyal_product_serial(plan, a, moyal_product_serial(plan, b, c));
    EXPECT_LT(max_abs(l.values, r.values), 1e-8);
}

TEST(Moyal, PolynomialCommutators) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    const double hb = g.hbar();
    Poly xp = moyal_product_poly(X(), P(), hb, 1) - moyal_product_poly(P(), X(), hb, 1);
    ASSERT_EQ(xp.terms().size(), 1u);
    EXPECT_NEAR(std::abs(xp.terms().begin()->second - cplx(0, hb)), 0, 1e-15);

    // quadratic H: Moyal bracket equals the Poisson bracket
    auto H = WeylSymbol::from_poly(g, oscillator());
    auto A = WeylSymbol::from_poly(g, X() * X() * X() * P());
    auto mb = moyal_bracket(A, H);
    auto pb = poisson_bracket(ClassicalObservable::from_poly(g, X() * X() * X() * P()),
                              ClassicalObservable::from_poly(g, oscillator()));
    for (std::size_t k = 0; k < pb.values.size(); ++k) EXPECT_NEAR(mb.values[k].real(), pb.values[k], 1e-9);
}

TEST(Moyal, CubicBracketCorrectionMatchesOracle) {
    // {{x^3, p^3}} = 9 x^2 p^2 - 3 hbar^2 / 2, checked as an expectation value
    // against (X^3 P^3 - P^3 X^3) / (i hbar) on localized states, over an hbar sweep.
    Poly x3 = X() * X() * X(), p3 = P() * P() * P();
    std::vector<double> hs = {0.2, 0.1, 0.05}, corr;
    for (double hb : hs) {
        auto g = PhaseGrid::symmetric(1, 128, hb);
        auto mb = moyal_bracket(WeylSymbol::from_poly(g, x3), WeylSymbol::from_poly(g, p3));
        Poly want = X() * X() * P() * P() * 9.0 - C(1.5 * hb * hb);
        Poly diff = *mb.poly - want;
        for (auto& [e, c] : diff.terms()) EXPECT_LT(std::abs(c), 1e-12);

        MatC Xo = position_operator(g, 0), Po = momentum_operator(g, 0);
        MatC X3 = Xo * Xo * Xo, P3 = Po * Po * Po;
        MatC Cm = (X3 * P3 - P3 * X3) / cplx(0, hb);
        auto psi = coherent_state(g, pt(0.4, -0.3));
        VecC v = psi.coeffs();
        double oracle = v.dot(Cm * v).real();
        double moyal = mean_value(mb, wigner_from_wavefunction(psi));
        double poisson = mean_value(WeylSymbol::from_poly(g, X() * X() * P() * P() * 9.0), wigner_from_wavefunction(psi));
        EXPECT_NEAR(moyal, oracle, 1e-6);
        corr.push_back(std::abs(oracle - poisson));
    }
    double slope = std::log(corr[0] / corr[2]) / std::log(hs[0] / hs[2]);
    EXPECT_NEAR(slope, 2.0, 0.05);
}

TEST(Moyal, TruncationErrorScalesWithOrder) {
    std::vector<double> hs = {0.04, 0.02, 0.01};
    std::vector<int> Ns = {100, 200, 400};
    for (int order : {1, 2}) {
        std::vector<double> err;
        for (std::size_t i = 0; i < hs.size(); ++i) {
            PhaseGrid g(1, Ns[i], hs[i], {2.5});
            auto a = WeylSymbol::from_real(g, bump(g, 0.3, 0.0, 0.4));
            auto b = WeylSymbol::from_real(g, bump(g, -0.2, 0.25, 0.4));
            auto exact = moyal_product(a, b);
            auto tr = moyal_product_truncated(a, b, order);
            err.push_back(max_abs(exact.values, tr.values));
        }
        double slope = std::log(err[0] / err[2]) / std::log(hs[0] / hs[2]);
        EXPECT_NEAR(slope, order + 1.0, 0.2) << "order " << order;
    }
}

TEST(Lvn, OscillatorPeriodMatchesSchrodinger) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto Hs = WeylSymbol::from_poly(g, oscillator());
    auto psi = coherent_state(g, pt(2.0, 0.5));
    auto W0 = wigner_from_wavefunction(psi);
    LvnReport rep;
    auto W = evolve_lvn(W0, HamiltonianSymbol::constant(Hs), 2 * kPi, 2 * kPi / 1000, &rep);
    auto H = OperatorMatrix::hermitian_op(weyl_operator_from_symbol(Hs));
    auto Wo = wigner_from_wavefunction(schrodinger_propagate(psi, H, 2 * kPi));
    EXPECT_LT(max_abs(W.values, Wo.values), 1e-5);
    EXPECT_LT(max_abs(W.values, W0.values), 1e-5);
    EXPECT_LT(rep.norm_drift, 1e-8);
}

TEST(Lvn, FreeParticleAndTimeDependence) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto Hs = WeylSymbol::from_poly(g, P() * P() * 0.5);
    auto psi = coherent_state(g, pt(-1.0, 1.0));
    auto W = evolve_lvn(wigner_from_wavefunction(psi), HamiltonianSymbol::constant(Hs), 1.5, 1.5 / 250);
    auto Wo = wigner_from_wavefunction(schrodinger_propagate(psi, OperatorMatrix::hermitian_op(weyl_operator_from_symbol(Hs)), 1.5));
    EXPECT_LT(max_abs(W.values, Wo.values), 1e-5);

    // two identical keyframes reproduce the constant case
    HamiltonianSymbol H2{{0.0, 1.5}, {Hs, Hs}};
    auto W2 = evolve_lvn(wigner_from_wavefunction(psi), H2, 1.5, 1.5 / 250);
    EXPECT_LT(max_abs(W.values, W2.values), 1e-12);
}

TEST(Lvn, UnstableStepAborts) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto Hs = WeylSymbol::from_poly(g, oscillator());
    auto W0 = wigner_from_wavefunction(coherent_state(g, pt(1.0, 0.0)));
    EXPECT_THROW(evolve_lvn(W0, HamiltonianSymbol::constant(Hs), 5.0, 0.5), NumericalAbort);
}
