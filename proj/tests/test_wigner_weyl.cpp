#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "helpers.hpp"
#include "osqm/hilbert_oracle.hpp"
#include "osqm/wigner_weyl.hpp"

using namespace osqm;
using namespace osqm::testing;

TEST(WeylMap, FastMatchesSerialReference) {
    std::mt19937_64 rng(1);
    for (int N : {16, 32, 34}) {
        MatC M = random_matrix(N, rng);
        std::vector<cplx> rm(N * N), a1(N * N), a2(N * N), m1(N * N), m2(N * N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) rm[a * N + b] = M(a, b);
        weyl::symbol_1d(rm.data(), a1.data(), N);
        weyl::symbol_1d_serial(rm.data(), a2.data(), N);
        EXPECT_LT(max_abs(a1, a2), 1e-10) << N;
        weyl::matrix_1d(a1.data(), m1.data(), N);
        weyl::matrix_1d_serial(a1.data(), m2.data(), N);
        EXPECT_LT(max_abs(m1, m2), 1e-10) << N;
        EXPECT_LT(max_abs(m1, rm), 1e-10) << N;
    }
}

TEST(WeylMap, IdentityPositionMomentum) {
    auto g = PhaseGrid::symmetric(1, 32, 1.0);
    auto one = weyl_symbol_from_operator(MatC::Identity(32, 32), g);
    auto xs = weyl_symbol_from_operator(position_operator(g, 0), g);
    auto ps = weyl_symbol_from_operator(momentum_operator(g, 0), g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(std::abs(one.values[k] - 1.0), 0, 1e-12);
        EXPECT_NEAR(std::abs(xs.values[k] - g.coord(k, 0)), 0, 1e-12);
        EXPECT_NEAR(std::abs(ps.values[k] - g.coord(k, 1)), 0, 1e-12);
    }
    EXPECT_TRUE(one.hermitian);
}

TEST(WeylMap, RoundTripsAndHermiticity) {
    std::mt19937_64 rng(2);
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    for (int t = 0; t < 10; ++t) {
        MatC H = random_hermitian(64, rng);
        auto s = weyl_symbol_from_operator(H, g);
        EXPECT_TRUE(s.hermitian);
        EXPECT_LT((weyl_operator_from_symbol(s) - H).cwiseAbs().maxCoeff(), 1e-10);

        MatC M = random_matrix(64, rng);
        EXPECT_FALSE(weyl_symbol_from_operator(M, g).hermitian);

        std::vector<double> re(g.size());
        std::normal_distribution<double> n;
        for (auto& v : re) v = n(rng);
        MatC R = weyl_operator_from_symbol(WeylSymbol::from_real(g, re));
        EXPECT_LT((R - R.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(WeylMap, OscillatorSpectrum) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    Poly h = (Poly::var(2, 0) * Poly::var(2, 0) + Poly::var(2, 1) * Poly::var(2, 1)) * 0.5;
    MatC H = weyl_operator_from_symbol(WeylSymbol::from_poly(g, h));
    auto es = eigensystem((H + H.adjoint()) / 2.0);
    for (int k = 0; k < 10; ++k) EXPECT_NEAR(es->values(k), k + 0.5, 1e-6);
}

TEST(Wigner, CoherentStateIsGaussian) {
    for (double hbar : {1.0, 0.25}) {
        auto g = PhaseGrid::symmetric(1, 64, hbar);
        double x0 = 0.7 * std::sqrt(hbar), p0 = -0.4 * std::sqrt(hbar);
        auto W = wigner_from_wavefunction(coherent_state(g, pt(x0, p0)));
        double err = 0, mn = 1;
        for (std::size_t k = 0; k < g.size(); ++k) {
            double x = g.coord(k, 0), p = g.coord(k, 1);
            double ref = std::exp(-((x - x0) * (x - x0) + (p - p0) * (p - p0)) / hbar) / (kPi * hbar);
            err = std::max(err, std::abs(W.values[k] - ref));
            mn = std::min(mn, W.values[k]);
        }
        EXPECT_LT(err, 1e-6);
        EXPECT_GT(mn, -1e-10);
        EXPECT_NEAR(W.integral(), 1.0, 1e-10);
    }
}

TEST(Wigner, OddCatIsNegativeAtOrigin) {
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    WaveFunction psi{g, coherent_state(g, pt(2, 0)).values - coherent_state(g, pt(-2, 0)).values};
    psi.normalize();
    auto W = wigner_from_wavefunction(psi);
    // oracle: kernel sum at the origin, W(0,0) = (1/pi hbar) sum_y psi(y) psi*(-y) dx
    const int N = g.N(), c = N / 2;
    cplx s = 0;
    for (int a = 1; a < N; ++a) s += psi.values(a) * std::conj(psi.values(2 * c - a));
    double oracle = s.real() * g.axis(0).dx / kPi;
    double w00 = W.values[c * N + c];
    EXPECT_LT(w00, -0.1);
    EXPECT_NEAR(w00, oracle, 1e-10);
}

TEST(Wigner, DensityConsistencyAndLinearity) {
    std::mt19937_64 rng(3);
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    auto a = random_localized_state(g, rng), b = random_localized_state(g, rng);
    auto Wa = wigner_from_wavefunction(a), Wb = wigner_from_wavefunction(b);
    EXPECT_LT(max_abs(wigner_from_density(DensityOperator::pure(a)).values, Wa.values), 1e-10);
    DensityOperator mix{g, 0.5 * DensityOperator::pure(a).matrix + 0.5 * DensityOperator::pure(b).matrix};
    auto Wm = wigner_from_density(mix);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(Wm.values[k], 0.5 * Wa.values[k] + 0.5 * Wb.values[k], 1e-12);
    // back again
    auto rho = density_from_wigner(Wm);
    EXPECT_LT((rho.matrix - mix.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Wigner, MaximallyMixedOnCoherentSubspace) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    // orthonormalise k coherent states and average their projectors
    const int k = 4;
    MatC B(64, k);
    for (int i = 0; i < k; ++i) B.col(i) = coherent_state(g, pt(-3 + 2 * i, 0.5 * i)).coeffs();
    Eigen::HouseholderQR<MatC> qr(B);
    MatC Q = qr.householderQ() * MatC::Identity(64, k);
    DensityOperator rho{g, Q * Q.adjoint() / double(k)};
    rho.validate();
    auto W = wigner_from_density(rho);
    EXPECT_NEAR(W.integral(), 1.0, 1e-10);
    double bound = 1 / kPi;
    for (double w : W.values) EXPECT_LE(std::abs(w), bound + 1e-6);
}

TEST(Wigner, DensityFromWignerOfCoherentIsRankOne) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto W = wigner_from_wavefunction(coherent_state(g, pt(1, -1)));
    auto rho = density_from_wigner(W);
    auto es = eigensystem((rho.matrix + rho.matrix.adjoint()) / 2.0);
    EXPECT_NEAR(es->values(63), 1.0, 1e-6);
    EXPECT_LT(std::abs(es->values(62)), 1e-6);
}

TEST(Wigner, PureStateRecovery) {
    std::mt19937_64 rng(4);
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto psi = coherent_state(g, pt(0.8, 1.2));
    auto rec = wavefunction_from_wigner(wigner_from_wavefunction(psi));
    EXPECT_NEAR(std::abs(rec.coeffs().dot(psi.coeffs())), 1.0, 1e-6);
    EXPECT_NEAR(std::arg(rec.values(g.N() / 2)), 0.0, 1e-12);

    std::uniform_real_distribution<double> u(-1.5, 1.5);
    auto disp = coherent_state(g, pt(u(rng), u(rng)));
    auto rec2 = wavefunction_from_wigner(wigner_from_wavefunction(disp));
    EXPECT_GT(std::abs(rec2.coeffs().dot(disp.coeffs())), 1 - 1e-6);

    // first excited oscillator state has a node at the origin
    auto es = eigensystem(oscillator_matrix(g));
    auto ex = WaveFunction::from_coeffs(g, es->vectors.col(1));
    EXPECT_THROW(wavefunction_from_wigner(wigner_from_wavefunction(ex)), ValidationError);
}

TEST(Wigner, ContainmentIsEnforced) {
    auto g = PhaseGrid::symmetric(1, 32, 1.0);
    EXPECT_THROW(coherent_state(g, pt(g.axis(0).x_ext - 1, 0)), ValidationError);
    // a state pushed against the edge by hand
    WaveFunction edge{g, VecC::Zero(32)};
    edge.values(0) = 1;
    edge.normalize();
    EXPECT_THROW(wigner_from_wavefunction(edge), ValidationError);
}

TEST(Wigner, MeanValueMatchesTrace) {
    std::mt19937_64 rng(5);
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    for (int t = 0; t < 20; ++t) {
        auto psi = random_localized_state(g, rng);
        MatC H = random_hermitian(128, rng);
        auto A = weyl_symbol_from_operator(H, g);
        VecC v = psi.coeffs();
        double oracle = (v.adjoint() * H * v)(0, 0).real();
        EXPECT_NEAR(mean_value(A, wigner_from_wavefunction(psi)), oracle, 1e-8);
    }
    auto W = wigner_from_wavefunction(coherent_state(g, pt(1.3, -0.2)));
    EXPECT_NEAR(mean_value(WeylSymbol::from_poly(g, Poly::var(2, 0)), W), 1.3, 1e-8);
    EXPECT_NEAR(mean_value(WeylSymbol::from_poly(g, Poly::constant(2, 1.0)), W), 1.0, 1e-10);
    Poly h = (Poly::var(2, 0) * Poly::var(2, 0) + Poly::var(2, 1) * Poly::var(2, 1)) * 0.5;
    auto es = eigensystem(oscillator_matrix(g));
    for (int k = 0; k < 4; ++k) {
        auto Wk = wigner_from_wavefunction(WaveFunction::from_coeffs(g, es->vectors.col(k)));
        EXPECT_NEAR(mean_value(WeylSymbol::from_poly(g, h), Wk), k + 0.5, 1e-8);
    }
}

TEST(Wigner, OverlapMatchesGaussianFormula) {
    auto g = PhaseGrid::symmetric(1, 64, 1.0);
    auto W1 = wigner_from_wavefunction(coherent_state(g, pt(0, 0)));
    auto W2 = wigner_from_wavefunction(coherent_state(g, pt(1.0, 0.5)));
    EXPECT_NEAR(overlap(W1, W1), 1.0, 1e-8);
    EXPECT_NEAR(overlap(W1, W2), std::exp(-1.25 / 2), 1e-8);
    EXPECT_EQ(overlap(W1, W2), overlap(W2, W1));
    auto es = eigensystem(oscillator_matrix(g));
    auto E0 = wigner_from_wavefunction(WaveFunction::from_coeffs(g, es->vectors.col(0)));
    auto E1 = wigner_from_wavefunction(WaveFunction::from_coeffs(g, es->vectors.col(1)));
    EXPECT_NEAR(overlap(E0, E1), 0.0, 1e-8);
}

TEST(Wigner, MarginalsMatchOracleDensities) {
    std::mt19937_64 rng(6);
    auto g = PhaseGrid::symmetric(1, 128, 1.0);
    MatC F = fourier_matrix(g.axis(0), 1.0);
    for (int t = 0; t < 10; ++t) {
        auto psi = random_localized_state(g, rng);
        auto m = marginals(wigner_from_wavefunction(psi));
        VecC pt_ = F * psi.coeffs();
        for (int a = 0; a < 128; ++a) {
            EXPECT_NEAR(m.position[a], std::norm(psi.values(a)), 1e-8);
            EXPECT_NEAR(m.momentum[a], std::norm(pt_(a)) / g.axis(0).dp, 1e-8);
        }
    }
}

TEST(Wigner, TwoDofMapIsTensorProduct) {
    std::mt19937_64 rng(7);
    PhaseGrid g(2, 16, 1.0, {5.0, 5.0});
    PhaseGrid g1(1, 16, 1.0, {5.0});
    MatC A = random_matrix(16, rng), B = random_matrix(16, rng);
    auto sa = weyl::symbol_from_matrix(A, g1), sb = weyl::symbol_from_matrix(B, g1);
    auto s = weyl::symbol_from_matrix(kron(A, B), g);
    double err = 0;
    for (int i = 0; i < 256; ++i)
        for (int j = 0; j < 256; ++j) err = std::max(err, std::abs(s[i * 256 + j] - sa[i] * sb[j]));
    EXPECT_LT(err, 1e-10);
    EXPECT_LT((weyl::matrix_from_symbol(s, g) - kron(A, B)).cwiseAbs().maxCoeff(), 1e-10);
    auto s2 = weyl::symbol_from_matrix(kron(A, B), g, true);
    EXPECT_LT(max_abs(s, s2), 1e-10);
}

TEST(GridIo, DumpRoundTrip) {
    auto g = PhaseGrid::symmetric(1, 64, 0.5);
    auto W = wigner_from_wavefunction(coherent_state(g, pt(0.3, 0.1)));
    std::string path = ::testing::TempDir() + "w.osqm";
    write_grid_dump(path, g, W.values);
    PhaseGrid g2;
    auto v = read_grid_dump(path, g2);
    EXPECT_TRUE(g2.same(g));
    EXPECT_EQ(v, W.values);
    std::remove(path.c_str());
}
