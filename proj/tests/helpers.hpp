#pragma once

#include <random>

#include "osqm/hilbert_oracle.hpp"
#include "osqm/wigner_weyl.hpp"

namespace osqm::testing {

inline MatC random_matrix(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    MatC M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = cplx(n(rng), n(rng));
    return M;
}

inline MatC random_hermitian(int d, std::mt19937_64& rng) {
    MatC M = random_matrix(d, rng);
    return (M + M.adjoint()) / 2.0;
}

// Superposition of a few coherent states near the origin, well inside the grid.
inline WaveFunction random_localized_state(const PhaseGrid& g, std::mt19937_64& rng, double spread = 3.0, int terms = 3) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::normal_distribution<double> n;
    WaveFunction psi{g, VecC::Zero(g.config_dim())};
    for (int t = 0; t < terms; ++t) {
        PhasePoint z;
        for (int i = 0; i < g.dof(); ++i) {
            z.x.push_back(u(rng) * std::sqrt(g.hbar()));
            z.p.push_back(u(rng) * std::sqrt(g.hbar()));
        }
        psi.values += cplx(n(rng), n(rng)) * coherent_state(g, z).values;
    }
    psi.normalize();
    return psi;
}

inline PhasePoint pt(double x, double p) { return PhasePoint{{x}, {p}}; }

inline double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Oscillator (x^2 + p^2) / 2 on the grid: position part diagonal, momentum part through F.
inline MatC oscillator_matrix(const PhaseGrid& g) {
    MatC X = position_operator(g, 0), P = momentum_operator(g, 0);
    return (X * X + P * P) / 2.0;
}

}  // namespace osqm::testing
