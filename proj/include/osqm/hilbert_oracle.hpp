#pragma once

#include <memory>
#include <vector>

#include "osqm/wigner_weyl.hpp"

namespace osqm {

struct OperatorMatrix {
    MatC m;
    bool hermitian = false;
    bool psd = false;

    // Verifies the flag it sets: Hermitian to 1e-10, min eigenvalue >= -1e-8.
    static OperatorMatrix hermitian_op(MatC m);
    static OperatorMatrix psd_op(MatC m);
};

struct Eigensystem {
    VecR values;
    MatC vectors;
};
// Cached by matrix content; safe to call concurrently.
std::shared_ptr<const Eigensystem> eigensystem(const MatC& H);

MatC kron(const MatC& a, const MatC& b);
// F_{ma} = exp(-i p_m x_a / hbar) / sqrt(N), unitary.
MatC fourier_matrix(const Axis& ax, double hbar);
// Operators on the full configuration space of g (Kronecker-extended for n = 2).
MatC position_operator(const PhaseGrid& g, int dof);
MatC momentum_operator(const PhaseGrid& g, int dof);

MatC propagator(const MatC& H, double t, double hbar);
WaveFunction schrodinger_propagate(const WaveFunction& psi, const OperatorMatrix& H, double t);

OperatorMatrix operator_sqrt(const OperatorMatrix& P);

struct PovmResult {
    int outcome = -1;
    std::vector<double> probabilities;
    DensityOperator post;
};
// u is a uniform draw in [0, 1).
PovmResult povm_apply(const DensityOperator& rho, const std::vector<OperatorMatrix>& effects, double u);

// Pointer shift exp(-i s lambda_j P / hbar) on each eigenvector |j> of the observed
// quantity; s = coupling strength times duration.
struct VonNeumannCoupling {
    MatC pointer_generator;
    std::vector<VecC> eigenvectors;  // orthonormal, observed-system basis
    std::vector<double> eigenvalues;
    double strength = 0;
};
std::vector<VecC> pointer_outcomes(const WaveFunction& ready, const VonNeumannCoupling& c);
// exp(-i s (P (x) A) / hbar) acting on |ready> (x) |observed>; pointer is dof 1.
WaveFunction measurement_premeasurement(const WaveFunction& ready, const WaveFunction& observed,
                                        const VonNeumannCoupling& c, const PhaseGrid& composite);

}  // namespace osqm
