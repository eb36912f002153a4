#pragma once

#include <vector>

#include "osqm/wigner_weyl.hpp"

namespace osqm {

// Tables for the chord-space twisted convolution (n = 1). Every entry is unit modulus.
struct StarProductPlan {
    PhaseGrid grid;
    int truncation_order = 2;
    std::vector<cplx> basis_phase;  // e^{i theta(k,l)} e^{-i pi k l / N}, [k+c][l+c]
    std::vector<cplx> twist;        // e^{-2 pi i k1 l2 / N}, [k1+c][l2+c]

    static StarProductPlan make(const PhaseGrid& g, int truncation_order = 2);
};

// Symbol of the operator product. Two polynomial symbols multiply through the
// terminating Moyal series; anything else goes through the grid operators.
WeylSymbol moyal_product(const WeylSymbol& A, const WeylSymbol& B);
// Reference: O(N^4) twisted convolution of the chord functions.
WeylSymbol moyal_product_serial(const StarProductPlan& plan, const WeylSymbol& A, const WeylSymbol& B);
// Local expansion sum_{k <= order} (i hbar / 2)^k sigma(<-d, d->)^k / k!.
WeylSymbol moyal_product_truncated(const WeylSymbol& A, const WeylSymbol& B, int order);
WeylSymbol moyal_bracket(const WeylSymbol& A, const WeylSymbol& B);

Poly moyal_product_poly(const Poly& A, const Poly& B, double hbar, int n, int max_order = -1);

// Real Hamiltonian symbol with optional keyframes, linearly interpolated.
struct HamiltonianSymbol {
    std::vector<double> times;
    std::vector<WeylSymbol> frames;

    static HamiltonianSymbol constant(const WeylSymbol& H);
    WeylSymbol at(double t) const;
    bool time_dependent() const { return frames.size() > 1; }
};

struct LvnReport {
    long steps = 0;
    double norm_drift = 0;
    double purity_drift = 0;
    double halving_error = -1;  // max |W(dt) - W(dt/2)| when requested
};

// Fourth-order Runge-Kutta on dW/dt = -{{W, H}}.
WignerState evolve_lvn(const WignerState& W, const HamiltonianSymbol& H, double t_final, double dt,
                       LvnReport* report = nullptr, bool step_halving = false);

}  // namespace osqm
