#pragma once

#include <optional>
#include <vector>

#include "osqm/phase_grid.hpp"
#include "osqm/poly.hpp"

namespace osqm {

// Real function on phase space: grid samples, plus the closed form when known.
// Brackets and flows use the closed form (exact derivatives) when present and
// spectral derivatives of the samples otherwise.
struct ClassicalObservable {
    PhaseGrid grid;
    std::vector<double> values;
    std::optional<Poly> poly;

    static ClassicalObservable from_poly(const PhaseGrid& g, const Poly& p);
    static ClassicalObservable from_values(const PhaseGrid& g, std::vector<double> v);

    // d/dz_v sampled on the grid.
    std::vector<double> derivative_field(int v) const;
};

ClassicalObservable poisson_bracket(const ClassicalObservable& A, const ClassicalObservable& B);

struct FlowResult {
    std::vector<PhasePoint> points;  // z0 first
    bool escaped = false;            // trajectory left the grid and was truncated
};
// Leapfrog when H = T(p) + V(x), implicit midpoint otherwise. H needs a closed form.
FlowResult hamilton_flow(const ClassicalObservable& H, const PhasePoint& z0, double t, double dt);
// End point only; t may be negative.
PhasePoint flow_map(const ClassicalObservable& H, const PhasePoint& z0, double t, double dt);

// Cells whose centre flows back into R under -t. n = 1 only.
CellMask evolve_region_classically(const CellMask& R, const ClassicalObservable& H, double t, double dt = 0.01);

}  // namespace osqm
