#pragma once

#include <array>
#include <string>
#include <vector>

#include "osqm/hilbert_oracle.hpp"
#include "osqm/wigner_weyl.hpp"

namespace osqm {

// Operator on the configuration space stored as one factor per degree of
// freedom; the full matrix is the Kronecker product (dof 1 slowest).
struct KronOp {
    std::vector<MatC> f;

    std::size_t dim() const;
    VecC apply(const VecC& v) const;
    MatC dense() const;
    double trace() const;
    KronOp sqrt() const;
    KronOp operator*(const KronOp& o) const;
};

// Interior cut points along each variable z_v = (x1..xn, p1..pn). The outer
// boxes run to the grid edge; the grid is periodic, so they are neighbours.
struct BoxSpec {
    std::vector<std::vector<double>> cuts;
    std::vector<std::string> labels;  // optional, one per region
};

struct Region {
    std::string label;
    std::array<int, 4> lo{}, hi{};  // cell index range [lo, hi) per variable
    std::array<double, 4> lo_edge{}, hi_edge{};
    std::vector<int> factor;  // index of the box in each per-dof factor list
    CellMask mask;
    WeylSymbol symbol;  // chi_R * phi
    KronOp op;          // Pi_R
    KronOp sqrt_op;     // Pi_R^{1/2}
};

class Partition {
public:
    static Partition build(const PhaseGrid& g, const BoxSpec& spec);

    const PhaseGrid& grid() const { return grid_; }
    const std::vector<Region>& regions() const { return regions_; }
    std::size_t size() const { return regions_.size(); }
    const Region& operator[](std::size_t i) const { return regions_[i]; }
    // Kernel on the one-dof grid of each degree of freedom; phi is their product.
    const std::vector<double>& kernel(int dof) const { return kernels_[dof]; }
    const PhaseGrid& factor_grid(int dof) const { return factor_grids_[dof]; }
    // Per-dof boxes: quasiprojector and the 1-dof cell range (x then p).
    const std::vector<MatC>& factor_ops(int dof) const { return factor_ops_[dof]; }
    const std::vector<std::array<int, 4>>& factor_boxes(int dof) const { return factor_boxes_[dof]; }
    int index_of(const std::string& label) const;
    const BoxSpec& spec() const { return spec_; }

private:
    PhaseGrid grid_;
    BoxSpec spec_;
    std::vector<Region> regions_;
    std::vector<std::vector<double>> kernels_;
    std::vector<PhaseGrid> factor_grids_;
    std::vector<std::vector<MatC>> factor_ops_;
    std::vector<std::vector<std::array<int, 4>>> factor_boxes_;
};

// One-dof grid carrying axis `dof` of g.
PhaseGrid dof_grid(const PhaseGrid& g, int dof);

// Unit-mass coherent-state Wigner Gaussian (pi hbar)^-n exp(-(x^2 + p^2) / hbar), centred.
std::vector<double> coherent_kernel(const PhaseGrid& g);

WeylSymbol quasiprojector_symbol(const CellMask& R, const std::vector<double>& phi, const PhaseGrid& g);
// (2 pi hbar)^-1 sum over cells of R of |x,p><x,p| dx dp, with the coherent
// states taken as cyclic grid translates of the ground state. n = 1.
MatC quasiprojector_operator(const CellMask& R, const PhaseGrid& g);
// Same sum, one dyad at a time.
MatC quasiprojector_operator_serial(const CellMask& R, const PhaseGrid& g);

struct DefectReport {
    double trace_relative = 0;  // max ||Pa Pb - d_ab Pa||_1 / tr Pa
    double operator_norm = 0;   // max ||Pa Pb - d_ab Pa||
    double completeness = 0;    // ||sum Pa - I||
    double min_eigenvalue = 0, max_eigenvalue = 0;
};
DefectReport quasiprojector_defect(const Partition& P);

struct ExactProjectors {
    std::vector<KronOp> proj;
    std::vector<double> closeness_op;     // ||P_perp - Pi|| per region
    std::vector<double> closeness_trace;  // ||P_perp - Pi||_1 / tr Pi per region
    double idempotence = 0, orthogonality = 0, completeness = 0;
};
// Per degree of freedom: jointly diagonalise the quasiprojectors, give each
// basis vector to the region holding most of it; Kronecker products for n = 2.
ExactProjectors classicality_projectors(const Partition& P, bool with_closeness = true);

struct QuasiRestriction {
    bool ok = false;
    double residual = 0;
};
QuasiRestriction is_quasirestricted(const WaveFunction& psi, const Region& R, double tol = 1e-3);

CellMask interior_region(const Region& R, double eps = 1e-6);
double symbol_at(const Region& R, const PhasePoint& z);

}  // namespace osqm
