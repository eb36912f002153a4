#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osqm/phase_grid.hpp"
#include "osqm/poly.hpp"

namespace osqm {

// Function values on the configuration grid, sum |psi|^2 dV = 1 when normalised.
struct WaveFunction {
    PhaseGrid grid;
    VecC values;

    double norm() const;
    WaveFunction& normalize();
    // Components in the orthonormal position basis (values * sqrt(dV)).
    VecC coeffs() const;
    static WaveFunction from_coeffs(const PhaseGrid& g, const VecC& c);
};

// Matrix in the orthonormal position basis; the integral kernel is matrix / dV.
struct DensityOperator {
    PhaseGrid grid;
    MatC matrix;

    static DensityOperator pure(const WaveFunction& psi);
    void validate() const;
};

struct WignerState {
    PhaseGrid grid;
    std::vector<double> values;

    double integral() const;
    double purity() const;  // (2 pi hbar)^n int W^2
};

struct WeylSymbol {
    PhaseGrid grid;
    std::vector<cplx> values;
    bool hermitian = false;
    // Closed form, when the symbol is a polynomial.
    std::optional<Poly> poly;

    WeylSymbol() = default;
    WeylSymbol(const PhaseGrid& g, std::vector<cplx> v);
    static WeylSymbol from_real(const PhaseGrid& g, const std::vector<double>& v);
    static WeylSymbol from_poly(const PhaseGrid& g, const Poly& p);
    void refresh_flag();
    std::vector<double> real_values() const;
};

namespace weyl {
// The discrete Weyl correspondence on one pair of axes. M is N x N row-major
// in the orthonormal position basis, A is N x N row-major [x][p].
void symbol_1d(const cplx* M, cplx* A, int N);
void matrix_1d(const cplx* A, cplx* M, int N);
// Direct-sum versions of the same maps, kept as the reference.
void symbol_1d_serial(const cplx* M, cplx* A, int N);
void matrix_1d_serial(const cplx* A, cplx* M, int N);

std::vector<cplx> symbol_from_matrix(const MatC& M, const PhaseGrid& g, bool serial = false);
MatC matrix_from_symbol(const std::vector<cplx>& A, const PhaseGrid& g, bool serial = false);
}  // namespace weyl

void require_contained(const WignerState& W, const char* what);

WignerState wigner_from_wavefunction(const WaveFunction& psi);
WignerState wigner_from_density(const DensityOperator& rho);
DensityOperator density_from_wigner(const WignerState& W);
WaveFunction wavefunction_from_wigner(const WignerState& W);

WaveFunction coherent_state(const PhaseGrid& g, const PhasePoint& z0);

MatC weyl_operator_from_symbol(const WeylSymbol& A);
WeylSymbol weyl_symbol_from_operator(const MatC& M, const PhaseGrid& g);

double mean_value(const WeylSymbol& A, const WignerState& W);
double overlap(const WignerState& W, const WignerState& W2);

struct Marginals {
    std::vector<double> position;  // over [x1] or [x1][x2]
    std::vector<double> momentum;  // over [p1] or [p1][p2]
};
Marginals marginals(const WignerState& W);

// Binary dump: "OSQM", u32 version, u32 n, u32 N, f64 hbar, f64 x4 extents
// (x1, p1, x2, p2; zero when unused), then row-major f64 values.
void write_grid_dump(const std::string& path, const PhaseGrid& g, const std::vector<double>& values);
std::vector<double> read_grid_dump(const std::string& path, PhaseGrid& g);
void write_marginals_csv(const std::string& path, const WignerState& W);

}  // namespace osqm
