#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "osqm/types.hpp"

namespace osqm {

// One conjugate pair (x_i, p_i). Cell centres sit at (a - N/2) * dx.
struct Axis {
    int N = 0;
    double x_ext = 0, p_ext = 0;
    double dx = 0, dp = 0;

    int center() const { return N / 2; }
    double x(int a) const { return (a - N / 2) * dx; }
    double p(int m) const { return (m - N / 2) * dp; }
};

// Phase-space arrays are stored dof-major, row-major: [x1][p1] for n=1 and
// [x1][p1][x2][p2] for n=2. Configuration vectors are [x1] or [x1][x2].
class PhaseGrid {
public:
    PhaseGrid() = default;
    // x_ext per dof; p_ext follows from dx * dp * N = 2 pi hbar.
    PhaseGrid(int dof, int N, double hbar, std::vector<double> x_ext);
    // x_ext = p_ext = sqrt(pi hbar N / 2) on every axis.
    static PhaseGrid symmetric(int dof, int N, double hbar);

    int dof() const { return dof_; }
    int N() const { return N_; }
    double hbar() const { return hbar_; }
    const Axis& axis(int i) const { return axes_[i]; }

    std::size_t config_dim() const;  // N^n
    std::size_t size() const;        // N^(2n)
    double config_volume() const;    // prod dx
    double cell_volume() const;      // prod dx dp

    // Stride in the phase array of variable v in z = (x1..xn, p1..pn).
    std::size_t stride_of(int v) const;
    // Coordinate of variable v at flat index.
    double coord(std::size_t flat, int v) const;
    int index_of(std::size_t flat, int v) const;

    bool same(const PhaseGrid& o) const;
    void require_same(const PhaseGrid& o, const char* what) const;

private:
    int dof_ = 0;
    int N_ = 0;
    double hbar_ = 1.0;
    std::array<Axis, 2> axes_{};
};

struct PhasePoint {
    std::vector<double> x, p;
};

// J = [[0, I], [-I, 0]] in integers.
Eigen::MatrixXi symplectic_form(int n);
// sigma(z, z') = x . p' - p . x'
double symplectic_product(const PhasePoint& z, const PhasePoint& z2);

// One byte per phase cell.
using CellMask = std::vector<unsigned char>;

// Total |f| mass in the outermost two-cell shell of every axis.
double shell_mass(const std::vector<double>& f, const PhaseGrid& g);

}  // namespace osqm
