#pragma once

#include <cstddef>
#include <vector>

#include "osqm/phase_grid.hpp"

namespace osqm::fft {

// In-place DFTs of `howmany` lines of length N. Element k of line h lives at
// data[h*dist + k*stride] for the line-major form below. sign = -1 is forward.
// Plans are created once per shape behind a lock and executed lock-free.
void lines(cplx* data, int N, std::size_t stride, const std::vector<std::size_t>& starts, int sign);

// Same, but indices on both sides are centred: y_j = sum_l f_l e^{s 2 pi i (j-c)(l-c)/N}.
void centered_lines(cplx* data, int N, std::size_t stride, const std::vector<std::size_t>& starts, int sign);

// Starts of all lines along variable v of a phase array.
std::vector<std::size_t> line_starts(const PhaseGrid& g, int v);

// Full transform along every array axis of a phase array (rank 2n).
void phase_array(std::vector<cplx>& a, const PhaseGrid& g, int sign);

// Spectral d^order/dz_v^order of a real periodic field. Odd derivatives drop the Nyquist mode.
std::vector<double> derivative(const std::vector<double>& f, const PhaseGrid& g, int v, int order = 1);

// Cyclic convolution (f * k)(z) = sum_z' f(z') k(z - z') dV with k stored centred at index N/2.
std::vector<double> convolve_centered(const std::vector<double>& f, const std::vector<double>& k,
                                      const PhaseGrid& g);

// Trigonometric interpolation of a periodic field at an off-grid point.
double interpolate(const std::vector<double>& f, const PhaseGrid& g, const PhasePoint& z);

}  // namespace osqm::fft
