#include "osqm/phase_grid.hpp"

#include <cmath>
#include <mutex>

#include <spdlog/spdlog.h>

namespace osqm {

namespace {
std::mutex audit_mu;
long audit_n = 0;
}  // namespace

void audit(const std::string& what, double magnitude) {
    std::lock_guard<std::mutex> lk(audit_mu);
    ++audit_n;
    spdlog::debug("audit: {} ({:.3e})", what, magnitude);
}

long audit_count() {
    std::lock_guard<std::mutex> lk(audit_mu);
    return audit_n;
}

PhaseGrid::PhaseGrid(int dof, int N, double hbar, std::vector<double> x_ext)
    : dof_(dof), N_(N), hbar_(hbar) {
    if (dof != 1 && dof != 2) throw ValidationError("grid: dof must be 1 or 2");
    if (N < 16 || N % 2) throw ValidationError("grid: N must be even and >= 16, got " + std::to_string(N));
    if (!(hbar > 0)) throw ValidationError("grid: hbar must be positive");
    if ((int)x_ext.size() != dof) throw ValidationError("grid: need one x extent per dof");
    for (int i = 0; i < dof; ++i) {
        if (!(x_ext[i] > 0)) throw ValidationError("grid: x extent must be positive");
        Axis& a = axes_[i];
        a.N = N;
        a.x_ext = x_ext[i];
        a.dx = 2 * x_ext[i] / N;
        a.dp = 2 * kPi * hbar / (N * a.dx);
        a.p_ext = a.dp * N / 2;
    }
}

PhaseGrid PhaseGrid::symmetric(int dof, int N, double hbar) {
    double e = std::sqrt(kPi * hbar * N / 2);
    return PhaseGrid(dof, N, hbar, std::vector<double>(dof, e));
}

std::size_t PhaseGrid::config_dim() const {
    std::size_t d = 1;
    for (int i = 0; i < dof_; ++i) d *= N_;
    return d;
}

std::size_t PhaseGrid::size() const { return config_dim() * config_dim(); }

double PhaseGrid::config_volume() const {
    double v = 1;
    for (int i = 0; i < dof_; ++i) v *= axes_[i].dx;
    return v;
}

double PhaseGrid::cell_volume() const {
    double v = 1;
    for (int i = 0; i < dof_; ++i) v *= axes_[i].dx * axes_[i].dp;
    return v;
}

std::size_t PhaseGrid::stride_of(int v) const {
    // x_i is array axis 2i, p_i is 2i+1
    int ax = v < dof_ ? 2 * v : 2 * (v - dof_) + 1;
    std::size_t s = 1;
    for (int k = ax + 1; k < 2 * dof_; ++k) s *= N_;
    return s;
}

int PhaseGrid::index_of(std::size_t flat, int v) const {
    return static_cast<int>((flat / stride_of(v)) % N_);
}

double PhaseGrid::coord(std::size_t flat, int v) const {
    int i = index_of(flat, v);
    return v < dof_ ? axes_[v].x(i) : axes_[v - dof_].p(i);
}

bool PhaseGrid::same(const PhaseGrid& o) const {
    if (dof_ != o.dof_ || N_ != o.N_ || hbar_ != o.hbar_) return false;
    for (int i = 0; i < dof_; ++i)
        if (axes_[i].x_ext != o.axes_[i].x_ext) return false;
    return true;
}

void PhaseGrid::require_same(const PhaseGrid& o, const char* what) const {
    if (!same(o)) throw ValidationError(std::string(what) + ": grid mismatch");
}

Eigen::MatrixXi symplectic_form(int n) {
    Eigen::MatrixXi J = Eigen::MatrixXi::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Eigen::MatrixXi::Identity(n, n);
    J.bottomLeftCorner(n, n) = -Eigen::MatrixXi::Identity(n, n);
    return J;
}

double symplectic_product(const PhasePoint& z, const PhasePoint& z2) {
    if (z.x.size() != z.p.size() || z2.x.size() != z2.p.size() || z.x.size() != z2.x.size())
        throw ValidationError("symplectic_product: dimension mismatch");
    double s = 0;
    for (std::size_t i = 0; i < z.x.size(); ++i) s += z.x[i] * z2.p[i] - z.p[i] * z2.x[i];
    return s;
}

double shell_mass(const std::vector<double>& f, const PhaseGrid& g) {
    const int N = g.N();
    double m = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        bool edge = false;
        for (int v = 0; v < 2 * g.dof() && !edge; ++v) {
            int i = g.index_of(k, v);
            edge = i < 2 || i >= N - 2;
        }
        if (edge) m += std::abs(f[k]);
    }
    return m * g.cell_volume();
}

}  // namespace osqm
