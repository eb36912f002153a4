#include "osqm/wigner_weyl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "osqm/fft.hpp"

namespace osqm {

// ---------------------------------------------------------------- types

double WaveFunction::norm() const { return std::sqrt(values.squaredNorm() * grid.config_volume()); }

WaveFunction& WaveFunction::normalize() {
    double n = norm();
    if (!(n > 0)) throw ValidationError("wavefunction: zero norm");
    values /= n;
    return *this;
}

VecC WaveFunction::coeffs() const { return values * std::sqrt(grid.config_volume()); }

WaveFunction WaveFunction::from_coeffs(const PhaseGrid& g, const VecC& c) {
    return WaveFunction{g, c / std::sqrt(g.config_volume())};
}

DensityOperator DensityOperator::pure(const WaveFunction& psi) {
    VecC v = psi.coeffs();
    return DensityOperator{psi.grid, v * v.adjoint()};
}

void DensityOperator::validate() const {
    double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) throw ValidationError("density operator: not Hermitian (" + std::to_string(herm) + ")");
    double tr = matrix.trace().real();
    if (std::abs(tr - 1) > 1e-10) throw ValidationError("density operator: trace " + std::to_string(tr));
}

double WignerState::integral() const {
    double s = 0;
    for (double w : values) s += w;
    return s * grid.cell_volume();
}

double WignerState::purity() const {
    double s = 0;
    for (double w : values) s += w * w;
    return s * grid.cell_volume() * std::pow(2 * kPi * grid.hbar(), grid.dof());
}

WeylSymbol::WeylSymbol(const PhaseGrid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ValidationError("symbol: size does not match grid");
    refresh_flag();
}

WeylSymbol WeylSymbol::from_real(const PhaseGrid& g, const std::vector<double>& v) {
    return WeylSymbol(g, std::vector<cplx>(v.begin(), v.end()));
}

WeylSymbol WeylSymbol::from_poly(const PhaseGrid& g, const Poly& p) {
    const int nv = 2 * g.dof();
    std::vector<cplx> v(g.size());
    std::vector<double> z(nv);
    for (std::size_t k = 0; k < v.size(); ++k) {
        for (int i = 0; i < nv; ++i) z[i] = g.coord(k, i);
        v[k] = p.eval(z.data());
    }
    WeylSymbol s(g, std::move(v));
    s.poly = p;
    return s;
}

void WeylSymbol::refresh_flag() {
    hermitian = true;
    for (auto& a : values)
        if (std::abs(a.imag()) > 1e-10) {
            hermitian = false;
            break;
        }
}

std::vector<double> WeylSymbol::real_values() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
    return out;
}

// ---------------------------------------------------------------- 1-D maps

namespace weyl {
namespace {

struct Tables {
    int N;
    std::vector<cplx> fwd;    // e^{-i theta(k,l)} e^{i pi k l / N}, indexed [k+c][l+c]
    std::vector<cplx> unity;  // e^{2 pi i t / N}
    std::vector<std::size_t> rows, cols;
};

double theta(int k, int l, int c) {
    if (k == -c && l == -c) return 0;
    if (k == -c) return kPi * std::abs(l) / 2;
    if (l == -c) return kPi * std::abs(k) / 2;
    return 0;
}

const Tables& tables(int N) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Tables>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = cache[N];
    if (!slot) {
        auto t = std::make_unique<Tables>();
        t->N = N;
        const int c = N / 2;
        t->fwd.resize(N * N);
        for (int ik = 0; ik < N; ++ik)
            for (int il = 0; il < N; ++il) {
                int k = ik - c, l = il - c;
                // k*l mod 2N keeps the exponent small
                long kl = ((long)k * l) % (2L * N);
                t->fwd[ik * N + il] = std::polar(1.0, -theta(k, l, c) + kPi * kl / N);
            }
        t->unity.resize(N);
        for (int s = 0; s < N; ++s) t->unity[s] = std::polar(1.0, 2 * kPi * s / N);
        for (int r = 0; r < N; ++r) {
            t->rows.push_back((std::size_t)r * N);
            t->cols.push_back(r);
        }
        slot = std::move(t);
    }
    return *slot;
}

inline int wrap(long t, int N) {
    long r = t % N;
    return int(r < 0 ? r + N : r);
}

}  // namespace

void symbol_1d(const cplx* M, cplx* A, int N) {
    const Tables& T = tables(N);
    const int c = N / 2;
    std::vector<cplx> G(N * N);
    for (int ik = 0; ik < N; ++ik)
        for (int a = 0; a < N; ++a) G[ik * N + a] = M[a * N + wrap(a - (ik - c), N)];
    fft::centered_lines(G.data(), N, 1, T.rows, -1);
    for (int i = 0; i < N * N; ++i) G[i] *= T.fwd[i];
    fft::centered_lines(G.data(), N, 1, T.rows, +1);
    fft::centered_lines(G.data(), N, N, T.cols, -1);
    for (int j = 0; j < N; ++j)
        for (int m = 0; m < N; ++m) A[j * N + m] = G[m * N + j] / double(N);
}

void matrix_1d(const cplx* A, cplx* M, int N) {
    const Tables& T = tables(N);
    const int c = N / 2;
    std::vector<cplx> X(A, A + N * N), chi(N * N);
    fft::centered_lines(X.data(), N, 1, T.rows, +1);
    fft::centered_lines(X.data(), N, N, T.cols, -1);
    for (int ik = 0; ik < N; ++ik)
        for (int il = 0; il < N; ++il)
            chi[ik * N + il] = X[il * N + ik] * std::conj(T.fwd[ik * N + il]) / double(N);
    fft::centered_lines(chi.data(), N, 1, T.rows, +1);
    for (int ik = 0; ik < N; ++ik)
        for (int a = 0; a < N; ++a) M[a * N + wrap(a - (ik - c), N)] = chi[ik * N + a] / double(N);
}

void symbol_1d_serial(const cplx* M, cplx* A, int N) {
    const Tables& T = tables(N);
    const int c = N / 2;
    std::vector<cplx> chi(N * N), tmp(N * N);
    for (int ik = 0; ik < N; ++ik) {
        int k = ik - c;
        for (int il = 0; il < N; ++il) {
            int l = il - c;
            cplx s = 0;
            for (int a = 0; a < N; ++a) s += T.unity[wrap(-(long)l * (a - c), N)] * M[a * N + wrap(a - k, N)];
            chi[ik * N + il] = s * T.fwd[ik * N + il];
        }
    }
    for (int ik = 0; ik < N; ++ik)
        for (int j = 0; j < N; ++j) {
            cplx s = 0;
            for (int il = 0; il < N; ++il) s += chi[ik * N + il] * T.unity[wrap((long)(j - c) * (il - c), N)];
            tmp[ik * N + j] = s;
        }
    for (int j = 0; j < N; ++j)
        for (int m = 0; m < N; ++m) {
            cplx s = 0;
            for (int ik = 0; ik < N; ++ik) s += tmp[ik * N + j] * T.unity[wrap(-(long)(m - c) * (ik - c), N)];
            A[j * N + m] = s / double(N);
        }
}

void matrix_1d_serial(const cplx* A, cplx* M, int N) {
    const Tables& T = tables(N);
    const int c = N / 2;
    std::vector<cplx> X(N * N), chi(N * N);
    for (int j = 0; j < N; ++j)
        for (int ik = 0; ik < N; ++ik) {
            cplx s = 0;
            for (int m = 0; m < N; ++m) s += A[j * N + m] * T.unity[wrap((long)(m - c) * (ik - c), N)];
            X[j * N + ik] = s;
        }
    for (int ik = 0; ik < N; ++ik)
        for (int il = 0; il < N; ++il) {
            cplx s = 0;
            for (int j = 0; j < N; ++j) s += X[j * N + ik] * T.unity[wrap(-(long)(j - c) * (il - c), N)];
            chi[ik * N + il] = s * std::conj(T.fwd[ik * N + il]) / double(N);
        }
    for (int ik = 0; ik < N; ++ik)
        for (int a = 0; a < N; ++a) {
            cplx s = 0;
            for (int il = 0; il < N; ++il) s += chi[ik * N + il] * T.unity[wrap((long)(il - c) * (a - c), N)];
            M[a * N + wrap(a - (ik - c), N)] = s / double(N);
        }
}

std::vector<cplx> symbol_from_matrix(const MatC& M, const PhaseGrid& g, bool serial) {
    const int N = g.N();
    auto sym = serial ? symbol_1d_serial : symbol_1d;
    if ((std::size_t)M.rows() != g.config_dim() || M.rows() != M.cols())
        throw ValidationError("weyl: matrix shape does not match grid");
    std::vector<cplx> out(g.size());
    if (g.dof() == 1) {
        std::vector<cplx> rm(N * N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) rm[a * N + b] = M(a, b);
        sym(rm.data(), out.data(), N);
        return out;
    }
    const long NN = (long)N * N;
    std::vector<cplx> mid(g.size());
    // first pair (a1, b1) -> (j1, m1) with (a2, b2) held fixed
#pragma omp parallel for schedule(static)
    for (long s = 0; s < NN; ++s) {
        int a2 = int(s / N), b2 = int(s % N);
        std::vector<cplx> in(NN), res(NN);
        for (int a1 = 0; a1 < N; ++a1)
            for (int b1 = 0; b1 < N; ++b1) in[a1 * N + b1] = M(a1 * N + a2, b1 * N + b2);
        sym(in.data(), res.data(), N);
        for (long q = 0; q < NN; ++q) mid[q * NN + a2 * N + b2] = res[q];
    }
#pragma omp parallel for schedule(static)
    for (long q = 0; q < NN; ++q) sym(mid.data() + q * NN, out.data() + q * NN, N);
    return out;
}

MatC matrix_from_symbol(const std::vector<cplx>& A, const PhaseGrid& g, bool serial) {
    const int N = g.N();
    auto mat = serial ? matrix_1d_serial : matrix_1d;
    if (A.size() != g.size()) throw ValidationError("weyl: symbol size does not match grid");
    MatC M(g.config_dim(), g.config_dim());
    if (g.dof() == 1) {
        std::vector<cplx> rm(N * N);
        mat(A.data(), rm.data(), N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) M(a, b) = rm[a * N + b];
        return M;
    }
    const long NN = (long)N * N;
    std::vector<cplx> mid(g.size());
#pragma omp parallel for schedule(static)
    for (long q = 0; q < NN; ++q) mat(A.data() + q * NN, mid.data() + q * NN, N);
#pragma omp parallel for schedule(static)
    for (long s = 0; s < NN; ++s) {
        int a2 = int(s / N), b2 = int(s % N);
        std::vector<cplx> in(NN), res(NN);
        for (long q = 0; q < NN; ++q) in[q] = mid[q * NN + a2 * N + b2];
        mat(in.data(), res.data(), N);
        for (int a1 = 0; a1 < N; ++a1)
            for (int b1 = 0; b1 < N; ++b1) M(a1 * N + a2, b1 * N + b2) = res[a1 * N + b1];
    }
    return M;
}

}  // namespace weyl

// ---------------------------------------------------------------- states

void require_contained(const WignerState& W, const char* what) {
    double m = shell_mass(W.values, W.grid);
    if (m >= 1e-6)
        throw ValidationError(std::string(what) + ": state not contained in grid, shell mass " + std::to_string(m));
}

namespace {
double wigner_scale(const PhaseGrid& g) { return std::pow(2 * kPi * g.hbar(), g.dof()); }
}  // namespace

WignerState wigner_from_density(const DensityOperator& rho) {
    double herm = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) throw ValidationError("wigner_from_density: input not Hermitian (" + std::to_string(herm) + ")");
    auto A = weyl::symbol_from_matrix(rho.matrix, rho.grid);
    const double s = 1.0 / wigner_scale(rho.grid);
    WignerState W{rho.grid, std::vector<double>(A.size())};
    for (std::size_t i = 0; i < A.size(); ++i) W.values[i] = A[i].real() * s;
    return W;
}

WignerState wigner_from_wavefunction(const WaveFunction& psi) {
    if (std::abs(psi.norm() - 1) > 1e-10) throw ValidationError("wigner_from_wavefunction: psi not normalised");
    WignerState W = wigner_from_density(DensityOperator::pure(psi));
    require_contained(W, "wigner_from_wavefunction");
    return W;
}

DensityOperator density_from_wigner(const WignerState& W) {
    std::vector<cplx> A(W.values.size());
    const double s = wigner_scale(W.grid);
    for (std::size_t i = 0; i < A.size(); ++i) A[i] = W.values[i] * s;
    return DensityOperator{W.grid, weyl::matrix_from_symbol(A, W.grid)};
}

WaveFunction wavefunction_from_wigner(const WignerState& W) {
    const PhaseGrid& g = W.grid;
    DensityOperator rho = density_from_wigner(W);
    // column of rho at the origin: psi(x) psi*(0)
    std::size_t origin = 0;
    for (int i = 0; i < g.dof(); ++i) origin = origin * g.N() + g.N() / 2;
    const double dV = g.config_volume();
    double at0 = rho.matrix(origin, origin).real() / dV;
    if (!(at0 > 1e-6))
        throw ValidationError("wavefunction_from_wigner: |psi(0)|^2 = " + std::to_string(at0) +
                              " below 1e-6; recover through density_from_wigner and its top eigenvector instead");
    VecC col = rho.matrix.col(origin) / std::sqrt(rho.matrix(origin, origin).real());
    WaveFunction psi = WaveFunction::from_coeffs(g, col);
    return psi;
}

WaveFunction coherent_state(const PhaseGrid& g, const PhasePoint& z0) {
    const int n = g.dof();
    if ((int)z0.x.size() != n || (int)z0.p.size() != n) throw ValidationError("coherent_state: dimension mismatch");
    const double sig = std::sqrt(g.hbar() / 2);
    for (int i = 0; i < n; ++i) {
        const Axis& a = g.axis(i);
        if (std::abs(z0.x[i]) + 6 * sig > a.x_ext || std::abs(z0.p[i]) + 6 * sig > a.p_ext)
            throw ValidationError("coherent_state: centre too close to the grid edge for 6 sigma containment");
    }
    const int N = g.N();
    WaveFunction psi{g, VecC(g.config_dim())};
    for (std::size_t k = 0; k < g.config_dim(); ++k) {
        cplx v = 1;
        std::size_t rem = k;
        for (int i = n - 1; i >= 0; --i) {
            int a = int(rem % N);
            rem /= N;
            double x = g.axis(i).x(a);
            double d = x - z0.x[i];
            v *= std::exp(cplx(-d * d / (2 * g.hbar()), z0.p[i] * x / g.hbar()));
        }
        psi.values[k] = v;
    }
    psi.normalize();
    return psi;
}

MatC weyl_operator_from_symbol(const WeylSymbol& A) { return weyl::matrix_from_symbol(A.values, A.grid); }

WeylSymbol weyl_symbol_from_operator(const MatC& M, const PhaseGrid& g) {
    return WeylSymbol(g, weyl::symbol_from_matrix(M, g));
}

double mean_value(const WeylSymbol& A, const WignerState& W) {
    A.grid.require_same(W.grid, "mean_value");
    if (!A.hermitian) throw ValidationError("mean_value: symbol is not real");
    double s = 0;
    for (std::size_t i = 0; i < W.values.size(); ++i) s += A.values[i].real() * W.values[i];
    return s * W.grid.cell_volume();
}

double overlap(const WignerState& W, const WignerState& W2) {
    W.grid.require_same(W2.grid, "overlap");
    double s = 0;
    for (std::size_t i = 0; i < W.values.size(); ++i) s += W.values[i] * W2.values[i];
    s *= W.grid.cell_volume() * wigner_scale(W.grid);
    if (s < 0 || s > 1) {
        audit("overlap clipped to [0,1]", s < 0 ? -s : s - 1);
        s = std::clamp(s, 0.0, 1.0);
    }
    return s;
}

Marginals marginals(const WignerState& W) {
    const PhaseGrid& g = W.grid;
    const int n = g.dof();
    const std::size_t D = g.config_dim();
    Marginals out{std::vector<double>(D, 0), std::vector<double>(D, 0)};
    double dx = 1, dp = 1;
    for (int i = 0; i < n; ++i) {
        dx *= g.axis(i).dx;
        dp *= g.axis(i).dp;
    }
    for (std::size_t k = 0; k < W.values.size(); ++k) {
        std::size_t xi = 0, pi = 0;
        for (int i = 0; i < n; ++i) {
            xi = xi * g.N() + g.index_of(k, i);
            pi = pi * g.N() + g.index_of(k, n + i);
        }
        out.position[xi] += W.values[k] * dp;
        out.momentum[pi] += W.values[k] * dx;
    }
    return out;
}

}  // namespace osqm
