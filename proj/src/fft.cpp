#include "osqm/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace osqm::fft {

namespace {

std::mutex plan_mu;
std::map<std::tuple<int, std::size_t, int>, fftw_plan> line_plans;
std::map<std::tuple<int, int, int>, fftw_plan> nd_plans;

fftw_plan line_plan(int N, std::size_t stride, int sign) {
    std::lock_guard<std::mutex> lk(plan_mu);
    auto key = std::make_tuple(N, stride, sign);
    auto it = line_plans.find(key);
    if (it != line_plans.end()) return it->second;
    std::vector<cplx> scratch((N - 1) * stride + 1);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    int n = N;
    fftw_plan p = fftw_plan_many_dft(1, &n, 1, buf, nullptr, (int)stride, 0, buf, nullptr, (int)stride, 0,
                                     sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    line_plans[key] = p;
    return p;
}

fftw_plan nd_plan(int rank, int N, int sign) {
    std::lock_guard<std::mutex> lk(plan_mu);
    auto key = std::make_tuple(rank, N, sign);
    auto it = nd_plans.find(key);
    if (it != nd_plans.end()) return it->second;
    std::size_t total = 1;
    std::vector<int> dims(rank, N);
    for (int r = 0; r < rank; ++r) total *= N;
    std::vector<cplx> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft(rank, dims.data(), buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    nd_plans[key] = p;
    return p;
}

}  // namespace

void lines(cplx* data, int N, std::size_t stride, const std::vector<std::size_t>& starts, int sign) {
    fftw_plan p = line_plan(N, stride, sign);
    const long L = (long)starts.size();
#pragma omp parallel for schedule(static)
    for (long h = 0; h < L; ++h) {
        auto* b = reinterpret_cast<fftw_complex*>(data + starts[h]);
        fftw_execute_dft(p, b, b);
    }
}

void centered_lines(cplx* data, int N, std::size_t stride, const std::vector<std::size_t>& starts, int sign) {
    const int c = N / 2;
    const double pre = (c % 2) ? -1.0 : 1.0;
    fftw_plan p = line_plan(N, stride, sign);
    const long L = (long)starts.size();
#pragma omp parallel for schedule(static)
    for (long h = 0; h < L; ++h) {
        cplx* line = data + starts[h];
        for (int l = 1; l < N; l += 2) line[l * stride] = -line[l * stride];
        auto* b = reinterpret_cast<fftw_complex*>(line);
        fftw_execute_dft(p, b, b);
        for (int j = 0; j < N; ++j) line[j * stride] *= (j % 2 ? -pre : pre);
    }
}

std::vector<std::size_t> line_starts(const PhaseGrid& g, int v) {
    const std::size_t s = g.stride_of(v), total = g.size(), N = g.N();
    std::vector<std::size_t> out;
    out.reserve(total / N);
    for (std::size_t k = 0; k < total; ++k)
        if ((k / s) % N == 0) out.push_back(k);
    return out;
}

void phase_array(std::vector<cplx>& a, const PhaseGrid& g, int sign) {
    fftw_plan p = nd_plan(2 * g.dof(), g.N(), sign);
    auto* b = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, b, b);
}

std::vector<double> derivative(const std::vector<double>& f, const PhaseGrid& g, int v, int order) {
    const int N = g.N();
    const Axis& ax = g.axis(v < g.dof() ? v : v - g.dof());
    const double L = N * (v < g.dof() ? ax.dx : ax.dp);
    const std::size_t stride = g.stride_of(v);
    auto starts = line_starts(g, v);
    std::vector<cplx> a(f.begin(), f.end());
    lines(a.data(), N, stride, starts, -1);
    std::vector<cplx> mult(N);
    for (int k = 0; k < N; ++k) {
        int kk = k <= N / 2 ? k : k - N;
        if (k == N / 2 && order % 2) {
            mult[k] = 0;
            continue;
        }
        cplx ik(0, 2 * kPi * kk / L);
        mult[k] = std::pow(ik, order) / double(N);
    }
    for (std::size_t h : starts)
        for (int k = 0; k < N; ++k) a[h + k * stride] *= mult[k];
    lines(a.data(), N, stride, starts, +1);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = a[i].real();
    return out;
}

std::vector<double> convolve_centered(const std::vector<double>& f, const std::vector<double>& k,
                                      const PhaseGrid& g) {
    const int N = g.N(), c = N / 2, rank = 2 * g.dof();
    const std::size_t total = g.size();
    std::vector<cplx> A(f.begin(), f.end()), K(total);
    // roll the kernel so that its centre lands on index 0
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t src = 0, rem = i, mul = 1;
        for (int r = rank - 1; r >= 0; --r) {
            std::size_t idx = rem % N;
            rem /= N;
            src += ((idx + c) % N) * mul;
            mul *= N;
        }
        K[i] = k[src];
    }
    phase_array(A, g, -1);
    phase_array(K, g, -1);
    const double scale = g.cell_volume() / double(total);
    for (std::size_t i = 0; i < total; ++i) A[i] *= K[i] * scale;
    phase_array(A, g, +1);
    std::vector<double> out(total);
    for (std::size_t i = 0; i < total; ++i) out[i] = A[i].real();
    return out;
}

double interpolate(const std::vector<double>& f, const PhaseGrid& g, const PhasePoint& z) {
    const int N = g.N(), n = g.dof(), rank = 2 * n;
    std::vector<cplx> F(f.begin(), f.end());
    phase_array(F, g, -1);
    // per variable: e^{2 pi i k u / N} with u the fractional grid index
    std::vector<std::vector<cplx>> basis(rank, std::vector<cplx>(N));
    for (int v = 0; v < rank; ++v) {
        const Axis& ax = g.axis(v % n);
        bool isx = v < n;
        double coord = isx ? z.x[v] : z.p[v - n];
        double u = coord / (isx ? ax.dx : ax.dp) + N / 2;
        for (int k = 0; k < N; ++k) {
            int kk = k < N / 2 ? k : k - N;
            basis[v][k] = k == N / 2 ? cplx(std::cos(kPi * u), 0) : std::polar(1.0, 2 * kPi * kk * u / N);
        }
    }
    cplx s = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        cplx w = F[i];
        for (int v = 0; v < rank; ++v) w *= basis[v][g.index_of(i, v)];
        s += w;
    }
    return s.real() / double(F.size());
}

}  // namespace osqm::fft
