#include "osqm/moyal.hpp"

#include <cmath>
#include <map>

#include "osqm/fft.hpp"

namespace osqm {

namespace {

int wrap_c(int k, int N) {
    // back into [-c, c)
    const int c = N / 2;
    k = ((k + c) % N + N) % N;
    return k - c;
}

std::vector<cplx> derivative_values(const WeylSymbol& S, const Poly::Exp& multi) {
    const PhaseGrid& g = S.grid;
    if (S.poly) return WeylSymbol::from_poly(g, S.poly->derivative(multi)).values;
    std::vector<double> re(S.values.size()), im(S.values.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
        re[i] = S.values[i].real();
        im[i] = S.values[i].imag();
    }
    for (int v = 0; v < 2 * g.dof(); ++v)
        if (multi[v]) {
            re = fft::derivative(re, g, v, multi[v]);
            im = fft::derivative(im, g, v, multi[v]);
        }
    std::vector<cplx> out(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = cplx(re[i], im[i]);
    return out;
}

}  // namespace

StarProductPlan StarProductPlan::make(const PhaseGrid& g, int truncation_order) {
    if (g.dof() != 1) throw ValidationError("star product plan: n = 1 only");
    const int N = g.N(), c = N / 2;
    StarProductPlan p;
    p.grid = g;
    p.truncation_order = truncation_order;
    p.basis_phase.resize(N * N);
    p.twist.resize(N * N);
    for (int ik = 0; ik < N; ++ik)
        for (int il = 0; il < N; ++il) {
            int k = ik - c, l = il - c;
            double th = 0;
            if (k == -c && l != -c) th = kPi * std::abs(l) / 2;
            if (l == -c && k != -c) th = kPi * std::abs(k) / 2;
            long kl = ((long)k * l) % (2L * N);
            p.basis_phase[ik * N + il] = std::polar(1.0, th - kPi * kl / N);
            long t = ((long)k * l) % N;
            p.twist[ik * N + il] = std::polar(1.0, -2 * kPi * t / N);
        }
    return p;
}

Poly moyal_product_poly(const Poly& A, const Poly& B, double hbar, int n, int max_order) {
    int K = std::min(A.degree(), B.degree());
    if (max_order >= 0) K = std::min(K, max_order);
    Poly out(2 * n);
    cplx f = 1;
    for (int k = 0; k <= K; ++k) {
        for (auto& t : symplectic_power(n, k)) out += A.derivative(t.left) * B.derivative(t.right) * (f * t.coef);
        f *= cplx(0, hbar / 2);
    }
    return out;
}

WeylSymbol moyal_product(const WeylSymbol& A, const WeylSymbol& B) {
    A.grid.require_same(B.grid, "moyal_product");
    if (A.poly && B.poly) return WeylSymbol::from_poly(A.grid, moyal_product_poly(*A.poly, *B.poly, A.grid.hbar(), A.grid.dof()));
    MatC a = weyl::matrix_from_symbol(A.values, A.grid);
    MatC b = weyl::matrix_from_symbol(B.values, B.grid);
    MatC ab = a * b;
    return WeylSymbol(A.grid, weyl::symbol_from_matrix(ab, A.grid));
}

WeylSymbol moyal_product_serial(const StarProductPlan& plan, const WeylSymbol& A, const WeylSymbol& B) {
    const PhaseGrid& g = plan.grid;
    g.require_same(A.grid, "moyal_product_serial");
    g.require_same(B.grid, "moyal_product_serial");
    const int N = g.N(), c = N / 2;
    // chord functions: op(S) = (1/N) sum chi(k,l) B(k,l)
    auto chord = [&](const WeylSymbol& S) {
        std::vector<cplx> chi(N * N);
        for (int ik = 0; ik < N; ++ik)
            for (int il = 0; il < N; ++il) {
                int k = ik - c, l = il - c;
                cplx s = 0;
                for (int j = 0; j < N; ++j)
                    for (int m = 0; m < N; ++m) {
                        long e = (-(long)(j - c) * l + (long)(m - c) * k) % N;
                        s += S.values[j * N + m] * std::polar(1.0, 2 * kPi * e / N);
                    }
                chi[ik * N + il] = s / double(N);
            }
        return chi;
    };
    auto ca = chord(A), cb = chord(B);
    const auto& P = plan.basis_phase;
    const auto& W = plan.twist;
    std::vector<cplx> cab(N * N, 0.0);
    for (int ik = 0; ik < N; ++ik)
        for (int il = 0; il < N; ++il) {
            int k = ik - c, l = il - c;
            cplx s = 0;
            for (int ik1 = 0; ik1 < N; ++ik1)
                for (int il1 = 0; il1 < N; ++il1) {
                    int k2 = wrap_c(k - (ik1 - c), N), l2 = wrap_c(l - (il1 - c), N);
                    int ik2 = k2 + c, il2 = l2 + c;
                    s += ca[ik1 * N + il1] * cb[ik2 * N + il2] * P[ik1 * N + il1] * P[ik2 * N + il2] * W[ik1 * N + il2];
                }
            cab[ik * N + il] = s * std::conj(P[ik * N + il]) / double(N);
        }
    // back to the symbol: A(j,m) = (1/N) sum chi e^{2 pi i ((j-c) l - (m-c) k) / N}
    std::vector<cplx> out(N * N);
    for (int j = 0; j < N; ++j)
        for (int m = 0; m < N; ++m) {
            cplx s = 0;
            for (int ik = 0; ik < N; ++ik)
                for (int il = 0; il < N; ++il) {
                    long e = ((long)(j - c) * (il - c) - (long)(m - c) * (ik - c)) % N;
                    s += cab[ik * N + il] * std::polar(1.0, 2 * kPi * e / N);
                }
            out[j * N + m] = s / double(N);
        }
    return WeylSymbol(g, std::move(out));
}

WeylSymbol moyal_product_truncated(const WeylSymbol& A, const WeylSymbol& B, int order) {
    A.grid.require_same(B.grid, "moyal_product_truncated");
    if (order < 0 || order > 3) throw ValidationError("moyal_product_truncated: order must be 0..3");
    const PhaseGrid& g = A.grid;
    const int n = g.dof();
    if (A.poly && B.poly) return WeylSymbol::from_poly(g, moyal_product_poly(*A.poly, *B.poly, g.hbar(), n, order));
    std::map<Poly::Exp, std::vector<cplx>> da, db;
    auto get = [&](std::map<Poly::Exp, std::vector<cplx>>& cache, const WeylSymbol& S, const Poly::Exp& e) -> const std::vector<cplx>& {
        auto it = cache.find(e);
        if (it == cache.end()) it = cache.emplace(e, derivative_values(S, e)).first;
        return it->second;
    };
    std::vector<cplx> out(g.size(), 0.0);
    cplx f = 1;
    for (int k = 0; k <= order; ++k) {
        for (auto& t : symplectic_power(n, k)) {
            const auto& a = get(da, A, t.left);
            const auto& b = get(db, B, t.right);
            cplx w = f * t.coef;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * a[i] * b[i];
        }
        f *= cplx(0, g.hbar() / 2);
    }
    return WeylSymbol(g, std::move(out));
}

WeylSymbol moyal_bracket(const WeylSymbol& A, const WeylSymbol& B) {
    A.grid.require_same(B.grid, "moyal_bracket");
    const PhaseGrid& g = A.grid;
    const cplx inv = 1.0 / cplx(0, g.hbar());
    if (A.poly && B.poly) {
        Poly ab = moyal_product_poly(*A.poly, *B.poly, g.hbar(), g.dof());
        Poly ba = moyal_product_poly(*B.poly, *A.poly, g.hbar(), g.dof());
        return WeylSymbol::from_poly(g, (ab - ba) * inv);
    }
    MatC a = weyl::matrix_from_symbol(A.values, g);
    MatC b = weyl::matrix_from_symbol(B.values, g);
    MatC C = (a * b - b * a) * inv;
    if (A.hermitian && B.hermitian) C = (C + C.adjoint()) / 2.0;
    return WeylSymbol(g, weyl::symbol_from_matrix(C, g));
}

HamiltonianSymbol HamiltonianSymbol::constant(const WeylSymbol& H) {
    if (!H.hermitian) throw ValidationError("hamiltonian: symbol must be real");
    return HamiltonianSymbol{{0.0}, {H}};
}

WeylSymbol HamiltonianSymbol::at(double t) const {
    if (frames.empty()) throw ValidationError("hamiltonian: no keyframes");
    if (frames.size() == 1 || t <= times.front()) return frames.front();
    if (t >= times.back()) return frames.back();
    std::size_t i = 1;
    while (times[i] < t) ++i;
    double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    WeylSymbol out = frames[i - 1];
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = (1 - w) * frames[i - 1].values[k] + w * frames[i].values[k];
    out.poly.reset();
    return out;
}

namespace {

struct LvnKernel {
    PhaseGrid g;
    std::vector<double> times;
    std::vector<MatC> Hk;

    MatC H(double t) const {
        if (Hk.size() == 1 || t <= times.front()) return Hk.front();
        if (t >= times.back()) return Hk.back();
        std::size_t i = 1;
        while (times[i] < t) ++i;
        double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
        return (1 - w) * Hk[i - 1] + w * Hk[i];
    }

    // dW/dt as the symbol of (i / hbar) (rho H - H rho)
    std::vector<double> rate(const std::vector<double>& W, double t) const {
        std::vector<cplx> w(W.begin(), W.end());
        MatC R = weyl::matrix_from_symbol(w, g);
        MatC X = R * H(t);
        MatC C = (X - X.adjoint()) * cplx(0, 1.0 / g.hbar());
        auto s = weyl::symbol_from_matrix(C, g);
        std::vector<double> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].real();
        return out;
    }
};

std::vector<double> rk4(const LvnKernel& K, std::vector<double> W, double t0, double t_final, double dt, long& steps) {
    steps = std::max(1L, (long)std::ceil((t_final - t0) / dt - 1e-9));
    const double h = (t_final - t0) / steps;
    const std::size_t n = W.size();
    std::vector<double> tmp(n);
    for (long s = 0; s < steps; ++s) {
        double t = t0 + s * h;
        auto k1 = K.rate(W, t);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = W[i] + 0.5 * h * k1[i];
        auto k2 = K.rate(tmp, t + 0.5 * h);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = W[i] + 0.5 * h * k2[i];
        auto k3 = K.rate(tmp, t + 0.5 * h);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = W[i] + h * k3[i];
        auto k4 = K.rate(tmp, t + h);
        for (std::size_t i = 0; i < n; ++i) W[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return W;
}

}  // namespace

WignerState evolve_lvn(const WignerState& W, const HamiltonianSymbol& H, double t_final, double dt, LvnReport* report,
                       bool step_halving) {
    if (!(dt > 0)) throw ValidationError("evolve_lvn: dt must be positive");
    if (t_final < 0) throw ValidationError("evolve_lvn: t_final must be non-negative");
    LvnKernel K{W.grid, H.times, {}};
    for (auto& f : H.frames) {
        W.grid.require_same(f.grid, "evolve_lvn");
        if (!f.hermitian) throw ValidationError("evolve_lvn: Hamiltonian symbol must be real");
        MatC h = weyl::matrix_from_symbol(f.values, W.grid);
        K.Hk.push_back((h + h.adjoint()) / 2.0);
    }
    if (t_final == 0) return W;
    LvnReport rep;
    WignerState out{W.grid, rk4(K, W.values, 0, t_final, dt, rep.steps)};
    rep.norm_drift = std::abs(out.integral() - W.integral());
    rep.purity_drift = std::abs(out.purity() - W.purity());
    if (rep.norm_drift > 1e-4 || rep.purity_drift > 1e-4 || !std::isfinite(rep.purity_drift))
        throw NumericalAbort("evolve_lvn: unstable (norm drift " + std::to_string(rep.norm_drift) + ", purity drift " +
                             std::to_string(rep.purity_drift) + "); reduce dt below " + std::to_string(dt / 2));
    if (step_halving) {
        long s2 = 0;
        auto half = rk4(K, W.values, 0, t_final, dt / 2, s2);
        double e = 0;
        for (std::size_t i = 0; i < half.size(); ++i) e = std::max(e, std::abs(half[i] - out.values[i]));
        rep.halving_error = e;
    }
    if (report) *report = rep;
    return out;
}

}  // namespace osqm
