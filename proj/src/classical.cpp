#include "osqm/classical.hpp"

#include <cmath>

#include "osqm/fft.hpp"

namespace osqm {

ClassicalObservable ClassicalObservable::from_poly(const PhaseGrid& g, const Poly& p) {
    if (!p.is_real()) throw ValidationError("classical observable: polynomial is not real");
    const int nv = 2 * g.dof();
    ClassicalObservable o{g, std::vector<double>(g.size()), p};
    std::vector<double> z(nv);
    for (std::size_t k = 0; k < g.size(); ++k) {
        for (int i = 0; i < nv; ++i) z[i] = g.coord(k, i);
        o.values[k] = p.eval(z.data()).real();
    }
    return o;
}

ClassicalObservable ClassicalObservable::from_values(const PhaseGrid& g, std::vector<double> v) {
    if (v.size() != g.size()) throw ValidationError("classical observable: size does not match grid");
    for (double x : v)
        if (!std::isfinite(x)) throw ValidationError("classical observable: non-finite value");
    return ClassicalObservable{g, std::move(v), std::nullopt};
}

std::vector<double> ClassicalObservable::derivative_field(int v) const {
    if (!poly) return fft::derivative(values, grid, v, 1);
    return from_poly(grid, poly->derivative(v)).values;
}

ClassicalObservable poisson_bracket(const ClassicalObservable& A, const ClassicalObservable& B) {
    A.grid.require_same(B.grid, "poisson_bracket");
    const int n = A.grid.dof();
    if (A.poly && B.poly) {
        Poly r(2 * n);
        for (int i = 0; i < n; ++i)
            r += A.poly->derivative(i) * B.poly->derivative(n + i) - B.poly->derivative(i) * A.poly->derivative(n + i);
        return ClassicalObservable::from_poly(A.grid, r);
    }
    std::vector<double> out(A.grid.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        auto ax = A.derivative_field(i), ap = A.derivative_field(n + i);
        auto bx = B.derivative_field(i), bp = B.derivative_field(n + i);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += ax[k] * bp[k] - bx[k] * ap[k];
    }
    return ClassicalObservable::from_values(A.grid, std::move(out));
}

namespace {

struct Vector {
    const int n;
    std::vector<Poly> dx, dp;  // dH/dx_i, dH/dp_i
    bool separable = true;

    Vector(const Poly& H, int n_) : n(n_) {
        for (int i = 0; i < n; ++i) {
            dx.push_back(H.derivative(i));
            dp.push_back(H.derivative(n + i));
        }
        for (auto& [e, c] : H.terms()) {
            bool hasx = false, hasp = false;
            for (int i = 0; i < n; ++i) {
                hasx |= e[i] > 0;
                hasp |= e[n + i] > 0;
            }
            if (hasx && hasp) separable = false;
        }
    }
    // z = (x, p); out = (dH/dp, -dH/dx)
    void field(const double* z, double* out) const {
        for (int i = 0; i < n; ++i) {
            out[i] = dp[i].eval(z).real();
            out[n + i] = -dx[i].eval(z).real();
        }
    }
    void step(std::vector<double>& z, double h) const {
        const int m = 2 * n;
        std::vector<double> f(m);
        if (separable) {
            field(z.data(), f.data());
            for (int i = 0; i < n; ++i) z[n + i] += 0.5 * h * f[n + i];
            field(z.data(), f.data());
            for (int i = 0; i < n; ++i) z[i] += h * f[i];
            field(z.data(), f.data());
            for (int i = 0; i < n; ++i) z[n + i] += 0.5 * h * f[n + i];
            return;
        }
        // implicit midpoint by fixed-point iteration
        std::vector<double> z1 = z, mid(m);
        for (int it = 0; it < 100; ++it) {
            for (int i = 0; i < m; ++i) mid[i] = 0.5 * (z[i] + z1[i]);
            field(mid.data(), f.data());
            double delta = 0;
            for (int i = 0; i < m; ++i) {
                double nz = z[i] + h * f[i];
                delta = std::max(delta, std::abs(nz - z1[i]));
                z1[i] = nz;
            }
            if (delta < 1e-15 * (1 + std::abs(z1[0]))) break;
        }
        z = z1;
    }
};

bool inside(const PhaseGrid& g, const std::vector<double>& z) {
    const int n = g.dof();
    for (int i = 0; i < n; ++i) {
        const Axis& a = g.axis(i);
        if (std::abs(z[i]) > a.x_ext || std::abs(z[n + i]) > a.p_ext) return false;
    }
    return true;
}

PhasePoint to_point(const std::vector<double>& z, int n) {
    return PhasePoint{std::vector<double>(z.begin(), z.begin() + n), std::vector<double>(z.begin() + n, z.end())};
}

std::vector<double> from_point(const PhasePoint& p) {
    std::vector<double> z = p.x;
    z.insert(z.end(), p.p.begin(), p.p.end());
    return z;
}

const Poly& need_poly(const ClassicalObservable& H) {
    if (!H.poly) throw ValidationError("hamilton_flow: H needs a closed form");
    return *H.poly;
}

}  // namespace

FlowResult hamilton_flow(const ClassicalObservable& H, const PhasePoint& z0, double t, double dt) {
    if (!(dt > 0)) throw ValidationError("hamilton_flow: dt must be positive");
    const int n = H.grid.dof();
    if ((int)z0.x.size() != n || (int)z0.p.size() != n) throw ValidationError("hamilton_flow: dimension mismatch");
    Vector V(need_poly(H), n);
    auto z = from_point(z0);
    if (!inside(H.grid, z)) throw ValidationError("hamilton_flow: z0 outside grid");
    FlowResult r;
    r.points.push_back(z0);
    const long steps = std::max(1L, (long)std::ceil(std::abs(t) / dt - 1e-9));
    const double h = t / steps;
    for (long s = 0; s < steps; ++s) {
        V.step(z, h);
        if (!inside(H.grid, z)) {
            r.escaped = true;
            break;
        }
        r.points.push_back(to_point(z, n));
    }
    return r;
}

PhasePoint flow_map(const ClassicalObservable& H, const PhasePoint& z0, double t, double dt) {
    const int n = H.grid.dof();
    Vector V(need_poly(H), n);
    auto z = from_point(z0);
    const long steps = std::max(1L, (long)std::ceil(std::abs(t) / dt - 1e-9));
    const double h = t / steps;
    for (long s = 0; s < steps; ++s) V.step(z, h);
    return to_point(z, n);
}

CellMask evolve_region_classically(const CellMask& R, const ClassicalObservable& H, double t, double dt) {
    const PhaseGrid& g = H.grid;
    if (g.dof() != 1) throw ValidationError("evolve_region_classically: n = 1 only");
    if (R.size() != g.size()) throw ValidationError("evolve_region_classically: mask size does not match grid");
    if (t == 0) return R;
    const int N = g.N();
    const Axis& a = g.axis(0);
    Vector V(need_poly(H), 1);
    const long steps = std::max(1L, (long)std::ceil(std::abs(t) / dt - 1e-9));
    auto run = [&](double x, double p, double tt) {
        std::vector<double> z{x, p};
        for (long s = 0; s < steps; ++s) V.step(z, tt / steps);
        return z;
    };
    // forward images must stay on the grid
    for (int j = 0; j < N; ++j)
        for (int m = 0; m < N; ++m) {
            if (!R[j * N + m]) continue;
            auto z = run(a.x(j), a.p(m), t);
            if (!inside(g, z)) throw ValidationError("evolve_region_classically: image escapes the grid");
        }
    CellMask out(g.size(), 0);
#pragma omp parallel for schedule(dynamic, 4)
    for (int j = 0; j < N; ++j)
        for (int m = 0; m < N; ++m) {
            auto z = run(a.x(j), a.p(m), -t);
            long jj = std::lround(z[0] / a.dx) + N / 2, mm = std::lround(z[1] / a.dp) + N / 2;
            if (jj >= 0 && jj < N && mm >= 0 && mm < N) out[j * N + m] = R[jj * N + mm];
        }
    return out;
}

}  // namespace osqm
