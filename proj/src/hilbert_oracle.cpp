#include "osqm/hilbert_oracle.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string_view>

namespace osqm {

OperatorMatrix OperatorMatrix::hermitian_op(MatC m) {
    double h = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (h > 1e-10) throw ValidationError("operator: not Hermitian (" + std::to_string(h) + ")");
    OperatorMatrix o{std::move(m), true, false};
    return o;
}

OperatorMatrix OperatorMatrix::psd_op(MatC m) {
    OperatorMatrix o = hermitian_op(std::move(m));
    double lo = eigensystem(o.m)->values.minCoeff();
    if (lo < -1e-8) throw ValidationError("operator: not positive semidefinite (min eigenvalue " + std::to_string(lo) + ")");
    o.psd = true;
    return o;
}

std::shared_ptr<const Eigensystem> eigensystem(const MatC& H) {
    static std::shared_mutex mu;
    static std::multimap<std::size_t, std::pair<MatC, std::shared_ptr<const Eigensystem>>> cache;
    std::string_view bytes(reinterpret_cast<const char*>(H.data()), H.size() * sizeof(cplx));
    std::size_t key = std::hash<std::string_view>{}(bytes) ^ (std::size_t)H.rows();
    {
        std::shared_lock lk(mu);
        auto [lo, hi] = cache.equal_range(key);
        for (auto it = lo; it != hi; ++it)
            if (it->second.first.rows() == H.rows() && it->second.first == H) return it->second.second;
    }
    Eigen::SelfAdjointEigenSolver<MatC> es(H);
    if (es.info() != Eigen::Success) throw NumericalAbort("eigensystem: solver did not converge");
    auto sys = std::make_shared<Eigensystem>(Eigensystem{es.eigenvalues(), es.eigenvectors()});
    std::unique_lock lk(mu);
    if (cache.size() > 64) cache.clear();
    cache.emplace(key, std::make_pair(H, sys));
    return sys;
}

MatC kron(const MatC& a, const MatC& b) {
    MatC out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

MatC fourier_matrix(const Axis& ax, double hbar) {
    MatC F(ax.N, ax.N);
    const double s = 1.0 / std::sqrt(double(ax.N));
    for (int m = 0; m < ax.N; ++m)
        for (int a = 0; a < ax.N; ++a) F(m, a) = std::polar(s, -ax.p(m) * ax.x(a) / hbar);
    return F;
}

namespace {
MatC extend(const PhaseGrid& g, int dof, const MatC& one) {
    if (g.dof() == 1) return one;
    MatC I = MatC::Identity(g.N(), g.N());
    return dof == 0 ? kron(one, I) : kron(I, one);
}
}  // namespace

MatC position_operator(const PhaseGrid& g, int dof) {
    const Axis& ax = g.axis(dof);
    MatC X = MatC::Zero(ax.N, ax.N);
    for (int a = 0; a < ax.N; ++a) X(a, a) = ax.x(a);
    return extend(g, dof, X);
}

MatC momentum_operator(const PhaseGrid& g, int dof) {
    const Axis& ax = g.axis(dof);
    MatC F = fourier_matrix(ax, g.hbar());
    VecC p(ax.N);
    for (int m = 0; m < ax.N; ++m) p(m) = ax.p(m);
    MatC P = F.adjoint() * p.asDiagonal() * F;
    return extend(g, dof, P);
}

MatC propagator(const MatC& H, double t, double hbar) {
    auto es = eigensystem(H);
    VecC ph(es->values.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, -es->values(i) * t / hbar);
    return es->vectors * ph.asDiagonal() * es->vectors.adjoint();
}

WaveFunction schrodinger_propagate(const WaveFunction& psi, const OperatorMatrix& H, double t) {
    if (!H.hermitian) throw ValidationError("schrodinger_propagate: H not flagged Hermitian");
    if (t == 0) return psi;
    auto es = eigensystem(H.m);
    VecC c = es->vectors.adjoint() * psi.coeffs();
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -es->values(i) * t / psi.grid.hbar());
    return WaveFunction::from_coeffs(psi.grid, es->vectors * c);
}

OperatorMatrix operator_sqrt(const OperatorMatrix& P) {
    if (!P.psd) throw ValidationError("operator_sqrt: input not flagged PSD");
    auto es = eigensystem(P.m);
    VecR w = es->values;
    double worst = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) < 0) {
            worst = std::max(worst, -w(i));
            w(i) = 0;
        }
    if (worst > 1e-6) throw ValidationError("operator_sqrt: eigenvalue " + std::to_string(-worst) + " is significantly negative");
    if (worst > 0) audit("operator_sqrt clipped negative eigenvalues", worst);
    MatC S = es->vectors * w.cwiseSqrt().cast<cplx>().asDiagonal() * es->vectors.adjoint();
    S = (S + S.adjoint()) / 2.0;
    return OperatorMatrix{S, true, true};
}

PovmResult povm_apply(const DensityOperator& rho, const std::vector<OperatorMatrix>& effects, double u) {
    if (effects.empty()) throw ValidationError("povm_apply: no effects");
    const Eigen::Index d = rho.matrix.rows();
    MatC sum = MatC::Zero(d, d);
    for (auto& e : effects) {
        if (!e.psd) throw ValidationError("povm_apply: effect not flagged PSD");
        sum += e.m;
    }
    double resid = (sum - MatC::Identity(d, d)).cwiseAbs().maxCoeff();
    if (resid > 1e-6) throw ValidationError("povm_apply: effects do not sum to identity, residual " + std::to_string(resid));
    PovmResult r;
    double total = 0;
    for (auto& e : effects) {
        double p = (e.m * rho.matrix).trace().real();
        if (p < 0) {
            if (p < -1e-8) throw NumericalAbort("povm_apply: negative probability " + std::to_string(p));
            audit("povm probability clipped", -p);
            p = 0;
        }
        r.probabilities.push_back(p);
        total += p;
    }
    double acc = 0, target = u * total;
    r.outcome = int(effects.size()) - 1;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        acc += r.probabilities[i];
        if (target < acc) {
            r.outcome = int(i);
            break;
        }
    }
    while (r.probabilities[r.outcome] == 0 && r.outcome > 0) --r.outcome;
    MatC K = operator_sqrt(effects[r.outcome]).m;
    MatC post = K * rho.matrix * K.adjoint();
    post /= post.trace().real();
    r.post = DensityOperator{rho.grid, (post + post.adjoint()) / 2.0};
    return r;
}

std::vector<VecC> pointer_outcomes(const WaveFunction& ready, const VonNeumannCoupling& c) {
    auto es = eigensystem(c.pointer_generator);
    VecC r = es->vectors.adjoint() * ready.coeffs();
    std::vector<VecC> out;
    for (double lam : c.eigenvalues) {
        VecC v = r;
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= std::polar(1.0, -c.strength * lam * es->values(i) / ready.grid.hbar());
        out.push_back(es->vectors * v);
    }
    return out;
}

WaveFunction measurement_premeasurement(const WaveFunction& ready, const WaveFunction& observed,
                                        const VonNeumannCoupling& c, const PhaseGrid& composite) {
    const std::size_t k = c.eigenvectors.size();
    if (k == 0 || c.eigenvalues.size() != k) throw ValidationError("premeasurement: eigenvalue/eigenvector count mismatch");
    auto outs = pointer_outcomes(ready, c);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            double ov = std::abs(outs[i].dot(outs[j]));
            if (ov > 1e-6)
                throw ValidationError("premeasurement: pointer states " + std::to_string(i) + " and " + std::to_string(j) +
                                      " are not orthogonal (overlap " + std::to_string(ov) + ")");
        }
    VecC s = observed.coeffs();
    VecC rem = s;
    const Eigen::Index NM = ready.values.size(), NS = s.size();
    VecC out = VecC::Zero(NM * NS);
    VecC r = ready.coeffs();
    auto add = [&](const VecC& pm, const VecC& sv, cplx amp) {
        for (Eigen::Index a = 0; a < NM; ++a) out.segment(a * NS, NS) += amp * pm(a) * sv;
    };
    for (std::size_t j = 0; j < k; ++j) {
        cplx cj = c.eigenvectors[j].dot(s);
        add(outs[j], c.eigenvectors[j], cj);
        rem -= cj * c.eigenvectors[j];
    }
    // the complement of the eigenvectors has eigenvalue 0: pointer untouched
    add(r, rem, 1.0);
    return WaveFunction::from_coeffs(composite, out);
}

}  // namespace osqm
