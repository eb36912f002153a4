#include "osqm/coarse_graining.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "osqm/fft.hpp"

namespace osqm {

namespace {

const char* var_name(int v, int n) {
    static const char* names1[] = {"x1", "p1"};
    static const char* names2[] = {"x1", "x2", "p1", "p2"};
    return n == 1 ? names1[v] : names2[v];
}

int wrap(int d, int N) {
    const int c = N / 2;
    return ((d + c) % N + N) % N - c;
}

// Ground-state coefficients g0(d), d in [-c, c), indexed by d + c.
std::vector<double> ground_coeffs(const Axis& ax, double hbar) {
    std::vector<double> g(ax.N);
    double s = 0;
    for (int i = 0; i < ax.N; ++i) {
        double x = (i - ax.N / 2) * ax.dx;
        g[i] = std::exp(-x * x / (2 * hbar));
        s += g[i] * g[i];
    }
    for (auto& v : g) v /= std::sqrt(s);
    return g;
}

MatC hermitize(const MatC& m) { return (m + m.adjoint()) / 2.0; }

// Singular values from the spectrum of M^H M.
VecR singular_values(const MatC& m) {
    Eigen::SelfAdjointEigenSolver<MatC> es(hermitize(m.adjoint() * m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}
double op_norm(const MatC& m) { return singular_values(m).maxCoeff(); }
double trace_norm(const MatC& m) { return singular_values(m).sum(); }

// Spectrum-based norms of a Hermitian matrix: (max |lambda|, sum |lambda|).
std::pair<double, double> herm_norms(const MatC& m) {
    Eigen::SelfAdjointEigenSolver<MatC> es(hermitize(m), Eigen::EigenvaluesOnly);
    VecR w = es.eigenvalues().cwiseAbs();
    return {w.maxCoeff(), w.sum()};
}

// Joint approximate diagonalisation (Jacobi sweeps of complex Givens rotations,
// Cardoso-Souloumiac), then every basis vector goes to the region that holds
// most of it.
MatC joint_basis(const std::vector<MatC>& ops) {
    const std::size_t m = ops.size();
    const Eigen::Index n = ops[0].rows();
    std::vector<MatC> A = ops;
    MatC V = MatC::Identity(n, n);
    auto off = [&] {
        double s = 0;
        for (auto& a : A) s += a.squaredNorm() - a.diagonal().squaredNorm();
        return s;
    };
    double prev = off();
    for (int sweep = 0; sweep < 40 && prev > 1e-24; ++sweep) {
        long rotations = 0;
        for (Eigen::Index p = 0; p + 1 < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
                for (std::size_t k = 0; k < m; ++k) {
                    Eigen::Vector3cd g(A[k](p, p) - A[k](q, q), A[k](p, q) + A[k](q, p),
                                       cplx(0, 1) * (A[k](q, p) - A[k](p, q)));
                    G += (g * g.adjoint()).real();
                }
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(G);
                Eigen::Vector3d v = es.eigenvectors().col(2);
                if (v(0) < 0) v = -v;
                const double c = std::sqrt((v(0) + 1) / 2);
                const cplx s = cplx(v(1), -v(2)) / std::sqrt(2 * (v(0) + 1));
                if (std::abs(s) < 1e-12) continue;
                ++rotations;
                const cplx sc = std::conj(s);
                for (auto& a : A) {
                    // rows: A <- R^H A, R = [[c, -conj(s)], [s, c]]
                    for (Eigen::Index k = 0; k < n; ++k) {
                        cplx ap = a(p, k), aq = a(q, k);
                        a(p, k) = c * ap + sc * aq;
                        a(q, k) = -s * ap + c * aq;
                    }
                    // columns: A <- A R
                    for (Eigen::Index k = 0; k < n; ++k) {
                        cplx ap = a(k, p), aq = a(k, q);
                        a(k, p) = c * ap + s * aq;
                        a(k, q) = -sc * ap + c * aq;
                    }
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    cplx vp = V(k, p), vq = V(k, q);
                    V(k, p) = c * vp + s * vq;
                    V(k, q) = -sc * vp + c * vq;
                }
            }
        double now = off();
        if (rotations == 0 || prev - now < 1e-4 * prev) break;
        prev = now;
    }
    return V;
}

std::vector<MatC> assign_projectors(const std::vector<MatC>& ops) {
    const std::size_t m = ops.size();
    const Eigen::Index n = ops[0].rows();
    if (m == 1) return {MatC::Identity(n, n)};
    MatC V = joint_basis(ops);
    std::vector<std::vector<Eigen::Index>> cols(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        VecC v = V.col(i);
        std::vector<double> sc(m);
        for (std::size_t r = 0; r < m; ++r) sc[r] = v.dot(ops[r] * v).real();
        std::size_t best = 0;
        for (std::size_t r = 1; r < m; ++r)
            if (sc[r] > sc[best]) best = r;
        for (std::size_t r = 0; r < m; ++r)
            if (r != best && sc[best] > 1e-3 && std::abs(sc[r] - sc[best]) < 1e-13) {
                std::string dump;
                for (double x : sc) dump += fmt::format(" {:.15g}", x);
                throw NumericalAbort(fmt::format(
                    "classicality projectors: basis vector {} is split evenly between regions {} and {}; region weights:{}",
                    i, best, r, dump));
            }
        cols[best].push_back(i);
    }
    std::vector<MatC> P(m);
    for (std::size_t r = 0; r < m; ++r) {
        MatC K(n, cols[r].size());
        for (std::size_t i = 0; i < cols[r].size(); ++i) K.col(i) = V.col(cols[r][i]);
        P[r] = hermitize(K * K.adjoint());
    }
    return P;
}

}  // namespace

std::size_t KronOp::dim() const {
    std::size_t d = 1;
    for (auto& m : f) d *= m.rows();
    return d;
}

VecC KronOp::apply(const VecC& v) const {
    if (f.size() == 1) return f[0] * v;
    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Index n1 = f[0].rows(), n2 = f[1].rows();
    Eigen::Map<const RowMat> Psi(v.data(), n1, n2);
    RowMat out = f[0] * Psi * f[1].transpose();
    return Eigen::Map<const VecC>(out.data(), n1 * n2);
}

MatC KronOp::dense() const { return f.size() == 1 ? f[0] : kron(f[0], f[1]); }

double KronOp::trace() const {
    double t = 1;
    for (auto& m : f) t *= m.trace().real();
    return t;
}

KronOp KronOp::sqrt() const {
    KronOp s;
    for (auto& m : f) s.f.push_back(operator_sqrt(OperatorMatrix::psd_op(m)).m);
    return s;
}

KronOp KronOp::operator*(const KronOp& o) const {
    KronOp r;
    for (std::size_t i = 0; i < f.size(); ++i) r.f.push_back(f[i] * o.f[i]);
    return r;
}

PhaseGrid dof_grid(const PhaseGrid& g, int dof) { return PhaseGrid(1, g.N(), g.hbar(), {g.axis(dof).x_ext}); }

std::vector<double> coherent_kernel(const PhaseGrid& g) {
    std::vector<double> k(g.size());
    const int n = g.dof();
    double s = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        double r2 = 0;
        for (int v = 0; v < 2 * n; ++v) r2 += g.coord(i, v) * g.coord(i, v);
        k[i] = std::exp(-r2 / g.hbar());
        s += k[i];
    }
    s *= g.cell_volume();
    for (auto& v : k) v /= s;
    return k;
}

WeylSymbol quasiprojector_symbol(const CellMask& R, const std::vector<double>& phi, const PhaseGrid& g) {
    if (R.size() != g.size() || phi.size() != g.size()) throw ValidationError("quasiprojector_symbol: size mismatch");
    std::vector<double> chi(R.begin(), R.end());
    return WeylSymbol::from_real(g, fft::convolve_centered(chi, phi, g));
}

MatC quasiprojector_operator(const CellMask& R, const PhaseGrid& g) {
    if (g.dof() != 1) throw ValidationError("quasiprojector_operator: one dof per call; use factors for n = 2");
    if (R.size() != g.size()) throw ValidationError("quasiprojector_operator: mask size mismatch");
    const int N = g.N(), c = N / 2;
    const auto g0 = ground_coeffs(g.axis(0), g.hbar());
    // D(a, d) = (1/N) sum over p-cells m of row a of e^{2 pi i (m - c) d / N}
    std::vector<int> rows;
    MatC D = MatC::Zero(N, N);
    for (int a = 0; a < N; ++a) {
        bool any = false;
        for (int m = 0; m < N; ++m)
            if (R[a * N + m]) {
                any = true;
                for (int d = -c; d < c; ++d) D(a, d + c) += std::polar(1.0 / N, 2 * kPi * double((m - c) * d % N) / N);
            }
        if (any) rows.push_back(a);
    }
    MatC P(N, N);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            const int d = wrap(j - k, N) + c;
            cplx s = 0;
            for (int a : rows) s += g0[wrap(j - a, N) + c] * g0[wrap(k - a, N) + c] * D(a, d);
            P(j, k) = s;
        }
    return hermitize(P);
}

MatC quasiprojector_operator_serial(const CellMask& R, const PhaseGrid& g) {
    if (g.dof() != 1) throw ValidationError("quasiprojector_operator_serial: n = 1 only");
    const int N = g.N(), c = N / 2;
    const auto g0 = ground_coeffs(g.axis(0), g.hbar());
    MatC P = MatC::Zero(N, N);
    VecC phi(N);
    for (int a = 0; a < N; ++a)
        for (int m = 0; m < N; ++m) {
            if (!R[a * N + m]) continue;
            for (int j = 0; j < N; ++j)
                phi(j) = g0[wrap(j - a, N) + c] * std::polar(1.0, 2 * kPi * double((m - c) * (j - c) % N) / N);
            P += phi * phi.adjoint() / double(N);
        }
    return hermitize(P);
}

Partition Partition::build(const PhaseGrid& g, const BoxSpec& spec) {
    const int n = g.dof(), N = g.N(), c = N / 2;
    if ((int)spec.cuts.size() != 2 * n)
        throw ValidationError(fmt::format("partition: need {} cut lists (x then p per dof), got {}", 2 * n, spec.cuts.size()));
    Partition P;
    P.grid_ = g;
    P.spec_ = spec;
    const double min_side = 5 * std::sqrt(g.hbar());

    // snapped cell boundaries per variable: cell a lies left of a cut when its centre is below it
    std::vector<std::vector<int>> bounds(2 * n);
    for (int v = 0; v < 2 * n; ++v) {
        const Axis& ax = g.axis(v % n);
        const double d = v < n ? ax.dx : ax.dp;
        bounds[v].push_back(0);
        double prev = -1e300;
        for (double cut : spec.cuts[v]) {
            if (!(cut > prev)) throw ValidationError(fmt::format("partition: {} boundaries must be strictly increasing", var_name(v, n)));
            prev = cut;
            int j = (int)std::ceil(cut / d + c - 1e-9);
            if (j <= bounds[v].back() || j >= N)
                throw ValidationError(fmt::format("partition: {} boundary {} falls outside the grid or collapses onto the previous one after snapping",
                                                  var_name(v, n), cut));
            bounds[v].push_back(j);
        }
        bounds[v].push_back(N);
    }

    // per-dof boxes: x bins slowest, then p bins
    P.kernels_.resize(n);
    P.factor_grids_.resize(n);
    P.factor_ops_.resize(n);
    P.factor_boxes_.resize(n);
    std::vector<std::vector<WeylSymbol>> fsyms(n);
    std::vector<std::vector<CellMask>> fmasks(n);
    for (int i = 0; i < n; ++i) {
        P.factor_grids_[i] = dof_grid(g, i);
        const PhaseGrid& gi = P.factor_grids_[i];
        P.kernels_[i] = coherent_kernel(gi);
        const auto& bx = bounds[i];
        const auto& bp = bounds[n + i];
        for (std::size_t a = 0; a + 1 < bx.size(); ++a)
            for (std::size_t b = 0; b + 1 < bp.size(); ++b) {
                P.factor_boxes_[i].push_back({bx[a], bx[a + 1], bp[b], bp[b + 1]});
                CellMask m(gi.size(), 0);
                for (int x = bx[a]; x < bx[a + 1]; ++x)
                    for (int p = bp[b]; p < bp[b + 1]; ++p) m[x * N + p] = 1;
                fmasks[i].push_back(std::move(m));
            }
        const std::size_t nb = fmasks[i].size();
        P.factor_ops_[i].resize(nb);
        fsyms[i].resize(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            fsyms[i][b] = quasiprojector_symbol(fmasks[i][b], P.kernels_[i], gi);
            P.factor_ops_[i][b] = quasiprojector_operator(fmasks[i][b], gi);
        }
    }

    std::vector<std::vector<int>> combos;
    if (n == 1) {
        for (std::size_t b = 0; b < fmasks[0].size(); ++b) combos.push_back({int(b)});
    } else {
        for (std::size_t b1 = 0; b1 < fmasks[0].size(); ++b1)
            for (std::size_t b2 = 0; b2 < fmasks[1].size(); ++b2) combos.push_back({int(b1), int(b2)});
    }
    if (!spec.labels.empty() && spec.labels.size() != combos.size())
        throw ValidationError(fmt::format("partition: {} labels given for {} regions", spec.labels.size(), combos.size()));

    std::string errors;
    for (std::size_t r = 0; r < combos.size(); ++r) {
        Region R;
        R.label = spec.labels.empty() ? fmt::format("R{}", r) : spec.labels[r];
        R.factor = combos[r];
        for (int i = 0; i < n; ++i) {
            const auto& box = P.factor_boxes_[i][R.factor[i]];
            R.lo[i] = box[0], R.hi[i] = box[1];
            R.lo[n + i] = box[2], R.hi[n + i] = box[3];
        }
        for (int v = 0; v < 2 * n; ++v) {
            const Axis& ax = g.axis(v % n);
            const double d = v < n ? ax.dx : ax.dp;
            R.lo_edge[v] = (R.lo[v] - c - 0.5) * d;
            R.hi_edge[v] = (R.hi[v] - c - 0.5) * d;
            const double side = (R.hi[v] - R.lo[v]) * d;
            if (side < min_side * (1 - 1e-12))
                errors += fmt::format("{}region '{}' is {:.4g} wide along {}; the minimum is 5*sqrt(hbar) = {:.4g}",
                                      errors.empty() ? "" : "; ", R.label, side, var_name(v, n), min_side);
        }
        P.regions_.push_back(std::move(R));
    }
    if (!errors.empty()) throw ValidationError("partition: " + errors);

    for (auto& R : P.regions_) {
        R.mask.assign(g.size(), 0);
        if (n == 1) {
            R.mask = fmasks[0][R.factor[0]];
            R.symbol = fsyms[0][R.factor[0]];
        } else {
            const std::size_t M = (std::size_t)N * N;
            const auto& m1 = fmasks[0][R.factor[0]];
            const auto& m2 = fmasks[1][R.factor[1]];
            const auto& s1 = fsyms[0][R.factor[0]].values;
            const auto& s2 = fsyms[1][R.factor[1]].values;
            std::vector<double> s(g.size());
            for (std::size_t i1 = 0; i1 < M; ++i1)
                for (std::size_t i2 = 0; i2 < M; ++i2) {
                    R.mask[i1 * M + i2] = m1[i1] & m2[i2];
                    s[i1 * M + i2] = s1[i1].real() * s2[i2].real();
                }
            R.symbol = WeylSymbol::from_real(g, s);
        }
        for (int i = 0; i < n; ++i) R.op.f.push_back(P.factor_ops_[i][R.factor[i]]);
        R.sqrt_op = R.op.sqrt();
    }

    double worst = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double s = 0;
        for (auto& R : P.regions_) s += R.symbol.values[k].real();
        worst = std::max(worst, std::abs(s - 1));
    }
    if (worst > 1e-10) throw NumericalAbort(fmt::format("partition: symbols fail to sum to one ({:.3e})", worst));
    return P;
}

int Partition::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < regions_.size(); ++i)
        if (regions_[i].label == label) return int(i);
    throw ValidationError("partition: no region labelled '" + label + "'");
}

DefectReport quasiprojector_defect(const Partition& P) {
    const int n = P.grid().dof();
    const auto& regs = P.regions();
    DefectReport rep;
    // factor-level norms of A_a A_b, cached per dof
    std::vector<std::map<std::pair<int, int>, std::pair<double, double>>> pair_norms(n);
    std::vector<std::vector<VecR>> eig(n);
    for (int i = 0; i < n; ++i)
        for (auto& A : P.factor_ops(i)) eig[i].push_back(eigensystem(A)->values);
    auto pn = [&](int i, int a, int b) {
        auto key = std::make_pair(a, b);
        auto it = pair_norms[i].find(key);
        if (it != pair_norms[i].end()) return it->second;
        MatC M = P.factor_ops(i)[a] * P.factor_ops(i)[b];
        auto v = std::make_pair(op_norm(M), trace_norm(M));
        pair_norms[i][key] = v;
        return v;
    };
    // products of factor eigenvalues
    auto product_eigs = [&](const Region& R) {
        std::vector<double> out{1.0};
        for (int i = 0; i < n; ++i) {
            std::vector<double> next;
            for (double a : out)
                for (Eigen::Index k = 0; k < eig[i][R.factor[i]].size(); ++k) next.push_back(a * eig[i][R.factor[i]](k));
            out.swap(next);
        }
        return out;
    };
    rep.min_eigenvalue = 1e300;
    rep.max_eigenvalue = -1e300;
    for (std::size_t a = 0; a < regs.size(); ++a) {
        const double tr = regs[a].op.trace();
        auto ev = product_eigs(regs[a]);
        double dop = 0, dtr = 0;
        for (double l : ev) {
            dop = std::max(dop, std::abs(l * l - l));
            dtr += std::abs(l * l - l);
            rep.min_eigenvalue = std::min(rep.min_eigenvalue, l);
            rep.max_eigenvalue = std::max(rep.max_eigenvalue, l);
        }
        rep.operator_norm = std::max(rep.operator_norm, dop);
        rep.trace_relative = std::max(rep.trace_relative, dtr / tr);
        for (std::size_t b = 0; b < regs.size(); ++b) {
            if (a == b) continue;
            double o = 1, t = 1;
            for (int i = 0; i < n; ++i) {
                auto [oi, ti] = pn(i, regs[a].factor[i], regs[b].factor[i]);
                o *= oi;
                t *= ti;
            }
            rep.operator_norm = std::max(rep.operator_norm, o);
            rep.trace_relative = std::max(rep.trace_relative, t / tr);
        }
    }
    // the region sum is a product of per-dof sums
    std::vector<double> s{1.0};
    for (int i = 0; i < n; ++i) {
        MatC S = MatC::Zero(P.grid().N(), P.grid().N());
        for (auto& A : P.factor_ops(i)) S += A;
        Eigen::SelfAdjointEigenSolver<MatC> es(hermitize(S), Eigen::EigenvaluesOnly);
        std::vector<double> next;
        for (double a : s)
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) next.push_back(a * es.eigenvalues()(k));
        s.swap(next);
    }
    for (double l : s) rep.completeness = std::max(rep.completeness, std::abs(l - 1));
    return rep;
}

ExactProjectors classicality_projectors(const Partition& P, bool with_closeness) {
    const int n = P.grid().dof();
    std::vector<std::vector<MatC>> fp(n);
    for (int i = 0; i < n; ++i) fp[i] = assign_projectors(P.factor_ops(i));
    ExactProjectors out;
    const auto& regs = P.regions();
    for (auto& R : regs) {
        KronOp k;
        for (int i = 0; i < n; ++i) k.f.push_back(fp[i][R.factor[i]]);
        out.proj.push_back(std::move(k));
    }
    // Hermitian factors: idempotence from factor spectra, orthogonality from
    // multiplicativity of the operator norm, completeness from the factor sums.
    std::vector<std::vector<VecR>> eig(n);
    for (int i = 0; i < n; ++i)
        for (auto& p : fp[i]) {
            Eigen::SelfAdjointEigenSolver<MatC> es(p, Eigen::EigenvaluesOnly);
            eig[i].push_back(es.eigenvalues());
        }
    for (std::size_t a = 0; a < regs.size(); ++a) {
        std::vector<double> ev{1.0};
        for (int i = 0; i < n; ++i) {
            std::vector<double> next;
            for (double x : ev)
                for (Eigen::Index k = 0; k < eig[i][regs[a].factor[i]].size(); ++k) next.push_back(x * eig[i][regs[a].factor[i]](k));
            ev.swap(next);
        }
        for (double l : ev) out.idempotence = std::max(out.idempotence, std::abs(l * l - l));
        for (std::size_t b = a + 1; b < regs.size(); ++b) {
            double o = 1;
            for (int i = 0; i < n; ++i) o *= op_norm(fp[i][regs[a].factor[i]] * fp[i][regs[b].factor[i]]);
            out.orthogonality = std::max(out.orthogonality, o);
        }
    }
    std::vector<double> s{1.0};
    for (int i = 0; i < n; ++i) {
        MatC S = MatC::Zero(P.grid().N(), P.grid().N());
        for (auto& p : fp[i]) S += p;
        Eigen::SelfAdjointEigenSolver<MatC> es(hermitize(S), Eigen::EigenvaluesOnly);
        std::vector<double> next;
        for (double x : s)
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) next.push_back(x * es.eigenvalues()(k));
        s.swap(next);
    }
    for (double l : s) out.completeness = std::max(out.completeness, std::abs(l - 1));

    if (with_closeness) {
        for (std::size_t a = 0; a < regs.size(); ++a) {
            auto [o, t] = herm_norms(out.proj[a].dense() - regs[a].op.dense());
            out.closeness_op.push_back(o);
            out.closeness_trace.push_back(t / regs[a].op.trace());
        }
    }
    return out;
}

QuasiRestriction is_quasirestricted(const WaveFunction& psi, const Region& R, double tol) {
    const double cut = 1e-6;
    VecC v = psi.coeffs();
    const double nrm = v.norm();
    if (!(nrm > 0)) throw ValidationError("is_quasirestricted: zero state");
    v /= nrm;
    double out2 = 0;
    if (R.op.f.size() == 1) {
        auto es = eigensystem(R.op.f[0]);
        VecC c = es->vectors.adjoint() * v;
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (std::sqrt(std::max(es->values(i), 0.0)) <= cut) out2 += std::norm(c(i));
    } else {
        auto e1 = eigensystem(R.op.f[0]);
        auto e2 = eigensystem(R.op.f[1]);
        using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Eigen::Index n1 = R.op.f[0].rows(), n2 = R.op.f[1].rows();
        Eigen::Map<const RowMat> Psi(v.data(), n1, n2);
        MatC C = e1->vectors.adjoint() * Psi * e2->vectors.conjugate();
        for (Eigen::Index i = 0; i < n1; ++i)
            for (Eigen::Index j = 0; j < n2; ++j)
                if (std::sqrt(std::max(e1->values(i) * e2->values(j), 0.0)) <= cut) out2 += std::norm(C(i, j));
    }
    QuasiRestriction q;
    q.residual = std::sqrt(out2);
    q.ok = q.residual < tol;
    return q;
}

CellMask interior_region(const Region& R, double eps) {
    CellMask m(R.symbol.values.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (R.symbol.values[i].real() > 1 - eps) m[i] = 1, any = true;
    if (!any) throw ValidationError(fmt::format("interior_region: region '{}' has no cell with Pi > 1 - {:g}", R.label, eps));
    return m;
}

double symbol_at(const Region& R, const PhasePoint& z) {
    return fft::interpolate(R.symbol.real_values(), R.symbol.grid, z);
}

}  // namespace osqm
