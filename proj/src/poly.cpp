#include "osqm/poly.hpp"

#include <algorithm>
#include <cmath>

namespace osqm {

Poly Poly::constant(int nvar, cplx c) { return monomial(nvar, Exp{0, 0, 0, 0}, c); }

Poly Poly::var(int nvar, int v) {
    Exp e{0, 0, 0, 0};
    e[v] = 1;
    return monomial(nvar, e);
}

Poly Poly::monomial(int nvar, const Exp& e, cplx c) {
    Poly p(nvar);
    if (c != cplx(0)) p.terms_[e] = c;
    return p;
}

int Poly::degree() const {
    int d = 0;
    for (auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2] + e[3]);
    return d;
}

bool Poly::is_real(double tol) const {
    for (auto& [e, c] : terms_)
        if (std::abs(c.imag()) > tol * std::max(1.0, std::abs(c.real()))) return false;
    return true;
}

cplx Poly::eval(const double* z) const {
    cplx s = 0;
    for (auto& [e, c] : terms_) {
        double m = 1;
        for (int v = 0; v < nvar_; ++v)
            for (int k = 0; k < e[v]; ++k) m *= z[v];
        s += c * m;
    }
    return s;
}

Poly Poly::derivative(int v, int order) const {
    Poly out(nvar_);
    for (auto& [e, c] : terms_) {
        if (e[v] < order) continue;
        double f = 1;
        for (int k = 0; k < order; ++k) f *= e[v] - k;
        Exp e2 = e;
        e2[v] -= order;
        out.terms_[e2] += c * f;
    }
    out.prune();
    return out;
}

Poly Poly::derivative(const Exp& multi) const {
    Poly out = *this;
    for (int v = 0; v < nvar_; ++v)
        if (multi[v]) out = out.derivative(v, multi[v]);
    return out;
}

Poly Poly::operator+(const Poly& o) const {
    Poly out = *this;
    out += o;
    return out;
}

Poly& Poly::operator+=(const Poly& o) {
    for (auto& [e, c] : o.terms_) terms_[e] += c;
    prune();
    return *this;
}

Poly Poly::operator-(const Poly& o) const { return *this + o * cplx(-1); }

Poly Poly::operator*(const Poly& o) const {
    Poly out(nvar_);
    for (auto& [e1, c1] : terms_)
        for (auto& [e2, c2] : o.terms_) {
            Exp e;
            for (int v = 0; v < 4; ++v) e[v] = e1[v] + e2[v];
            out.terms_[e] += c1 * c2;
        }
    out.prune();
    return out;
}

Poly Poly::operator*(cplx s) const {
    Poly out(nvar_);
    for (auto& [e, c] : terms_) out.terms_[e] = c * s;
    out.prune();
    return out;
}

void Poly::prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = it->second == cplx(0) ? terms_.erase(it) : std::next(it);
}

std::vector<BidiffTerm> symplectic_power(int n, int k) {
    // sigma = sum_i (dx_i <- dp_i ->  -  dp_i <- dx_i ->)
    std::map<std::pair<Poly::Exp, Poly::Exp>, double> acc;
    acc[{Poly::Exp{0, 0, 0, 0}, Poly::Exp{0, 0, 0, 0}}] = 1.0;
    for (int step = 0; step < k; ++step) {
        std::map<std::pair<Poly::Exp, Poly::Exp>, double> next;
        for (auto& [key, c] : acc)
            for (int i = 0; i < n; ++i) {
                auto a = key;
                a.first[i] += 1;
                a.second[n + i] += 1;
                next[a] += c;
                auto b = key;
                b.first[n + i] += 1;
                b.second[i] += 1;
                next[b] -= c;
            }
        acc.swap(next);
    }
    double fact = 1;
    for (int j = 2; j <= k; ++j) fact *= j;
    std::vector<BidiffTerm> out;
    for (auto& [key, c] : acc)
        if (c != 0) out.push_back({c / fact, key.first, key.second});
    return out;
}

}  // namespace osqm
