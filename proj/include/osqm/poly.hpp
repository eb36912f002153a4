#pragma once

#include <array>
#include <map>
#include <vector>

#include "osqm/types.hpp"

namespace osqm {

// Polynomial in z = (x1..xn, p1..pn) with complex coefficients. Used as the
// closed form behind polynomial observables and symbols, so that brackets and
// star products of polynomials do not go through grid derivatives.
class Poly {
public:
    using Exp = std::array<int, 4>;

    Poly() = default;
    explicit Poly(int nvar) : nvar_(nvar) {}

    static Poly constant(int nvar, cplx c);
    // Single variable z_v.
    static Poly var(int nvar, int v);
    static Poly monomial(int nvar, const Exp& e, cplx c = 1.0);

    int nvar() const { return nvar_; }
    const std::map<Exp, cplx>& terms() const { return terms_; }
    int degree() const;
    bool is_real(double tol = 1e-14) const;

    cplx eval(const double* z) const;
    Poly derivative(int v, int order = 1) const;
    Poly derivative(const Exp& multi) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(cplx s) const;
    Poly& operator+=(const Poly& o);

private:
    void prune();
    int nvar_ = 2;
    std::map<Exp, cplx> terms_;
};

// Bidifferential expansion of sigma(<-d, d->)^k / k! as a list of
// (coefficient, derivative on the left factor, derivative on the right factor).
struct BidiffTerm {
    double coef;
    Poly::Exp left, right;
};
std::vector<BidiffTerm> symplectic_power(int n, int k);

}  // namespace osqm
