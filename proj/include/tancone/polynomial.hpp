#ifndef TANCONE_POLYNOMIAL_HPP
#define TANCONE_POLYNOMIAL_HPP

#include "tancone/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tancone {

using Monomial = std::vector<uint32_t>; // exponent tuple, fixed length = ambient vars

inline uint32_t total_degree(const Monomial& m) {
    uint32_t d = 0;
    for (uint32_t e : m) d += e;
    return d;
}

/// Sparse exact multivariate polynomial over the rationals.
///
/// Terms are kept in a map ordered lexicographically by exponent tuple, no
/// zero coefficients stored, so equality is structural.
class Polynomial {
public:
    explicit Polynomial(int nvars = 1) : nvars_(nvars) {
        if (nvars < 1) throw std::invalid_argument("polynomial needs at least one variable");
    }

    static Polynomial zero(int nvars) { return Polynomial(nvars); }

    static Polynomial constant(int nvars, const Rational& c) {
        Polynomial p(nvars);
        if (c != 0) p.terms_[Monomial(nvars, 0)] = c;
        return p;
    }

    static Polynomial variable(int nvars, int i) {
        if (i < 0 || i >= nvars) throw std::invalid_argument("variable index out of range");
        Polynomial p(nvars);
        Monomial m(nvars, 0);
        m[i] = 1;
        p.terms_[m] = 1;
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    /// Total degree; nullopt is the sentinel for the zero polynomial.
    std::optional<long> degree() const {
        if (terms_.empty()) return std::nullopt;
        long d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, (long)total_degree(m));
        return d;
    }

    long degree_in(int var) const {
        long d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, (long)m[var]);
        return d;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if ((int)m.size() != nvars_) throw std::invalid_argument("monomial arity mismatch");
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (c != 0) terms_[m] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial operator-() const {
        Polynomial r(nvars_);
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }

    Polynomial& operator+=(const Polynomial& g) {
        check_arity(g);
        for (const auto& [m, c] : g.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& g) {
        check_arity(g);
        for (const auto& [m, c] : g.terms_) add_term(m, -c);
        return *this;
    }

    friend Polynomial operator+(Polynomial f, const Polynomial& g) { return f += g; }
    friend Polynomial operator-(Polynomial f, const Polynomial& g) { return f -= g; }

    friend Polynomial operator*(const Polynomial& f, const Polynomial& g) {
        f.check_arity(g);
        Polynomial r(f.nvars_);
        for (const auto& [mf, cf] : f.terms_)
            for (const auto& [mg, cg] : g.terms_) {
                Monomial m(f.nvars_);
                for (int i = 0; i < f.nvars_; ++i) m[i] = mf[i] + mg[i];
                r.add_term(m, cf * cg);
            }
        return r;
    }

    friend Polynomial operator*(const Rational& c, const Polynomial& f) {
        Polynomial r(f.nvars_);
        if (c == 0) return r;
        for (const auto& [m, cf] : f.terms_) r.terms_[m] = c * cf;
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    Rational eval(const std::vector<Rational>& x) const {
        if ((int)x.size() != nvars_) throw std::invalid_argument("evaluation point arity mismatch");
        Rational acc = 0;
        for (const auto& [m, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < nvars_; ++i)
                if (m[i]) t *= rat_pow(x[i], m[i]);
            acc += t;
        }
        return acc;
    }

    double eval_double(const std::vector<double>& x) const {
        double acc = 0;
        for (const auto& [m, c] : terms_) {
            double t = to_double(c);
            for (int i = 0; i < nvars_; ++i)
                for (uint32_t k = 0; k < m[i]; ++k) t *= x[i];
            acc += t;
        }
        return acc;
    }

    /// Formal partial derivative with respect to variable i.
    Polynomial derivative(int var) const {
        Polynomial r(nvars_);
        for (const auto& [m, c] : terms_) {
            if (m[var] == 0) continue;
            Monomial d = m;
            d[var] -= 1;
            r.add_term(d, c * m[var]);
        }
        return r;
    }

    std::vector<Polynomial> gradient() const {
        std::vector<Polynomial> g;
        g.reserve(nvars_);
        for (int i = 0; i < nvars_; ++i) g.push_back(derivative(i));
        return g;
    }

    /// g(x) = f(x + p), exact.
    Polynomial translate(const std::vector<Rational>& p) const {
        if ((int)p.size() != nvars_) throw std::invalid_argument("translate point arity mismatch");
        // cached powers of (x_i + p_i)
        std::vector<std::vector<Polynomial>> pows(nvars_);
        Polynomial r(nvars_);
        for (const auto& [m, c] : terms_) {
            Polynomial t = Polynomial::constant(nvars_, c);
            for (int i = 0; i < nvars_; ++i) {
                if (m[i] == 0) continue;
                auto& cache = pows[i];
                if (cache.empty()) cache.push_back(Polynomial::constant(nvars_, 1));
                while (cache.size() <= m[i]) {
                    Polynomial base = Polynomial::variable(nvars_, i) + Polynomial::constant(nvars_, p[i]);
                    cache.push_back(cache.back() * base);
                }
                t = t * cache[m[i]];
            }
            r += t;
        }
        return r;
    }

    /// Homogeneous component of minimal total degree.
    Polynomial initial_form() const {
        if (terms_.empty()) throw std::domain_error("initial form of the zero polynomial");
        uint32_t dmin = UINT32_MAX;
        for (const auto& [m, c] : terms_) dmin = std::min(dmin, total_degree(m));
        Polynomial r(nvars_);
        for (const auto& [m, c] : terms_)
            if (total_degree(m) == dmin) r.terms_[m] = c;
        return r;
    }

    /// Coefficient polynomial of x_var^k, as a polynomial with x_var absent.
    Polynomial coefficient_of(int var, uint32_t k) const {
        Polynomial r(nvars_);
        for (const auto& [m, c] : terms_) {
            if (m[var] != k) continue;
            Monomial d = m;
            d[var] = 0;
            r.terms_[d] = c;
        }
        return r;
    }

private:
    void check_arity(const Polynomial& g) const {
        if (nvars_ != g.nvars_) throw std::invalid_argument("polynomial ambient dimension mismatch");
    }

    int nvars_;
    std::map<Monomial, Rational> terms_;
};

enum class PolyOp { Add, Sub, Mul };

inline Polynomial poly_arith(PolyOp op, const Polynomial& f, const Polynomial& g) {
    switch (op) {
        case PolyOp::Add: return f + g;
        case PolyOp::Sub: return f - g;
        case PolyOp::Mul: return f * g;
    }
    throw std::logic_error("unreachable");
}

/// Taylor coefficient polynomial: d^k f / dx_var^k divided by k!.
inline Polynomial taylor_coefficient(const Polynomial& f, int var, unsigned k) {
    Polynomial d = f;
    Rational fact = 1;
    for (unsigned j = 1; j <= k; ++j) {
        d = d.derivative(var);
        fact *= j;
    }
    return Rational(1) / fact * d;
}

} // namespace tancone

#endif
