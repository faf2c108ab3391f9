#pragma once

#include "bmq/rational.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmq {

// Lattice vectors and integral covectors. All coordinate data in the engine
// is 64-bit; intermediate products run through 128 bits and overflow is an
// error, never silent wraparound.
using Vec = std::vector<long long>;

inline long long checked_ll(__int128 v) {
    if (v > (std::numeric_limits<long long>::max)() || v < (std::numeric_limits<long long>::min)())
        throw std::overflow_error("lattice coordinate overflow");
    return static_cast<long long>(v);
}

inline long long vdot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch in dot product");
    __int128 acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<__int128>(a[i]) * b[i];
    return checked_ll(acc);
}

inline Rat vdot_rat(const Vec& n, const std::vector<Rat>& y) {
    if (n.size() != y.size()) throw std::invalid_argument("dimension mismatch in dot product");
    Rat acc = 0;
    for (std::size_t i = 0; i < n.size(); ++i) acc += Rat(n[i]) * y[i];
    return acc;
}

inline Vec vadd(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_ll(static_cast<__int128>(a[i]) + b[i]);
    return r;
}

inline Vec vsub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_ll(static_cast<__int128>(a[i]) - b[i]);
    return r;
}

inline Vec vneg(const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_ll(-static_cast<__int128>(a[i]));
    return r;
}

inline Vec vscale(const Vec& a, long long k) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_ll(static_cast<__int128>(a[i]) * k);
    return r;
}

inline bool is_zero_vec(const Vec& a) {
    for (long long x : a)
        if (x != 0) return false;
    return true;
}

// gcd of absolute entries; 0 for the zero vector.
inline long long content(const Vec& v) {
    long long g = 0;
    for (long long x : v) g = std::gcd(g, x < 0 ? -x : x);
    return g;
}

inline bool is_primitive(const Vec& v) { return content(v) == 1; }

inline Vec primitive(const Vec& v) {
    long long c = content(v);
    if (c == 0) throw std::domain_error("zero vector has no primitive representative");
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] / c;
    return r;
}

// Flips sign so the first nonzero entry is positive; zero vector unchanged.
inline Vec lex_positive(const Vec& v) {
    for (long long x : v) {
        if (x > 0) return v;
        if (x < 0) return vneg(v);
    }
    return v;
}

struct XgcdResult {
    long long g;  // gcd(|a|,|b|) >= 0
    long long x;
    long long y;  // a*x + b*y == g
};

inline XgcdResult xgcd(long long a, long long b) {
    long long sa = a < 0 ? -1 : 1, sb = b < 0 ? -1 : 1;
    long long r0 = a < 0 ? -a : a, r1 = b < 0 ? -b : b;
    long long s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
        long long q = r0 / r1;
        long long r2 = r0 - q * r1;
        long long s2 = s0 - q * s1;
        long long t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    return {r0, sa * s0, sb * t0};
}

// Integral covector g with g(u) = 1, built from iterated extended gcds;
// deterministic. Requires u primitive.
inline Vec transverse_functional(const Vec& u) {
    if (is_zero_vec(u)) throw std::domain_error("transverse functional of the zero vector");
    Vec x(u.size(), 0);
    long long g = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        XgcdResult e = xgcd(g, u[i]);
        for (std::size_t j = 0; j < i; ++j) x[j] = checked_ll(static_cast<__int128>(x[j]) * e.x);
        x[i] = e.y;
        g = e.g;
    }
    if (g != 1) throw std::domain_error("transverse functional requires a primitive vector");
    return x;
}

// Reduces a set of integer generators to an echelon lattice basis of their
// span (elementary column operations preserve the generated lattice).
inline std::vector<Vec> lattice_basis_of_span(std::vector<Vec> gens, int d) {
    std::vector<Vec> work;
    for (auto& v : gens)
        if (!is_zero_vec(v)) work.push_back(std::move(v));
    std::vector<Vec> basis;
    for (int r = 0; r < d; ++r) {
        for (;;) {
            int best = -1;
            for (std::size_t i = 0; i < work.size(); ++i) {
                if (work[i][r] == 0) continue;
                if (best < 0 || std::llabs(work[i][r]) < std::llabs(work[best][r])) best = static_cast<int>(i);
            }
            if (best < 0) break;
            bool others = false;
            for (std::size_t i = 0; i < work.size(); ++i) {
                if (static_cast<int>(i) == best || work[i][r] == 0) continue;
                others = true;
                long long q = work[i][r] / work[best][r];
                for (int k = 0; k < d; ++k)
                    work[i][k] = checked_ll(static_cast<__int128>(work[i][k]) - static_cast<__int128>(q) * work[best][k]);
            }
            if (!others) {
                Vec piv = work[best];
                if (piv[r] < 0) piv = vneg(piv);
                basis.push_back(piv);
                work.erase(work.begin() + best);
                break;
            }
        }
        std::erase_if(work, [](const Vec& v) { return is_zero_vec(v); });
    }
    return basis;
}

// Saturated basis of the kernel {v : p(v) = 0} of a primitive covector p.
inline std::vector<Vec> kernel_basis_of_covector(const Vec& p) {
    const int d = static_cast<int>(p.size());
    Vec u = transverse_functional(p);  // p(u) = 1 (symmetric role)
    std::vector<Vec> gens;
    for (int i = 0; i < d; ++i) {
        Vec e(d, 0);
        e[i] = 1;
        gens.push_back(vsub(e, vscale(u, p[i])));  // p(e_i - p_i u) = 0
    }
    return lattice_basis_of_span(std::move(gens), d);
}

// Saturated basis of {v in Z^d : row_i . v = 0 for all i}.
inline std::vector<Vec> integer_kernel(const std::vector<Vec>& rows, int d) {
    std::vector<Vec> basis;
    for (int i = 0; i < d; ++i) {
        Vec e(d, 0);
        e[i] = 1;
        basis.push_back(e);
    }
    for (const Vec& row : rows) {
        if (basis.empty()) break;
        Vec c(basis.size());
        for (std::size_t j = 0; j < basis.size(); ++j) c[j] = vdot(row, basis[j]);
        if (is_zero_vec(c)) continue;
        std::vector<Vec> knl = kernel_basis_of_covector(primitive(c));
        std::vector<Vec> next;
        for (const Vec& w : knl) {
            Vec v(d, 0);
            for (std::size_t j = 0; j < basis.size(); ++j) v = vadd(v, vscale(basis[j], w[j]));
            next.push_back(v);
        }
        basis = std::move(next);
    }
    return basis;
}

inline std::string vec_str(const Vec& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

}  // namespace bmq
