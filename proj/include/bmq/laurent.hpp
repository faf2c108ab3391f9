#pragma once

#include "bmq/rational.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmq {

// Scalar functions of the collar coordinate of the form
//     c * log|x| + sum_k a_k x^k
// with finitely many rational coefficients (k may be negative). These house
// the moment profiles transverse to a singular hypersurface.
struct LaurentLogFn {
    Rat log_coeff = 0;
    std::map<long long, Rat> coeffs;  // exponent -> coefficient, zeros dropped

    void add_coeff(long long k, const Rat& v) {
        if (v == 0) return;
        auto it = coeffs.find(k);
        if (it == coeffs.end()) {
            coeffs.emplace(k, v);
        } else {
            it->second += v;
            if (it->second == 0) coeffs.erase(it);
        }
    }

    Rat coeff(long long k) const {
        auto it = coeffs.find(k);
        return it == coeffs.end() ? Rat(0) : it->second;
    }

    bool operator==(const LaurentLogFn&) const = default;
};

// Collar one-form density: the scalar profile sum_{j=1..m} c_j x^{-j} paired
// with the circle direction of the hypersurface, c_m != 0. The modular ratio
// list of a Z component is used verbatim as c (normalization: the ratios give
// the derivative density of the scalar moment profile, circle period 1).
struct CollarFormData {
    int m = 1;
    std::vector<Rat> c;  // c[j-1] = c_j, exactly m entries, c_m != 0

    CollarFormData() = default;
    CollarFormData(int m_, std::vector<Rat> c_) : m(m_), c(std::move(c_)) {
        if (m < 1) throw std::invalid_argument("collar form needs m >= 1");
        if (static_cast<int>(c.size()) != m) throw std::invalid_argument("collar form needs exactly m coefficients");
        if (c.back() == 0) throw std::invalid_argument("leading collar coefficient c_m must be nonzero");
    }
};

// The density sum c_j x^{-j} as a Laurent function (zero log part).
inline LaurentLogFn collar_density(const CollarFormData& cf) {
    LaurentLogFn f;
    for (int j = 1; j <= cf.m; ++j) f.add_coeff(-j, cf.c[j - 1]);
    return f;
}

// Exact termwise derivative; the result is the density of df (zero log part):
// d(c log|x|) = c x^{-1} dx, d(a x^k) = a k x^{k-1} dx.
inline LaurentLogFn derivative(const LaurentLogFn& f) {
    LaurentLogFn g;
    g.add_coeff(-1, f.log_coeff);
    for (const auto& [k, a] : f.coeffs) {
        if (k == 0) continue;
        g.add_coeff(k - 1, a * k);
    }
    return g;
}

// The exact antiderivative mu with mu' = sum c_j x^{-j}: the x^{-1} term
// integrates to the log part, every other x^{-j} to -c_j/(j-1) x^{-(j-1)}.
inline LaurentLogFn moment_from_form(const CollarFormData& cf) {
    LaurentLogFn mu;
    mu.log_coeff = cf.c[0];
    for (int j = 2; j <= cf.m; ++j) mu.add_coeff(-(j - 1), -cf.c[j - 1] / (j - 1));
    return mu;
}

// Sign of lim_{x->0, sign(x)=side} of the moment profile: the x^{-(m-1)}
// term with coefficient -c_m/(m-1) dominates for m >= 2; for m = 1 the log
// term sends both sides to -sign(c_1) * infinity.
inline int escape_direction(const CollarFormData& cf, int side) {
    if (side != 1 && side != -1) throw std::invalid_argument("side must be +1 or -1");
    int lead = rat_sign(cf.c[cf.m - 1]);
    if (cf.m == 1) return -lead;
    return ((cf.m - 1) % 2 == 1) ? -lead * side : -lead;
}

// x* > 0 such that |c_m| |x|^{-m} > sum_{j<m} |c_j| |x|^{-j} for 0 < |x| < x*,
// so the moment profile is strictly monotone on each side there. Conservative
// closed form, capped at 1.
inline Rat monotonicity_threshold(const CollarFormData& cf) {
    Rat s = 1;
    for (int j = 1; j < cf.m; ++j) s += rat_abs(cf.c[j - 1]);
    Rat t = rat_abs(cf.c[cf.m - 1]) / s;
    return t < 1 ? t : Rat(1);
}

// Value of a + b*ln(arg) with arg a positive rational. Exact carrier for
// moment-profile values at rational collar coordinates.
struct LogValue {
    Rat rational_part = 0;
    Rat log_coeff = 0;
    Rat log_arg = 1;  // > 0
};

inline LogValue evaluate(const LaurentLogFn& f, const Rat& x) {
    if (x == 0) throw std::domain_error("Laurent-log function evaluated at 0");
    LogValue v;
    for (const auto& [k, a] : f.coeffs) v.rational_part += a * rat_pow(x, k);
    v.log_coeff = f.log_coeff;
    v.log_arg = rat_abs(x);
    return v;
}

namespace detail {

// Certified rational bounds on ln(y) for y in [1,2), via the atanh series
// ln y = 2 sum z^{2i+1}/(2i+1), z = (y-1)/(y+1) in [0,1/3]; the remainder
// after n terms is below 2 z^{2n+3} / ((2n+3)(1-z^2)).
inline std::pair<Rat, Rat> ln_bounds_small(const Rat& y, const Rat& eps) {
    if (y == 1) return {0, 0};
    Rat z = (y - 1) / (y + 1);
    Rat z2 = z * z;
    Rat term = z;  // z^(2i+1)
    Rat sum = 0;
    long long i = 0;
    for (;;) {
        sum += term / (2 * i + 1);
        term *= z2;
        ++i;
        Rat rem = 2 * term / ((2 * i + 1) * (1 - z2));
        if (rem < eps) return {2 * sum, 2 * sum + rem};
    }
}

inline std::pair<Rat, Rat> ln_bounds(const Rat& r, const Rat& eps) {
    if (r <= 0) throw std::domain_error("ln of non-positive rational");
    if (r == 1) return {0, 0};
    if (r < 1) {
        auto [lo, hi] = ln_bounds(Rat(1) / r, eps);
        return {-hi, -lo};
    }
    long long k = 0;
    Rat y = r;
    while (y >= 2) {
        y /= 2;
        ++k;
    }
    auto [ylo, yhi] = ln_bounds_small(y, eps / 2);
    if (k == 0) return {ylo, yhi};
    Rat sub = eps / (2 * k);
    auto [l2lo, l2hi] = ln_bounds_small(Rat(2), sub);
    return {ylo + k * l2lo, yhi + k * l2hi};
}

}  // namespace detail

// floor(a + b ln r), exact. For b != 0 and r != 1 the value is irrational
// (ln of a rational other than 1 is transcendental), so interval refinement
// always pins the floor.
inline BigInt floor_log_value(const LogValue& v) {
    if (v.log_coeff == 0 || v.log_arg == 1) return rat_floor(v.rational_part);
    Rat eps(1, 4);
    for (;;) {
        auto [llo, lhi] = detail::ln_bounds(v.log_arg, eps);
        Rat vlo = v.rational_part + (v.log_coeff > 0 ? v.log_coeff * llo : v.log_coeff * lhi);
        Rat vhi = v.rational_part + (v.log_coeff > 0 ? v.log_coeff * lhi : v.log_coeff * llo);
        BigInt flo = rat_floor(vlo), fhi = rat_floor(vhi);
        if (flo == fhi) return flo;
        eps /= 16;
    }
}

inline BigInt ceil_log_value(const LogValue& v) {
    LogValue neg{-v.rational_part, -v.log_coeff, v.log_arg};
    return -floor_log_value(neg);
}

// First certified slab offset of a collar end: the moment profile value at
// x = side * x_star, rounded to the next lattice level in the escape
// direction (inclusive when the value is already integral).
inline long long first_slab_offset(const CollarFormData& cf, int side, const Rat& x_star) {
    if (x_star <= 0) throw std::invalid_argument("threshold must be positive");
    LogValue s = evaluate(moment_from_form(cf), Rat(side) * x_star);
    int eps = escape_direction(cf, side);
    BigInt k0 = (eps == 1) ? ceil_log_value(s) : floor_log_value(s);
    return to_int64(k0);
}

}  // namespace bmq
