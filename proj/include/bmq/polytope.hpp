#pragma once

#include "bmq/intvec.hpp"
#include "bmq/rational.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace bmq {

// One rational halfspace {y : normal . y >= bound}, strict when !closed.
// The strict flags exist so adjacent regions can be made lattice-disjoint at
// shared walls; geometric checks (vertices, Delzant) use the closure.
struct Halfspace {
    Vec normal;
    Rat bound;
    bool closed = true;

    bool operator==(const Halfspace&) const = default;
};

struct HPolytope {
    int dim = 0;
    std::vector<Halfspace> halfspaces;

    bool operator==(const HPolytope&) const = default;
};

inline HPolytope intersect(const HPolytope& a, const HPolytope& b) {
    if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch in intersection");
    HPolytope r = a;
    r.halfspaces.insert(r.halfspaces.end(), b.halfspaces.begin(), b.halfspaces.end());
    return r;
}

inline HPolytope translate(const HPolytope& p, const Vec& w) {
    HPolytope r = p;
    for (auto& h : r.halfspaces) h.bound += vdot(h.normal, w);
    return r;
}

inline bool contains(const HPolytope& p, const Vec& y) {
    for (const auto& h : p.halfspaces) {
        Rat v = Rat(vdot(h.normal, y));
        if (h.closed ? v < h.bound : v <= h.bound) return false;
    }
    return true;
}

inline bool contains_closed(const HPolytope& p, const std::vector<Rat>& y) {
    for (const auto& h : p.halfspaces)
        if (vdot_rat(h.normal, y) < h.bound) return false;
    return true;
}

namespace fm {

// Row coef . y >= rhs, strict when !closed. Fourier-Motzkin elimination keeps
// full width and zeroes the eliminated column.
struct Constraint {
    std::vector<Rat> coef;
    Rat rhs;
    bool closed = true;
};

inline std::vector<Constraint> to_constraints(const HPolytope& p) {
    std::vector<Constraint> cons;
    cons.reserve(p.halfspaces.size());
    for (const auto& h : p.halfspaces) {
        Constraint c;
        c.coef.assign(h.normal.begin(), h.normal.end());
        c.rhs = h.bound;
        c.closed = h.closed;
        cons.push_back(std::move(c));
    }
    return cons;
}

// Constant rows (all-zero coefficients) decide feasibility directly.
inline bool constant_row_ok(const Constraint& c) {
    return c.closed ? c.rhs <= 0 : c.rhs < 0;
}

inline std::vector<Constraint> eliminate(const std::vector<Constraint>& cons, std::size_t var) {
    std::vector<Constraint> lower, upper, rest;
    for (const auto& c : cons) {
        if (c.coef[var] > 0) lower.push_back(c);
        else if (c.coef[var] < 0) upper.push_back(c);
        else rest.push_back(c);
    }
    for (const auto& lo : lower) {
        for (const auto& up : upper) {
            Constraint c;
            c.coef.resize(lo.coef.size());
            Rat a = -up.coef[var];  // > 0
            Rat b = lo.coef[var];   // > 0
            for (std::size_t i = 0; i < c.coef.size(); ++i) c.coef[i] = a * lo.coef[i] + b * up.coef[i];
            c.coef[var] = 0;
            c.rhs = a * lo.rhs + b * up.rhs;
            c.closed = lo.closed && up.closed;
            rest.push_back(std::move(c));
        }
    }
    return rest;
}

inline bool feasible(std::vector<Constraint> cons, std::size_t dim) {
    for (std::size_t v = 0; v < dim; ++v) {
        cons = eliminate(cons, v);
        std::vector<Constraint> keep;
        for (auto& c : cons) {
            bool constant = true;
            for (const auto& x : c.coef)
                if (x != 0) { constant = false; break; }
            if (constant) {
                if (!constant_row_ok(c)) return false;
            } else {
                keep.push_back(std::move(c));
            }
        }
        cons = std::move(keep);
    }
    return true;
}

struct VarBounds {
    bool feasible = true;
    std::optional<Rat> lo, hi;
    bool lo_closed = true, hi_closed = true;
};

// Exact projection interval of one variable (eliminate all the others).
inline VarBounds bounds_on(std::vector<Constraint> cons, std::size_t var, std::size_t dim) {
    for (std::size_t v = 0; v < dim; ++v)
        if (v != var) cons = eliminate(cons, v);
    VarBounds b;
    for (const auto& c : cons) {
        Rat a = c.coef[var];
        if (a == 0) {
            if (!constant_row_ok(c)) {
                b.feasible = false;
                return b;
            }
            continue;
        }
        Rat v = c.rhs / a;
        if (a > 0) {
            if (!b.lo || v > *b.lo) {
                b.lo = v;
                b.lo_closed = c.closed;
            } else if (v == *b.lo) {
                b.lo_closed = b.lo_closed && c.closed;
            }
        } else {
            if (!b.hi || v < *b.hi) {
                b.hi = v;
                b.hi_closed = c.closed;
            } else if (v == *b.hi) {
                b.hi_closed = b.hi_closed && c.closed;
            }
        }
    }
    if (b.lo && b.hi) {
        if (*b.lo > *b.hi) b.feasible = false;
        if (*b.lo == *b.hi && !(b.lo_closed && b.hi_closed)) b.feasible = false;
    }
    return b;
}

inline void substitute(std::vector<Constraint>& cons, std::size_t var, long long value) {
    for (auto& c : cons) {
        if (c.coef[var] == 0) continue;
        c.rhs -= c.coef[var] * value;
        c.coef[var] = 0;
    }
}

}  // namespace fm

// Exact rational feasibility via Fourier-Motzkin elimination, honoring
// strict constraints.
inline bool polytope_nonempty(const HPolytope& p) {
    return fm::feasible(fm::to_constraints(p), static_cast<std::size_t>(p.dim));
}

// Recession cone {v : normal . v >= 0} is trivial iff every coordinate
// projection of the cone is pinned to {0}; the homogeneous FM projections
// are computed exactly.
inline bool recession_cone_trivial(const HPolytope& p) {
    std::vector<fm::Constraint> cone = fm::to_constraints(p);
    for (auto& c : cone) {
        c.rhs = 0;
        c.closed = true;
    }
    const std::size_t d = static_cast<std::size_t>(p.dim);
    for (std::size_t axis = 0; axis < d; ++axis) {
        std::vector<fm::Constraint> cons = cone;
        for (std::size_t v = 0; v < d; ++v)
            if (v != axis) cons = fm::eliminate(cons, v);
        bool has_pos = false, has_neg = false;
        for (const auto& c : cons) {
            if (c.coef[axis] > 0) has_pos = true;
            if (c.coef[axis] < 0) has_neg = true;
        }
        if (!(has_pos && has_neg)) return false;
    }
    return true;
}

namespace detail {

inline long long int_lower(const Rat& v, bool closed) {
    return to_int64(closed ? rat_ceil(v) : rat_floor(v) + 1);
}

inline long long int_upper(const Rat& v, bool closed) {
    return to_int64(closed ? rat_floor(v) : rat_ceil(v) - 1);
}

inline void enumerate_rec(std::vector<fm::Constraint> cons, std::size_t var, std::size_t dim, Vec& point,
                          std::set<Vec>& out) {
    if (var == dim) {
        for (const auto& c : cons)
            if (!fm::constant_row_ok(c)) return;
        out.insert(point);
        return;
    }
    fm::VarBounds b = fm::bounds_on(cons, var, dim);
    if (!b.feasible) return;
    if (!b.lo || !b.hi) throw std::domain_error("unbounded polytope: cannot enumerate lattice points");
    long long lo = int_lower(*b.lo, b.lo_closed);
    long long hi = int_upper(*b.hi, b.hi_closed);
    for (long long t = lo; t <= hi; ++t) {
        std::vector<fm::Constraint> sub = cons;
        fm::substitute(sub, var, t);
        point[var] = t;
        enumerate_rec(std::move(sub), var + 1, dim, point, out);
    }
    point[var] = 0;
}

}  // namespace detail

// Exactly the integer points satisfying all (strict or non-strict)
// constraints. Unbounded input is an error.
inline std::set<Vec> enumerate_lattice_points(const HPolytope& p) {
    std::set<Vec> out;
    if (!polytope_nonempty(p)) return out;
    if (!recession_cone_trivial(p)) throw std::domain_error("unbounded polytope: cannot enumerate lattice points");
    Vec point(p.dim, 0);
    detail::enumerate_rec(fm::to_constraints(p), 0, static_cast<std::size_t>(p.dim), point, out);
    return out;
}

namespace linalg {

inline int rank_rat(std::vector<std::vector<Rat>> m) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    int rank = 0;
    std::size_t pr = 0;
    for (std::size_t c = 0; c < cols && pr < rows; ++c) {
        std::size_t piv = pr;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[pr], m[piv]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == pr || m[r][c] == 0) continue;
            Rat f = m[r][c] / m[pr][c];
            for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[pr][k];
        }
        ++pr;
        ++rank;
    }
    return rank;
}

inline Rat det_rat(std::vector<std::vector<Rat>> m) {
    std::size_t n = m.size();
    Rat det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rat f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

// Unique solution of A y = b if it exists (rank = #cols and consistent).
inline std::optional<std::vector<Rat>> solve_unique(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    if (a.empty()) return std::nullopt;
    std::size_t rows = a.size(), cols = a[0].size();
    std::vector<std::size_t> pivot_col;
    std::size_t pr = 0;
    for (std::size_t c = 0; c < cols && pr < rows; ++c) {
        std::size_t piv = pr;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[pr], a[piv]);
        std::swap(b[pr], b[piv]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == pr || a[r][c] == 0) continue;
            Rat f = a[r][c] / a[pr][c];
            for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[pr][k];
            b[r] -= f * b[pr];
        }
        pivot_col.push_back(c);
        ++pr;
    }
    if (pivot_col.size() != cols) return std::nullopt;  // underdetermined
    for (std::size_t r = pr; r < rows; ++r)
        if (b[r] != 0) return std::nullopt;  // inconsistent
    std::vector<Rat> y(cols);
    for (std::size_t i = 0; i < cols; ++i) y[pivot_col[i]] = b[i] / a[i][pivot_col[i]];
    return y;
}

}  // namespace linalg

namespace detail {

// Indices of halfspaces whose hyperplane contains the whole (nonempty)
// polytope.
inline std::vector<std::size_t> implicit_equalities(const HPolytope& p) {
    std::vector<std::size_t> eq;
    for (std::size_t i = 0; i < p.halfspaces.size(); ++i) {
        HPolytope q = p;
        for (auto& h : q.halfspaces) h.closed = true;
        q.halfspaces[i].closed = false;
        if (!polytope_nonempty(q)) eq.push_back(i);
    }
    return eq;
}

}  // namespace detail

// Vertices of the closure, as exact rational points. Intended for compact
// polytopes; lower-dimensional ones are handled through their affine span.
inline std::vector<std::vector<Rat>> vertices(const HPolytope& p) {
    std::vector<std::vector<Rat>> verts;
    HPolytope closed = p;
    for (auto& h : closed.halfspaces) h.closed = true;
    if (!polytope_nonempty(closed)) return verts;

    std::vector<std::size_t> eq = detail::implicit_equalities(closed);
    std::vector<Vec> eq_rows;
    for (std::size_t i : eq) eq_rows.push_back(closed.halfspaces[i].normal);
    std::vector<Vec> span = integer_kernel(eq_rows, closed.dim);
    const std::size_t k = span.size();

    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < closed.halfspaces.size(); ++i)
        if (std::find(eq.begin(), eq.end(), i) == eq.end()) rest.push_back(i);

    auto try_system = [&](const std::vector<std::size_t>& active) {
        std::vector<std::vector<Rat>> a;
        std::vector<Rat> b;
        for (std::size_t i : eq) {
            a.emplace_back(closed.halfspaces[i].normal.begin(), closed.halfspaces[i].normal.end());
            b.push_back(closed.halfspaces[i].bound);
        }
        for (std::size_t i : active) {
            a.emplace_back(closed.halfspaces[i].normal.begin(), closed.halfspaces[i].normal.end());
            b.push_back(closed.halfspaces[i].bound);
        }
        auto y = linalg::solve_unique(std::move(a), std::move(b));
        if (!y || !contains_closed(closed, *y)) return;
        if (std::find(verts.begin(), verts.end(), *y) == verts.end()) verts.push_back(*y);
    };

    if (k == 0) {
        try_system({});
        return verts;
    }
    std::vector<std::size_t> choice;
    auto rec = [&](auto&& self, std::size_t start, std::size_t need) -> void {
        if (need == 0) {
            try_system(choice);
            return;
        }
        if (start + need > rest.size()) return;
        for (std::size_t i = start; i + need <= rest.size(); ++i) {
            choice.push_back(rest[i]);
            self(self, i + 1, need - 1);
            choice.pop_back();
        }
    };
    rec(rec, 0, k);
    return verts;
}

// Delzant condition: at every vertex the primitive inward facet normals,
// restricted to the lattice of the affine span, form a basis of that
// lattice (so each vertex is simple and unimodular). Input must be compact
// and nonempty.
inline bool delzant_check(const HPolytope& p) {
    HPolytope closed = p;
    for (auto& h : closed.halfspaces) h.closed = true;
    if (!polytope_nonempty(closed)) throw std::domain_error("empty polytope");
    if (!recession_cone_trivial(closed)) throw std::domain_error("not compact");

    std::vector<std::size_t> eq = detail::implicit_equalities(closed);
    std::vector<Vec> eq_rows;
    for (std::size_t i : eq) eq_rows.push_back(closed.halfspaces[i].normal);
    std::vector<Vec> span = integer_kernel(eq_rows, closed.dim);
    const std::size_t k = span.size();
    if (k == 0) return true;  // single point, vacuous

    std::vector<std::vector<Rat>> verts = vertices(closed);
    if (verts.empty()) return false;

    // Deduplicate halfspaces up to positive scaling; drop the equalities.
    struct Facet {
        Vec normal;
        Rat bound;
        Vec restricted;  // primitive functional on the span lattice
    };
    std::vector<Facet> facets;
    for (std::size_t i = 0; i < closed.halfspaces.size(); ++i) {
        if (std::find(eq.begin(), eq.end(), i) != eq.end()) continue;
        const auto& h = closed.halfspaces[i];
        long long c = content(h.normal);
        if (c == 0) continue;
        Facet f;
        f.normal = primitive(h.normal);
        f.bound = h.bound / c;
        bool dup = false;
        for (const auto& g : facets)
            if (g.normal == f.normal && g.bound == f.bound) { dup = true; break; }
        if (dup) continue;
        Vec restricted(k);
        for (std::size_t j = 0; j < k; ++j) restricted[j] = vdot(f.normal, span[j]);
        if (is_zero_vec(restricted)) continue;  // constant on the span, no facet
        f.restricted = primitive(restricted);

        // Keep only genuine facets: tight vertex set of affine dimension k-1.
        std::vector<std::vector<Rat>> tight;
        for (const auto& v : verts)
            if (vdot_rat(f.normal, v) == f.bound) tight.push_back(v);
        if (tight.empty()) continue;
        std::vector<std::vector<Rat>> diffs;
        for (std::size_t t = 1; t < tight.size(); ++t) {
            std::vector<Rat> dvec(tight[t].size());
            for (std::size_t j = 0; j < dvec.size(); ++j) dvec[j] = tight[t][j] - tight[0][j];
            diffs.push_back(std::move(dvec));
        }
        if (static_cast<std::size_t>(diffs.empty() ? 0 : linalg::rank_rat(diffs)) != k - 1) continue;
        facets.push_back(std::move(f));
    }

    for (const auto& v : verts) {
        std::vector<Vec> active;
        for (const auto& f : facets)
            if (vdot_rat(f.normal, v) == f.bound) active.push_back(f.restricted);
        if (active.size() != k) return false;
        std::vector<std::vector<Rat>> m(k, std::vector<Rat>(k));
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c) m[r][c] = active[r][c];
        Rat det = linalg::det_rat(std::move(m));
        if (det != 1 && det != -1) return false;
    }
    return true;
}

// Membership after an infinitesimal shift in direction (1, eps, eps^2, ...):
// ties on facet hyperplanes are broken by the sign of the first nonzero
// normal entry. Agrees with plain membership away from facet hyperplanes and
// decides boundary cases reproducibly; strictness becomes irrelevant because
// the shifted point is generic.
inline bool generic_shift(const Vec& level, const HPolytope& p) {
    if (static_cast<int>(level.size()) != p.dim) throw std::invalid_argument("dimension mismatch");
    for (const auto& h : p.halfspaces) {
        Rat slack = Rat(vdot(h.normal, level)) - h.bound;
        if (slack > 0) continue;
        if (slack < 0) return false;
        long long lead = 0;
        for (long long c : h.normal)
            if (c != 0) { lead = c; break; }
        if (lead < 0) return false;
    }
    return true;
}

// True when the decision of generic_shift flips under the reversed
// perturbation direction, i.e. the level genuinely sits on a wall and the
// answer is convention-dependent.
inline bool generic_shift_boundary_sensitive(const Vec& level, const HPolytope& p) {
    if (static_cast<int>(level.size()) != p.dim) throw std::invalid_argument("dimension mismatch");
    auto decide = [&](int direction) {
        for (const auto& h : p.halfspaces) {
            Rat slack = Rat(vdot(h.normal, level)) - h.bound;
            if (slack > 0) continue;
            if (slack < 0) return false;
            long long lead = 0;
            for (long long c : h.normal)
                if (c != 0) { lead = c; break; }
            if (direction * lead < 0) return false;
        }
        return true;
    };
    return decide(+1) != decide(-1);
}

}  // namespace bmq
