#pragma once

#include "bmq/intvec.hpp"
#include "bmq/polytope.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace bmq {

// One constant-value lattice ray: {base + t * dir : t >= 0}, dir primitive,
// value nonzero. The base is the extreme point of the ray.
struct Ray {
    Vec base;
    Vec dir;
    long long value = 0;

    bool operator==(const Ray&) const = default;
};

// Signed multiplicity function on Z^d with finite exceptional part plus
// finitely many constant-value rays. Canonical form: at most one ray per
// (oriented direction, lattice line); finite entries never lie on a ray's
// point set; rays sorted by (dir, base); zero values dropped. Structural
// equality of canonical forms coincides with pointwise equality.
struct VirtualTModule {
    int d = 0;
    std::map<Vec, long long> finite;
    std::vector<Ray> rays;

    bool operator==(const VirtualTModule&) const = default;
};

inline VirtualTModule zero_module(int d) { return VirtualTModule{d, {}, {}}; }

namespace vm_detail {

inline long long floor_div_ll(long long a, long long b) {  // b > 0
    long long q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

// Canonical key of the lattice line through `base` with primitive direction
// `dir_pos` (lex-positive): the representative point whose pivot coordinate
// is reduced modulo the direction.
struct LineKey {
    Vec dir;     // lex-positive primitive
    Vec origin;  // canonical point on the line

    auto operator<=>(const LineKey&) const = default;
};

inline std::size_t pivot_index(const Vec& dir) {
    for (std::size_t i = 0; i < dir.size(); ++i)
        if (dir[i] != 0) return i;
    throw std::invalid_argument("zero direction");
}

inline LineKey line_key(const Vec& base, const Vec& dir) {
    Vec d = lex_positive(dir);
    std::size_t i = pivot_index(d);
    long long t = floor_div_ll(base[i], d[i]);
    return LineKey{d, vsub(base, vscale(d, t))};
}

// s-parameter of a point on a line, if the point lies on it.
inline std::optional<long long> line_param(const LineKey& key, const Vec& p) {
    Vec diff = vsub(p, key.origin);
    std::size_t i = pivot_index(key.dir);
    if (diff[i] % key.dir[i] != 0) return std::nullopt;
    long long s = diff[i] / key.dir[i];
    if (diff != vscale(key.dir, s)) return std::nullopt;
    return s;
}

struct LineData {
    // (s, value, orientation): +1 rays cover [s, inf), -1 rays cover (-inf, s].
    std::vector<std::tuple<long long, long long, int>> steps;
    std::map<long long, long long> masses;
};

struct SRay {
    long long s = 0;  // base position in line coordinates
    int orient = 1;   // +1 covers [s, inf), -1 covers (-inf, s]
    long long value = 0;
};

struct LineResult {
    std::vector<SRay> rays;
    std::vector<std::pair<long long, long long>> residual;  // (s, value)
};

inline LineResult process_line(const LineData& data) {
    LineResult out;
    long long v_plus = 0, v_minus = 0;
    long long s_min = 0, s_max = 0;
    bool any = false;
    auto see = [&](long long s) {
        if (!any) {
            s_min = s_max = s;
            any = true;
        } else {
            s_min = std::min(s_min, s);
            s_max = std::max(s_max, s);
        }
    };
    for (const auto& [s, v, o] : data.steps) {
        see(s);
        (o > 0 ? v_plus : v_minus) += v;
    }
    for (const auto& [s, v] : data.masses) see(s);
    if (!any) return out;

    auto g = [&](long long s) {
        long long total = 0;
        for (const auto& [sb, v, o] : data.steps) {
            if (o > 0 && s >= sb) total += v;
            if (o < 0 && s <= sb) total += v;
        }
        auto it = data.masses.find(s);
        if (it != data.masses.end()) total += it->second;
        return total;
    };

    bool whole_line = false;
    long long s_hi = 0, s_lo = 0;
    if (v_plus != 0) {
        long long last_bad = s_min - 2;
        bool found = false;
        for (long long s = s_max; s >= s_min - 1; --s)
            if (g(s) != v_plus) {
                last_bad = s;
                found = true;
                break;
            }
        if (!found) {
            whole_line = (v_minus == v_plus);
            s_hi = s_min - 1;
        } else {
            s_hi = last_bad + 1;
        }
    }
    if (v_minus != 0 && !whole_line) {
        bool found = false;
        long long first_bad = s_max + 2;
        for (long long s = s_min; s <= s_max + 1; ++s)
            if (g(s) != v_minus) {
                first_bad = s;
                found = true;
                break;
            }
        s_lo = found ? first_bad - 1 : s_max + 1;
    }

    if (whole_line) {
        // Constant over the whole line: split canonically at the line origin.
        out.rays.push_back(SRay{0, 1, v_plus});
        out.rays.push_back(SRay{-1, -1, v_minus});
        return out;
    }
    if (v_plus != 0) out.rays.push_back(SRay{s_hi, 1, v_plus});
    if (v_minus != 0) out.rays.push_back(SRay{s_lo, -1, v_minus});

    long long lo = (v_minus != 0) ? s_lo + 1 : s_min;
    long long hi = (v_plus != 0) ? s_hi - 1 : s_max;
    for (long long s = lo; s <= hi; ++s) {
        long long val = g(s);
        if (val != 0) out.residual.emplace_back(s, val);
    }
    return out;
}

inline bool ray_contains(const Ray& r, const Vec& p) {
    Vec diff = vsub(p, r.base);
    std::size_t i = pivot_index(r.dir);
    if (diff[i] % r.dir[i] != 0) return false;
    long long t = diff[i] / r.dir[i];
    if (t < 0) return false;
    return diff == vscale(r.dir, t);
}

}  // namespace vm_detail

// Canonicalization: groups ray mass per lattice line, folds finite entries
// that sit on those lines into the per-line step functions, extracts the
// eventual tail value per orientation as the ray, and leaves the bounded
// middle as finite residue. Finite mass landing on a ray of a different line
// (possible only at a crossing point) pushes that ray's base outward; the
// fold loop terminates because bases only ever move outward and there are
// finitely many crossing points.
inline VirtualTModule canonicalize(int d, const std::map<Vec, long long>& finite_raw, std::vector<Ray> rays_raw) {
    if (d < 1) throw std::invalid_argument("module dimension must be positive");
    std::map<Vec, long long> fin;
    for (const auto& [k, v] : finite_raw) {
        if (static_cast<int>(k.size()) != d) throw std::invalid_argument("finite entry has wrong dimension");
        if (v != 0) fin[k] += v;
    }
    for (auto it = fin.begin(); it != fin.end();)
        it = (it->second == 0) ? fin.erase(it) : std::next(it);
    std::vector<Ray> work;
    for (auto& r : rays_raw) {
        if (r.value == 0) continue;
        if (static_cast<int>(r.base.size()) != d || static_cast<int>(r.dir.size()) != d)
            throw std::invalid_argument("ray has wrong dimension");
        if (!is_primitive(r.dir)) throw std::invalid_argument("ray direction must be primitive");
        work.push_back(std::move(r));
    }

    for (int guard = 0;; ++guard) {
        if (guard > 1000) throw std::logic_error("canonicalization did not stabilize");
        if (work.empty()) return VirtualTModule{d, std::move(fin), {}};

        std::map<vm_detail::LineKey, vm_detail::LineData> lines;
        for (const auto& r : work) {
            vm_detail::LineKey key = vm_detail::line_key(r.base, r.dir);
            long long s = *vm_detail::line_param(key, r.base);
            int orient = (lex_positive(r.dir) == r.dir) ? 1 : -1;
            lines[key].steps.emplace_back(s, r.value, orient);
        }

        // Fold finite mass sitting on any of these lines, preferring a line
        // whose current ray point set covers it.
        for (auto it = fin.begin(); it != fin.end();) {
            const Vec& pos = it->first;
            vm_detail::LineKey chosen{};
            std::optional<long long> chosen_s;
            bool on_ray = false;
            for (const auto& [key, data] : lines) {
                auto s = vm_detail::line_param(key, pos);
                if (!s) continue;
                bool covered = false;
                for (const auto& r : work)
                    if (vm_detail::line_key(r.base, r.dir) == key && vm_detail::ray_contains(r, pos)) {
                        covered = true;
                        break;
                    }
                if (!chosen_s || (covered && !on_ray)) {
                    chosen = key;
                    chosen_s = s;
                    on_ray = covered;
                }
                if (on_ray) break;
            }
            if (chosen_s) {
                lines[chosen].masses[*chosen_s] += it->second;
                it = fin.erase(it);
            } else {
                ++it;
            }
        }

        std::vector<Ray> out_rays;
        std::map<Vec, long long> residue;
        for (const auto& [key, data] : lines) {
            vm_detail::LineResult res = vm_detail::process_line(data);
            for (const auto& r : res.rays) {
                Vec dir = (r.orient > 0) ? key.dir : vneg(key.dir);
                out_rays.push_back(Ray{vadd(key.origin, vscale(key.dir, r.s)), dir, r.value});
            }
            for (const auto& [s, val] : res.residual) residue[vadd(key.origin, vscale(key.dir, s))] += val;
        }
        for (const auto& [pos, val] : residue)
            if (val != 0) fin[pos] += val;
        for (auto it = fin.begin(); it != fin.end();)
            it = (it->second == 0) ? fin.erase(it) : std::next(it);

        bool conflict = false;
        for (const auto& [pos, val] : fin) {
            for (const auto& r : out_rays)
                if (vm_detail::ray_contains(r, pos)) {
                    conflict = true;
                    break;
                }
            if (conflict) break;
        }
        if (!conflict) {
            std::sort(out_rays.begin(), out_rays.end(), [](const Ray& a, const Ray& b) {
                return std::tie(a.dir, a.base) < std::tie(b.dir, b.base);
            });
            return VirtualTModule{d, std::move(fin), std::move(out_rays)};
        }
        work = std::move(out_rays);
    }
}

inline VirtualTModule canonicalize(const VirtualTModule& v) { return canonicalize(v.d, v.finite, v.rays); }

inline long long multiplicity(const VirtualTModule& v, const Vec& alpha) {
    if (static_cast<int>(alpha.size()) != v.d) throw std::invalid_argument("weight has wrong dimension");
    long long total = 0;
    auto it = v.finite.find(alpha);
    if (it != v.finite.end()) total += it->second;
    for (const auto& r : v.rays)
        if (vm_detail::ray_contains(r, alpha)) total += r.value;
    return total;
}

inline VirtualTModule add(const VirtualTModule& a, const VirtualTModule& b) {
    if (a.d != b.d) throw std::invalid_argument("dimension mismatch in module sum");
    std::map<Vec, long long> fin = a.finite;
    for (const auto& [k, v] : b.finite) fin[k] += v;
    std::vector<Ray> rays = a.rays;
    rays.insert(rays.end(), b.rays.begin(), b.rays.end());
    return canonicalize(a.d, fin, std::move(rays));
}

inline VirtualTModule negate(const VirtualTModule& a) {
    std::map<Vec, long long> fin;
    for (const auto& [k, v] : a.finite) fin[k] = -v;
    std::vector<Ray> rays = a.rays;
    for (auto& r : rays) r.value = -r.value;
    return canonicalize(a.d, fin, std::move(rays));
}

struct DimResult {
    bool finite = true;
    long long total = 0;              // signed dimension when finite
    std::vector<Vec> ray_directions;  // surviving directions otherwise
};

inline DimResult dim(const VirtualTModule& v) {
    DimResult r;
    if (v.rays.empty()) {
        for (const auto& [k, val] : v.finite) r.total += val;
        return r;
    }
    r.finite = false;
    for (const auto& ray : v.rays)
        if (std::find(r.ray_directions.begin(), r.ray_directions.end(), ray.dir) == r.ray_directions.end())
            r.ray_directions.push_back(ray.dir);
    return r;
}

// Pushforward of weights along an integer projection (rows of pi). Every ray
// direction must have nonzero, primitive image; fibers are then finite and
// the result stays in the finite-plus-rays class.
inline VirtualTModule restrict_module(const VirtualTModule& v, const std::vector<Vec>& pi) {
    if (pi.empty()) throw std::invalid_argument("empty projection");
    const int dp = static_cast<int>(pi.size());
    for (const auto& row : pi)
        if (static_cast<int>(row.size()) != v.d) throw std::invalid_argument("projection row has wrong dimension");
    {
        std::vector<std::vector<Rat>> m;
        for (const auto& row : pi) m.emplace_back(row.begin(), row.end());
        if (linalg::rank_rat(std::move(m)) != dp)
            throw std::invalid_argument("projection matrix does not have full row rank");
    }
    auto apply = [&](const Vec& x) {
        Vec y(dp);
        for (int i = 0; i < dp; ++i) y[i] = vdot(pi[i], x);
        return y;
    };
    std::map<Vec, long long> fin;
    std::vector<Ray> rays;
    for (const auto& r : v.rays) {
        Vec img = apply(r.dir);
        if (is_zero_vec(img))
            throw std::domain_error("non-proper restriction: a ray direction maps to zero");
        if (!is_primitive(img))
            throw std::domain_error(
                "restriction maps a ray direction to a non-primitive image; not representable with unit-step rays");
        rays.push_back(Ray{apply(r.base), img, r.value});
    }
    for (const auto& [k, val] : v.finite) fin[apply(k)] += val;
    return canonicalize(dp, fin, std::move(rays));
}

// (v (x) n)^T  for finite n: sum over alpha of mult_v(alpha) * mult_n(-alpha).
inline long long pair_with_finite(const VirtualTModule& v, const VirtualTModule& n) {
    if (v.d != n.d) throw std::invalid_argument("dimension mismatch in pairing");
    if (!n.rays.empty()) throw std::invalid_argument("pairing requires a finite module");
    long long total = 0;
    for (const auto& [beta, w] : n.finite) total += multiplicity(v, vneg(beta)) * w;
    return total;
}

// Stable behavior of multiplicities along rays of weights: a distinguished
// primitive direction xi, the two stable tail values, and a certified
// threshold past which on-axis multiplicities equal c_{+/-} and every other
// primitive direction misses the support.
struct AsymptoticProfile {
    std::optional<Vec> xi;
    long long c_plus = 0;
    long long c_minus = 0;
    long long lambda0 = 1;
    bool off_axis_clean = true;
    bool multi_direction = false;
};

inline AsymptoticProfile asymptotic_profile(const VirtualTModule& v) {
    AsymptoticProfile p;
    long long bound = 0;
    for (const auto& [k, val] : v.finite)
        for (long long x : k) bound = std::max(bound, x < 0 ? -x : x);
    if (v.rays.empty()) {
        p.lambda0 = std::max(1LL, bound);
        return p;
    }
    std::set<Vec> classes;
    for (const auto& r : v.rays) classes.insert(lex_positive(r.dir));
    Vec u = *classes.begin();
    p.xi = u;
    p.multi_direction = classes.size() > 1;
    p.off_axis_clean = !p.multi_direction;

    Vec g = transverse_functional(u);
    std::vector<Vec> kernel = kernel_basis_of_covector(g);
    auto transverse_coords = [&](const Vec& tau) {
        // tau lies in ker(g); solve for its integer coordinates in the basis.
        std::vector<std::vector<Rat>> a(tau.size(), std::vector<Rat>(kernel.size()));
        std::vector<Rat> b(tau.size());
        for (std::size_t r = 0; r < tau.size(); ++r) {
            for (std::size_t c = 0; c < kernel.size(); ++c) a[r][c] = kernel[c][r];
            b[r] = tau[r];
        }
        auto sol = linalg::solve_unique(std::move(a), std::move(b));
        if (!sol) throw std::logic_error("transverse part not in the kernel lattice");
        Vec coords(kernel.size(), 0);
        for (std::size_t i = 0; i < sol->size(); ++i) {
            if (rat_den((*sol)[i]) != 1) throw std::logic_error("kernel coordinates not integral");
            coords[i] = to_int64(rat_num((*sol)[i]));
        }
        return coords;
    };

    for (const auto& r : v.rays) {
        Vec dpos = lex_positive(r.dir);
        if (dpos != u) continue;  // other directions: reported via multi_direction
        long long b0 = vdot(g, r.base);
        Vec tau = vsub(r.base, vscale(u, b0));
        if (is_zero_vec(tau)) {
            if (r.dir == u) p.c_plus += r.value;
            else p.c_minus += r.value;
            bound = std::max(bound, b0 < 0 ? -b0 : b0);
        } else {
            for (long long c : transverse_coords(tau)) bound = std::max(bound, c < 0 ? -c : c);
        }
    }
    p.lambda0 = std::max(1LL, bound);
    return p;
}

}  // namespace bmq
