#pragma once

// Seeded random valid specifications at desk scale (d <= 2, coordinates
// within +-8), shared by the acceptance suite. Deterministic: mt19937_64 is
// reproducible across platforms, and every accepted spec re-validates.

#include "bmq/model.hpp"
#include "bmq/quantize.hpp"

#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace bmq::testgen {

struct GenOptions {
    std::vector<int> allowed_m{1, 2, 3, 4, 5};
    int max_pieces = 3;
    bool want_z = false;  // force at least one Z component
};

namespace detail {

inline HPolytope interval(long long lo, long long hi) {
    return HPolytope{1, {Halfspace{{1}, lo, true}, Halfspace{{-1}, -hi, true}}};
}

inline HPolytope box2(long long x0, long long x1, long long y0, long long y1) {
    return HPolytope{2, {Halfspace{{1, 0}, x0, true}, Halfspace{{-1, 0}, -x1, true},
                         Halfspace{{0, 1}, y0, true}, Halfspace{{0, -1}, -y1, true}}};
}

// Leaf segment of lattice length `len` inside the lattice hyperplane
// {g . y = level} transverse to a_hat.
inline HPolytope segment_leaf(const Vec& a_hat, const Vec& g, long long level, long long off, long long len) {
    Vec v = kernel_basis_of_covector(g)[0];
    Vec w = transverse_functional(v);
    Vec a = vadd(vscale(a_hat, level), vscale(v, off));
    Vec b = vadd(a, vscale(v, len));
    HPolytope p{2, {}};
    p.halfspaces.push_back(Halfspace{g, Rat(level), true});
    p.halfspaces.push_back(Halfspace{vneg(g), Rat(-level), true});
    p.halfspaces.push_back(Halfspace{w, Rat(vdot(w, a)), true});
    p.halfspaces.push_back(Halfspace{vneg(w), Rat(-vdot(w, b)), true});
    return p;
}

}  // namespace detail

inline ManifoldSpec random_spec(std::uint64_t seed, const GenOptions& opt) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
    auto pick = [&](long long lo, long long hi) { return lo + static_cast<long long>(rng() % (hi - lo + 1)); };

    for (int attempt = 0; attempt < 400; ++attempt) {
        ManifoldSpec spec;
        spec.m = opt.allowed_m[rng() % opt.allowed_m.size()];
        spec.d = (rng() % 2 == 0) ? 1 : 2;
        int npieces = 1 + static_cast<int>(rng() % opt.max_pieces);
        if (opt.want_z && npieces < 2) npieces = 2;
        for (int i = 1; i <= npieces; ++i) spec.pieces.push_back(Piece{"p" + std::to_string(i), {}});
        spec.base_piece = "p1";

        Vec a0;
        if (spec.d == 1) {
            a0 = {rng() % 2 ? 1LL : -1LL};
        } else {
            static const std::vector<Vec> dirs{{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}};
            a0 = dirs[rng() % dirs.size()];
        }

        std::vector<long long> levels{-8, -4, 0, 4, 8};
        for (std::size_t i = levels.size(); i > 1; --i) std::swap(levels[i - 1], levels[rng() % i]);

        auto make_z = [&](const std::string& id, const std::string& plus, const std::string& minus,
                          long long level) {
            ZComponent z;
            z.id = id;
            z.modular_ratios.assign(spec.m, 0);
            for (int j = 0; j < spec.m; ++j) z.modular_ratios[j] = pick(-2, 2);
            if (z.modular_ratios.back() == 0) z.modular_ratios.back() = pick(0, 1) ? 1 : -1;
            z.a_hat = (rng() % 2) ? a0 : vneg(a0);
            if (spec.d == 1) {
                z.leaf_polytope = detail::interval(level, level);
            } else {
                Vec g = transverse_functional(z.a_hat);
                z.leaf_polytope = detail::segment_leaf(z.a_hat, g, level, pick(-2, 2), pick(1, 2));
            }
            switch (rng() % 4) {
                case 0: z.threshold_override = Rat(1); break;
                case 1: z.threshold_override = Rat(1, 2); break;
                default: break;  // engine derives the certified threshold
            }
            z.side_plus_piece = plus;
            z.side_minus_piece = minus;
            return z;
        };

        std::size_t level_idx = 0;
        for (int i = 1; i < npieces; ++i)
            spec.z_components.push_back(make_z("z" + std::to_string(i), "p" + std::to_string(i),
                                               "p" + std::to_string(i + 1), levels[level_idx++]));
        if (npieces >= 2 && rng() % 4 == 0 && level_idx < levels.size())
            spec.z_components.push_back(make_z("zcycle", "p1", "p2", levels[level_idx++]));
        if (opt.want_z && spec.z_components.empty()) continue;

        if (!validate_spec(spec).ok()) continue;
        QuantizeParts parts;
        try {
            parts = assemble(spec);
        } catch (...) {
            continue;
        }

        // Compact regions: pairwise lattice-disjoint, and clear of the collar
        // tails when m is even (for odd m the tails cancel exactly, so
        // regions may sit underneath them).
        std::set<Vec> taken;
        int want_regions = static_cast<int>(rng() % 3);
        for (int r = 0; r < want_regions; ++r) {
            HPolytope cand = spec.d == 1 ? detail::interval(pick(-8, 5), 0) : detail::box2(0, 0, 0, 0);
            if (spec.d == 1) {
                long long lo = pick(-8, 6);
                cand = detail::interval(lo, lo + pick(0, 2));
            } else {
                long long x = pick(-8, 7), y = pick(-8, 7);
                cand = detail::box2(x, x + pick(0, 1), y, y + pick(0, 1));
            }
            auto pts = enumerate_lattice_points(cand);
            bool clash = false;
            for (const auto& q : pts) {
                if (taken.count(q)) clash = true;
                if (spec.m % 2 == 0)
                    for (const auto& end : parts.ends)
                        if (prism_contains(end.prism, q)) clash = true;
            }
            if (clash) continue;
            taken.insert(pts.begin(), pts.end());
            spec.pieces[rng() % npieces].regions.push_back(cand);
        }

        if (!validate_spec(spec).ok()) continue;
        try {
            (void)quantize(spec);
        } catch (...) {
            continue;
        }
        return spec;
    }
    throw std::runtime_error("random spec generation did not converge");
}

// A projection compatible with the stages hypothesis for this spec: full row
// rank, nonzero on every a_hat, and with primitive ray images so the
// pushforward stays in the unit-step ray class.
inline std::vector<Vec> random_projection(std::uint64_t seed, const ManifoldSpec& spec) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 17);
    const int d = spec.d;
    for (int attempt = 0; attempt < 500; ++attempt) {
        int dp = 1 + static_cast<int>(rng() % d);
        std::vector<Vec> pi(dp, Vec(d));
        for (auto& row : pi)
            for (auto& x : row) x = static_cast<long long>(rng() % 5) - 2;
        std::vector<std::vector<Rat>> m;
        for (const auto& row : pi) m.emplace_back(row.begin(), row.end());
        if (linalg::rank_rat(std::move(m)) != dp) continue;
        bool ok = true;
        for (const auto& z : spec.z_components) {
            Vec img(dp);
            for (int i = 0; i < dp; ++i) img[i] = vdot(pi[i], z.a_hat);
            if (is_zero_vec(img) || !is_primitive(img)) ok = false;
        }
        if (ok) return pi;
    }
    throw std::runtime_error("projection generation did not converge");
}

// Compact Delzant box with at most ~200 lattice points.
inline HPolytope random_delta_n(std::uint64_t seed, int d) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 29);
    auto pick = [&](long long lo, long long hi) { return lo + static_cast<long long>(rng() % (hi - lo + 1)); };
    if (d == 1) {
        long long lo = pick(-10, 5);
        return detail::interval(lo, lo + pick(0, 20));
    }
    long long x = pick(-10, 5), y = pick(-10, 5);
    long long w = pick(0, 12), h = pick(0, 12);
    while ((w + 1) * (h + 1) > 200) (w > h ? w : h) -= 1;
    return detail::box2(x, x + w, y, y + h);
}

}  // namespace bmq::testgen
