#pragma once

#include "bmq/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace bmq {

namespace gen_detail {

inline HPolytope point1(long long c) {
    return HPolytope{1, {Halfspace{{1}, c, true}, Halfspace{{-1}, -c, true}}};
}

inline HPolytope interval(long long lo, long long hi) {
    return HPolytope{1, {Halfspace{{1}, lo, true}, Halfspace{{-1}, -hi, true}}};
}

inline std::vector<Rat> default_ratios(int m) {
    std::vector<Rat> r(m, 0);
    r[m - 1] = 1;
    return r;
}

}  // namespace gen_detail

// The sphere with one singular equator circle of order m: two hemispheres,
// a single Z component with leaf {0} and modular data along [1].
inline ManifoldSpec example_s2(int m, std::vector<Rat> ratios = {}) {
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (ratios.empty()) ratios = gen_detail::default_ratios(m);
    if (static_cast<int>(ratios.size()) != m) throw std::invalid_argument("need exactly m coefficients");
    ManifoldSpec spec;
    spec.m = m;
    spec.d = 1;
    spec.base_piece = "north";
    spec.pieces = {Piece{"north", {}}, Piece{"south", {}}};
    ZComponent z;
    z.id = "equator";
    z.modular_ratios = std::move(ratios);
    z.a_hat = {1};
    z.leaf_polytope = gen_detail::point1(0);
    z.side_plus_piece = "north";
    z.side_minus_piece = "south";
    spec.z_components = {std::move(z)};
    return spec;
}

// Product with a standard toric sphere: d = 2, the singular factor along the
// first axis (m = 2), the second factor contributing the segment [0, 1] to
// every leaf.
inline ManifoldSpec example_s2xs2() {
    ManifoldSpec spec;
    spec.m = 2;
    spec.d = 2;
    spec.base_piece = "north";
    spec.pieces = {Piece{"north", {}}, Piece{"south", {}}};
    ZComponent z;
    z.id = "equator";
    z.modular_ratios = {0, 1};
    z.a_hat = {1, 0};
    z.leaf_polytope = HPolytope{2,
                                {Halfspace{{1, 0}, 0, true}, Halfspace{{-1, 0}, 0, true},
                                 Halfspace{{0, 1}, 0, true}, Halfspace{{0, -1}, -1, true}}};
    z.side_plus_piece = "north";
    z.side_minus_piece = "south";
    spec.z_components = {std::move(z)};
    return spec;
}

// A chain of k pieces separated by k-1 singular circles at spread-out leaf
// positions; interior pieces get compact middle regions when m is odd (for
// even m the collar tails already cover the middle bands).
inline ManifoldSpec example_chain(int pieces, int m) {
    if (pieces < 1) throw std::invalid_argument("need at least one piece");
    if (m < 1) throw std::invalid_argument("m must be positive");
    ManifoldSpec spec;
    spec.m = m;
    spec.d = 1;
    spec.base_piece = "p1";
    for (int i = 1; i <= pieces; ++i) spec.pieces.push_back(Piece{"p" + std::to_string(i), {}});
    for (int i = 1; i < pieces; ++i) {
        ZComponent z;
        z.id = "z" + std::to_string(i);
        z.modular_ratios = gen_detail::default_ratios(m);
        z.a_hat = {1};
        z.leaf_polytope = gen_detail::point1(4 * i);
        z.side_plus_piece = "p" + std::to_string(i);
        z.side_minus_piece = "p" + std::to_string(i + 1);
        spec.z_components.push_back(std::move(z));
    }
    if (pieces == 1) {
        spec.pieces[0].regions.push_back(gen_detail::interval(0, 2));
    } else if (m % 2 == 1) {
        for (int i = 2; i < pieces; ++i)
            spec.pieces[i - 1].regions.push_back(gen_detail::interval(4 * (i - 1) + 1, 4 * i - 1));
    }
    return spec;
}

}  // namespace bmq
