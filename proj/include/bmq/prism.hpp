#pragma once

#include "bmq/intvec.hpp"
#include "bmq/polytope.hpp"

#include <set>
#include <stdexcept>

namespace bmq {

// Half-infinite lattice region: a compact cross-section polytope lying in the
// hyperplane {transverse . y = level}, swept along a primitive direction with
// transverse(direction) = 1. The region is the union of the slabs
// cross_section + t * direction for integer t >= start.
struct Prism {
    HPolytope cross_section;
    Vec direction;
    Vec transverse;
    long long level = 0;
    long long start = 0;
};

inline void validate_prism(const Prism& pr) {
    if (!is_primitive(pr.direction)) throw std::invalid_argument("prism direction must be primitive");
    if (vdot(pr.transverse, pr.direction) != 1)
        throw std::invalid_argument("prism transverse functional must take value 1 on the direction");
    if (!polytope_nonempty(pr.cross_section)) throw std::invalid_argument("prism cross-section is empty");
    if (!recession_cone_trivial(pr.cross_section)) throw std::invalid_argument("prism cross-section is not compact");
    for (const auto& v : vertices(pr.cross_section))
        if (vdot_rat(pr.transverse, v) != pr.level)
            throw std::invalid_argument("prism cross-section does not lie in its transverse hyperplane");
}

// Lattice points of the first slab (the ray base points). The cross-section
// hyperplane is a lattice hyperplane, so every slab is the lattice translate
// of this one by multiples of the direction.
inline std::set<Vec> prism_first_slab(const Prism& pr) {
    std::set<Vec> slab;
    Vec shift = vscale(pr.direction, pr.start);
    for (const auto& q : enumerate_lattice_points(pr.cross_section)) slab.insert(vadd(q, shift));
    return slab;
}

inline bool prism_contains(const Prism& pr, const Vec& y) {
    long long t = vdot(pr.transverse, y) - pr.level;
    if (t < pr.start) return false;
    return contains(pr.cross_section, vsub(y, vscale(pr.direction, t)));
}

}  // namespace bmq
