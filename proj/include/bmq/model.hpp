#pragma once

#include "bmq/intvec.hpp"
#include "bmq/laurent.hpp"
#include "bmq/polytope.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmq {

// One component of the complement of the singular hypersurface: its compact
// moment-image regions. The orientation sign is derived (propagate_signs),
// never user input.
struct Piece {
    std::string id;
    std::vector<HPolytope> regions;
};

// One component of the singular hypersurface: modular data r_1..r_m along a
// primitive direction a_hat (so the modular weights are a_j = r_j * a_hat),
// the Delzant polytope of the toric leaf inside a lattice hyperplane
// transverse to a_hat, and the two adjacent pieces.
struct ZComponent {
    std::string id;
    std::vector<Rat> modular_ratios;  // r_1..r_m, r_m != 0
    Vec a_hat;
    HPolytope leaf_polytope;
    std::string side_plus_piece;
    std::string side_minus_piece;
    std::optional<Rat> threshold_override;
};

struct ManifoldSpec {
    int m = 1;
    int d = 1;
    std::vector<Piece> pieces;
    std::vector<ZComponent> z_components;
    std::string base_piece;
};

struct OrientationAssignment {
    std::map<std::string, int> sign;  // piece id -> +-1
};

struct ValidationIssue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    void flag(std::string location, std::string message) {
        issues.push_back({std::move(location), std::move(message)});
    }
    bool mentions(std::string_view text) const {
        for (const auto& i : issues)
            if (i.message.find(text) != std::string::npos) return true;
        return false;
    }
    std::string to_string() const {
        std::string s;
        for (const auto& i : issues) s += i.location + ": " + i.message + "\n";
        return s;
    }
};

// The collar one-form density of a Z component: the modular ratio list is
// used verbatim as the density coefficients of the scalar moment profile.
inline CollarFormData collar_form(const ZComponent& z) {
    return CollarFormData(static_cast<int>(z.modular_ratios.size()), z.modular_ratios);
}

// The lattice hyperplane frame of a leaf: integral g with g(a_hat) = 1 and
// the integer level c with leaf inside {g . y = c}.
struct LeafFrame {
    Vec g;
    long long level = 0;
};

namespace model_detail {

struct LeafFrameResult {
    std::optional<LeafFrame> frame;
    std::vector<std::string> problems;
};

inline LeafFrameResult derive_leaf_frame(const ZComponent& z, int d) {
    LeafFrameResult out;
    const HPolytope& leaf = z.leaf_polytope;
    if (leaf.dim != d) {
        out.problems.push_back("leaf polytope has wrong ambient dimension");
        return out;
    }
    if (!polytope_nonempty(leaf)) {
        out.problems.push_back("leaf polytope empty");
        return out;
    }
    if (!recession_cone_trivial(leaf)) {
        out.problems.push_back("leaf polytope not compact");
        return out;
    }
    std::vector<std::size_t> eq = detail::implicit_equalities(leaf);
    std::vector<Vec> eq_rows;
    for (std::size_t i : eq) eq_rows.push_back(leaf.halfspaces[i].normal);
    std::vector<Vec> span = integer_kernel(eq_rows, d);
    if (static_cast<int>(span.size()) != d - 1) {
        out.problems.push_back("leaf polytope does not have dimension d-1");
        return out;
    }
    std::vector<Vec> normals = integer_kernel(span, d);
    if (normals.size() != 1) {
        out.problems.push_back("leaf hyperplane normal is not unique");
        return out;
    }
    Vec n = normals[0];
    if (is_zero_vec(z.a_hat)) {
        out.problems.push_back("a_hat is zero");
        return out;
    }
    long long t = vdot(n, z.a_hat);
    if (t != 1 && t != -1) {
        out.problems.push_back("a_hat is not unimodularly transverse to the leaf hyperplane");
        return out;
    }
    Vec g = (t == 1) ? n : vneg(n);
    auto verts = vertices(leaf);
    if (verts.empty()) {
        out.problems.push_back("leaf polytope empty");
        return out;
    }
    Rat level = vdot_rat(g, verts[0]);
    for (const auto& v : verts)
        if (vdot_rat(g, v) != level) {
            out.problems.push_back("leaf polytope is not contained in a single hyperplane");
            return out;
        }
    if (rat_den(level) != 1) {
        out.problems.push_back("leaf hyperplane is not a lattice hyperplane");
        return out;
    }
    out.frame = LeafFrame{g, to_int64(rat_num(level))};
    return out;
}

inline bool vertices_in_lattice(const HPolytope& p) {
    for (const auto& v : vertices(p))
        for (const auto& c : v)
            if (rat_den(c) != 1) return false;
    return true;
}

inline bool share_lattice_point(const HPolytope& a, const HPolytope& b) {
    return !enumerate_lattice_points(intersect(a, b)).empty();
}

}  // namespace model_detail

// Orientation signs relative to the base piece: crossing a Z component
// multiplies the sign by (-1)^m, the sign of 1/x^m across x = 0. The
// assignment is the unique consistent one, so it cannot depend on traversal
// order; for m odd an odd cycle of crossings has no assignment at all.
inline OrientationAssignment propagate_signs(const ManifoldSpec& spec) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& p : spec.pieces) adj[p.id];
    for (const auto& z : spec.z_components) {
        adj[z.side_plus_piece].push_back(z.side_minus_piece);
        adj[z.side_minus_piece].push_back(z.side_plus_piece);
    }
    if (!adj.count(spec.base_piece)) throw std::invalid_argument("base piece not found");
    const int flip = (spec.m % 2 == 0) ? 1 : -1;
    OrientationAssignment out;
    std::vector<std::string> queue{spec.base_piece};
    out.sign[spec.base_piece] = 1;
    while (!queue.empty()) {
        std::string cur = queue.back();
        queue.pop_back();
        for (const auto& next : adj[cur]) {
            int want = out.sign[cur] * flip;
            auto it = out.sign.find(next);
            if (it == out.sign.end()) {
                out.sign[next] = want;
                queue.push_back(next);
            } else if (it->second != want) {
                throw std::domain_error("non-orientable configuration");
            }
        }
    }
    if (out.sign.size() != spec.pieces.size())
        throw std::invalid_argument("disconnected specification graph");
    return out;
}

// True iff every modular weight a_j = r_j * a_hat is an integer vector
// (circle period normalized to 1) and every region and leaf polytope has its
// vertices in the lattice.
inline bool check_integrality(const ManifoldSpec& spec) {
    for (const auto& z : spec.z_components) {
        for (const auto& r : z.modular_ratios)
            for (long long a : z.a_hat)
                if (rat_den(r * a) != 1) return false;
        if (!model_detail::vertices_in_lattice(z.leaf_polytope)) return false;
    }
    for (const auto& p : spec.pieces)
        for (const auto& region : p.regions)
            if (!model_detail::vertices_in_lattice(region)) return false;
    return true;
}

inline ValidationReport validate_spec(const ManifoldSpec& spec) {
    ValidationReport rep;
    if (spec.m < 1) rep.flag("spec", "m must be a positive integer");
    if (spec.d < 1) rep.flag("spec", "d must be a positive integer");

    std::set<std::string> piece_ids;
    for (const auto& p : spec.pieces) {
        if (p.id.empty()) rep.flag("piece", "piece identifier empty");
        if (!piece_ids.insert(p.id).second) rep.flag("piece " + p.id, "duplicate piece identifier");
    }
    if (spec.pieces.empty()) rep.flag("spec", "no pieces");
    if (!piece_ids.count(spec.base_piece)) rep.flag("spec", "base piece not found: " + spec.base_piece);

    std::set<std::string> z_ids;
    for (const auto& z : spec.z_components) {
        std::string loc = "z " + z.id;
        if (z.id.empty()) rep.flag("z", "Z component identifier empty");
        if (!z_ids.insert(z.id).second) rep.flag(loc, "duplicate Z component identifier");
        if (!piece_ids.count(z.side_plus_piece)) rep.flag(loc, "side_plus references unknown piece");
        if (!piece_ids.count(z.side_minus_piece)) rep.flag(loc, "side_minus references unknown piece");
    }

    // Regions: compact, Delzant, pairwise lattice-disjoint within a piece.
    for (const auto& p : spec.pieces) {
        std::string loc = "piece " + p.id;
        for (std::size_t i = 0; i < p.regions.size(); ++i) {
            const auto& region = p.regions[i];
            std::string rloc = loc + " region " + std::to_string(i);
            if (region.dim != spec.d) {
                rep.flag(rloc, "region has wrong ambient dimension");
                continue;
            }
            bool bad_normal = false;
            for (const auto& h : region.halfspaces)
                if (is_zero_vec(h.normal)) bad_normal = true;
            if (bad_normal) {
                rep.flag(rloc, "zero normal in halfspace");
                continue;
            }
            if (!polytope_nonempty(region)) {
                rep.flag(rloc, "empty region");
                continue;
            }
            if (!recession_cone_trivial(region)) {
                rep.flag(rloc, "region not compact");
                continue;
            }
            if (!delzant_check(region)) rep.flag(rloc, "region fails the Delzant condition");
            if (!model_detail::vertices_in_lattice(region)) rep.flag(rloc, "region vertex not in the lattice");
        }
        for (std::size_t i = 0; i < p.regions.size(); ++i)
            for (std::size_t j = i + 1; j < p.regions.size(); ++j) {
                if (p.regions[i].dim != spec.d || p.regions[j].dim != spec.d) continue;
                bool both_ok = polytope_nonempty(p.regions[i]) && recession_cone_trivial(p.regions[i]) &&
                               polytope_nonempty(p.regions[j]) && recession_cone_trivial(p.regions[j]);
                if (both_ok && model_detail::share_lattice_point(p.regions[i], p.regions[j]))
                    rep.flag(loc, "regions " + std::to_string(i) + " and " + std::to_string(j) +
                                      " are not lattice-disjoint");
            }
    }

    for (const auto& z : spec.z_components) {
        std::string loc = "z " + z.id;
        if (static_cast<int>(z.modular_ratios.size()) != spec.m) {
            rep.flag(loc, "modular ratio count must equal m");
            continue;
        }
        if (z.modular_ratios.back() == 0) rep.flag(loc, "leading modular weight is zero");
        if (static_cast<int>(z.a_hat.size()) != spec.d) {
            rep.flag(loc, "a_hat has wrong dimension");
            continue;
        }
        if (is_zero_vec(z.a_hat)) {
            rep.flag(loc, "a_hat is zero");
            continue;
        }
        if (!is_primitive(z.a_hat)) rep.flag(loc, "a_hat not primitive");
        for (std::size_t j = 0; j < z.modular_ratios.size(); ++j)
            for (long long a : z.a_hat)
                if (rat_den(z.modular_ratios[j] * a) != 1) {
                    rep.flag(loc, "modular weight a_" + std::to_string(j + 1) + " is not an integer vector");
                    break;
                }
        auto frame = model_detail::derive_leaf_frame(z, spec.d);
        for (const auto& msg : frame.problems) rep.flag(loc, msg);
        if (frame.frame && !delzant_check(z.leaf_polytope))
            rep.flag(loc, "leaf polytope fails the Delzant condition");
        if (z.threshold_override && *z.threshold_override <= 0)
            rep.flag(loc, "threshold override must be positive");
    }

    // Graph checks need consistent references; skip when ids are broken.
    bool refs_ok = !spec.pieces.empty() && piece_ids.count(spec.base_piece);
    for (const auto& z : spec.z_components)
        refs_ok = refs_ok && piece_ids.count(z.side_plus_piece) && piece_ids.count(z.side_minus_piece);
    if (refs_ok) {
        try {
            propagate_signs(spec);
        } catch (const std::domain_error&) {
            rep.flag("spec", "non-orientable configuration");
        } catch (const std::invalid_argument&) {
            rep.flag("spec", "disconnected specification graph");
        }
    }
    return rep;
}

// Degree-2 cohomological data of a Z component: the m one-form classes
// a_j = r_j * a_hat (circle period 1) and the leaf polytope representing the
// smooth summand.
struct MazzeoMelroseData {
    HPolytope smooth_class;
    std::vector<std::vector<Rat>> one_form_classes;
    bool integral = false;
};

inline MazzeoMelroseData mazzeo_melrose_decompose(const ZComponent& z) {
    MazzeoMelroseData out;
    out.smooth_class = z.leaf_polytope;
    bool integral = true;
    for (const auto& r : z.modular_ratios) {
        std::vector<Rat> cls;
        for (long long a : z.a_hat) {
            Rat entry = r * a;
            if (rat_den(entry) != 1) integral = false;
            cls.push_back(entry);
        }
        out.one_form_classes.push_back(std::move(cls));
    }
    out.integral = integral && model_detail::vertices_in_lattice(z.leaf_polytope);
    return out;
}

// The moment condition on the collar: an explicit profile is Hamiltonian for
// the collar form iff its exact derivative reproduces the density.
inline bool hamiltonian_check(const CollarFormData& cf, const LaurentLogFn& profile) {
    return derivative(profile) == collar_density(cf);
}

inline bool hamiltonian_check(const ZComponent& z) {
    CollarFormData cf = collar_form(z);
    return hamiltonian_check(cf, moment_from_form(cf));
}

}  // namespace bmq
