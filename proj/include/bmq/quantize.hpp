#pragma once

#include "bmq/laurent.hpp"
#include "bmq/model.hpp"
#include "bmq/prism.hpp"
#include "bmq/virtmod.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmq {

// One collar end of a Z component: the leaf polytope swept along the escape
// direction, starting at the first certified slab, weighted by the
// orientation sign of the adjacent piece (the side's collar orientation
// factor is already absorbed into propagate_signs).
struct EndContribution {
    std::string z_id;
    int side = 1;
    Prism prism;
    int sign = 1;
};

struct SignedRegion {
    std::string piece_id;
    std::size_t index = 0;
    HPolytope region;
    int sign = 1;
};

struct QuantizeParts {
    int d = 1;
    OrientationAssignment signs;
    std::vector<SignedRegion> regions;
    std::vector<EndContribution> ends;
};

// Validates and lays out all contributions. The prism start comes from the
// certified monotonicity threshold (or the override) mapped through the
// moment profile, rounded outward to the next lattice slab. For odd m the
// two sides share one start: the level sets beyond it hit both sides once
// each, which is exactly the cancellation mechanism, so the starts must
// agree for the trivial end module to come out exactly.
inline QuantizeParts assemble(const ManifoldSpec& spec) {
    ValidationReport rep = validate_spec(spec);
    if (!rep.ok()) throw std::invalid_argument("invalid specification:\n" + rep.to_string());

    QuantizeParts parts;
    parts.d = spec.d;
    parts.signs = propagate_signs(spec);
    for (const auto& p : spec.pieces)
        for (std::size_t i = 0; i < p.regions.size(); ++i)
            parts.regions.push_back(SignedRegion{p.id, i, p.regions[i], parts.signs.sign.at(p.id)});

    for (const auto& z : spec.z_components) {
        auto frame_res = model_detail::derive_leaf_frame(z, spec.d);
        LeafFrame frame = *frame_res.frame;  // validated above
        CollarFormData cf = collar_form(z);
        Rat x_star = z.threshold_override ? *z.threshold_override : monotonicity_threshold(cf);

        long long k0_plus = first_slab_offset(cf, +1, x_star);
        long long k0_minus = first_slab_offset(cf, -1, x_star);
        if (spec.m % 2 == 1) {
            int eps = escape_direction(cf, +1);  // side-independent for odd m
            long long common = eps == 1 ? std::max(k0_plus, k0_minus) : std::min(k0_plus, k0_minus);
            k0_plus = k0_minus = common;
        }
        for (int side : {+1, -1}) {
            long long k0 = side == 1 ? k0_plus : k0_minus;
            int eps = escape_direction(cf, side);
            EndContribution end;
            end.z_id = z.id;
            end.side = side;
            end.sign = parts.signs.sign.at(side == 1 ? z.side_plus_piece : z.side_minus_piece);
            end.prism.cross_section = translate(z.leaf_polytope, vscale(z.a_hat, k0));
            end.prism.direction = eps == 1 ? z.a_hat : vneg(z.a_hat);
            end.prism.transverse = eps == 1 ? frame.g : vneg(frame.g);
            end.prism.level = eps * (frame.level + k0);
            end.prism.start = 0;
            validate_prism(end.prism);
            parts.ends.push_back(std::move(end));
        }
    }
    return parts;
}

inline VirtualTModule module_of_end(const QuantizeParts& parts, const EndContribution& end) {
    std::vector<Ray> rays;
    for (const auto& q : prism_first_slab(end.prism)) rays.push_back(Ray{q, end.prism.direction, end.sign});
    return canonicalize(parts.d, {}, std::move(rays));
}

// Module of one collar end: rays at the first-slab lattice points, each with
// the side's orientation sign. An empty leaf lattice gives the zero module.
inline VirtualTModule end_contribution(const ManifoldSpec& spec, const ZComponent& z, int side) {
    QuantizeParts parts = assemble(spec);
    for (const auto& end : parts.ends)
        if (end.z_id == z.id && end.side == side) return module_of_end(parts, end);
    throw std::invalid_argument("unknown Z component: " + z.id);
}

inline VirtualTModule piece_contribution(const ManifoldSpec& spec, const Piece& piece) {
    QuantizeParts parts = assemble(spec);
    std::map<Vec, long long> fin;
    for (const auto& r : parts.regions) {
        if (r.piece_id != piece.id) continue;
        for (const auto& q : enumerate_lattice_points(r.region)) fin[q] += r.sign;
    }
    return canonicalize(parts.d, fin, {});
}

// Compact regions may never claim a weight twice, and for even m they may
// not claim weights inside a collar tail either. Prisms themselves are
// allowed to superpose: for odd m the two ends of a Z component coincide by
// construction (that is the cancellation), and distinct Z tails legitimately
// stack their multiplicities.
inline void check_disjointness(const QuantizeParts& parts, int m) {
    std::vector<std::set<Vec>> region_pts;
    for (const auto& r : parts.regions) region_pts.push_back(enumerate_lattice_points(r.region));
    for (std::size_t i = 0; i < parts.regions.size(); ++i)
        for (std::size_t j = i + 1; j < parts.regions.size(); ++j)
            for (const auto& q : region_pts[i])
                if (region_pts[j].count(q))
                    throw std::domain_error("overlapping regions: " + parts.regions[i].piece_id + " region " +
                                            std::to_string(parts.regions[i].index) + " and " +
                                            parts.regions[j].piece_id + " region " +
                                            std::to_string(parts.regions[j].index));
    if (m % 2 == 0) {
        for (std::size_t i = 0; i < parts.regions.size(); ++i) {
            for (const auto& end : parts.ends) {
                for (const auto& q : region_pts[i])
                    if (prism_contains(end.prism, q))
                        throw std::domain_error("overlapping regions: " + parts.regions[i].piece_id + " region " +
                                                std::to_string(parts.regions[i].index) + " and end (" + end.z_id +
                                                ", side " + (end.side == 1 ? "+" : "-") + ")");
            }
        }
    }
}

// The formal quantization: the canonical sum of all piece and end
// contributions.
inline VirtualTModule quantize(const ManifoldSpec& spec) {
    QuantizeParts parts = assemble(spec);
    check_disjointness(parts, spec.m);
    std::map<Vec, long long> fin;
    std::vector<Ray> rays;
    for (const auto& r : parts.regions)
        for (const auto& q : enumerate_lattice_points(r.region)) fin[q] += r.sign;
    for (const auto& end : parts.ends)
        for (const auto& q : prism_first_slab(end.prism)) rays.push_back(Ray{q, end.prism.direction, end.sign});
    return canonicalize(parts.d, fin, std::move(rays));
}

// Multiplicity of one weight summed contribution by contribution; an
// independent route from the canonical module query.
inline long long multiplicity_direct(const QuantizeParts& parts, const Vec& alpha) {
    long long total = 0;
    for (const auto& r : parts.regions)
        if (contains(r.region, alpha)) total += r.sign;
    for (const auto& end : parts.ends)
        if (prism_contains(end.prism, alpha)) total += end.sign;
    return total;
}

inline long long multiplicity_direct(const ManifoldSpec& spec, const Vec& alpha) {
    QuantizeParts parts = assemble(spec);
    return multiplicity_direct(parts, alpha);
}

namespace qz_detail {

template <typename F>
void for_each_in_cube(int d, long long radius, F&& f) {
    Vec y(d, -radius);
    for (;;) {
        f(y);
        int i = 0;
        while (i < d && ++y[i] > radius) y[i++] = -radius;
        if (i == d) break;
    }
}

}  // namespace qz_detail

struct FinitenessReport {
    bool pass = false;
    long long dimension = 0;
    std::vector<std::pair<long long, long long>> window_sums;  // (radius, sum)
    std::vector<std::string> notes;
};

// Odd m: the module must be genuinely finite. Fails loudly if a ray
// survives, and cross-checks the signed dimension against pointwise window
// sums at increasing radii.
inline FinitenessReport check_finiteness(const ManifoldSpec& spec) {
    if (spec.m % 2 == 0) throw std::invalid_argument("check_finiteness requires odd m");
    FinitenessReport rep;
    VirtualTModule q = quantize(spec);
    rep.pass = q.rays.empty();
    if (!q.rays.empty()) {
        rep.notes.push_back("a nonzero ray survives; this contradicts finiteness and indicates a bad spec or an "
                            "engine bug");
        return rep;
    }
    rep.dimension = dim(q).total;
    for (long long radius : {20LL, 40LL, 80LL}) {
        long long sum = 0;
        qz_detail::for_each_in_cube(spec.d, radius, [&](const Vec& y) { sum += multiplicity(q, y); });
        rep.window_sums.emplace_back(radius, sum);
    }
    for (const auto& [radius, sum] : rep.window_sums)
        if (sum != rep.window_sums.front().second) {
            rep.pass = false;
            rep.notes.push_back("window sums do not stabilize; support exceeds the smallest window");
        }
    return rep;
}

struct AsymptoticsReport {
    bool pass = false;
    AsymptoticProfile profile;
    std::vector<std::string> notes;
};

// Even m: computes the profile and cross-checks the stable tail values
// pointwise over (lambda0, lambda0 + 25].
inline AsymptoticsReport check_asymptotics(const ManifoldSpec& spec) {
    if (spec.m % 2 == 1) throw std::invalid_argument("check_asymptotics requires even m");
    AsymptoticsReport rep;
    VirtualTModule q = quantize(spec);
    rep.profile = asymptotic_profile(q);
    rep.pass = true;
    if (rep.profile.multi_direction)
        rep.notes.push_back("ray directions span more than one axis; profile is per-direction best effort");
    if (!rep.profile.xi) {
        rep.notes.push_back("module is finite; stable tail values are zero");
        return rep;
    }
    const Vec& xi = *rep.profile.xi;
    for (long long lam = rep.profile.lambda0 + 1; lam <= rep.profile.lambda0 + 25; ++lam) {
        if (multiplicity(q, vscale(xi, lam)) != rep.profile.c_plus) {
            rep.pass = false;
            rep.notes.push_back("multiplicity at lambda*xi differs from c_plus at lambda=" + std::to_string(lam));
        }
        if (multiplicity(q, vscale(xi, -lam)) != rep.profile.c_minus) {
            rep.pass = false;
            rep.notes.push_back("multiplicity at -lambda*xi differs from c_minus at lambda=" + std::to_string(lam));
        }
    }
    return rep;
}

// Odd m: the two ends of one Z component must sum to the trivial module.
inline bool z_cancellation_check(const ManifoldSpec& spec, const std::string& z_id) {
    if (spec.m % 2 == 0) throw std::invalid_argument("z_cancellation_check requires odd m");
    QuantizeParts parts = assemble(spec);
    VirtualTModule sum = zero_module(spec.d);
    bool found = false;
    for (const auto& end : parts.ends)
        if (end.z_id == z_id) {
            sum = add(sum, module_of_end(parts, end));
            found = true;
        }
    if (!found) throw std::invalid_argument("unknown Z component: " + z_id);
    return sum == zero_module(spec.d);
}

struct StagesReport {
    bool pass = true;
    long long weights_checked = 0;
    long long weights_skipped = 0;  // fibers not fully contained in a window
    std::vector<std::string> notes;
};

// Quantization in stages: the pushforward along pi must agree with
// brute-force fiber sums wherever a window certifiably contains the whole
// fiber support.
inline StagesReport stages_check(const ManifoldSpec& spec, const std::vector<Vec>& pi) {
    for (const auto& z : spec.z_components) {
        Vec img(pi.size());
        for (std::size_t i = 0; i < pi.size(); ++i) img[i] = vdot(pi[i], z.a_hat);
        if (is_zero_vec(img))
            throw std::domain_error(
                "non-proper restriction: the subtorus leading modular weight vanishes (pi * a_hat = 0)");
    }
    VirtualTModule q = quantize(spec);
    VirtualTModule r = restrict_module(q, pi);
    StagesReport rep;

    auto apply = [&](const Vec& x) {
        Vec y(pi.size());
        for (std::size_t i = 0; i < pi.size(); ++i) y[i] = vdot(pi[i], x);
        return y;
    };
    auto fiber_support_inside = [&](const Vec& beta, long long radius) {
        // Exact support of q on the fiber over beta: finitely many points.
        std::vector<Vec> pts;
        for (const auto& [k, v] : q.finite)
            if (apply(k) == beta) pts.push_back(k);
        for (const auto& ray : q.rays) {
            Vec dimg = apply(ray.dir);
            std::size_t i = 0;
            while (i < dimg.size() && dimg[i] == 0) ++i;
            if (i == dimg.size()) continue;  // cannot happen: restrict validated
            Vec bimg = apply(ray.base);
            long long num = beta[i] - bimg[i];
            if (num % dimg[i] != 0) continue;
            long long t = num / dimg[i];
            if (t < 0) continue;
            Vec candidate = vadd(ray.base, vscale(ray.dir, t));
            if (apply(candidate) == beta) pts.push_back(candidate);
        }
        for (const auto& p : pts)
            for (long long c : p)
                if (c < -radius || c > radius) return false;
        return true;
    };

    for (long long radius : {20LL, 40LL}) {
        std::map<Vec, long long> buckets;
        qz_detail::for_each_in_cube(spec.d, radius, [&](const Vec& y) {
            long long mlt = multiplicity(q, y);
            if (mlt != 0) buckets[apply(y)] += mlt;
        });
        // Candidates: every projected weight seen by the window scan, plus
        // the restricted module's own support points, so a pushforward that
        // invented mass would be caught too.
        std::set<Vec> candidates;
        for (const auto& [beta, total] : buckets) candidates.insert(beta);
        for (const auto& [k, v] : r.finite) candidates.insert(k);
        for (const auto& ray : r.rays)
            for (long long t = 0; t <= 2; ++t) candidates.insert(vadd(ray.base, vscale(ray.dir, t)));
        for (const auto& beta : candidates) {
            if (!fiber_support_inside(beta, radius)) {
                ++rep.weights_skipped;
                continue;
            }
            ++rep.weights_checked;
            auto it = buckets.find(beta);
            long long total = it == buckets.end() ? 0 : it->second;
            if (multiplicity(r, beta) != total) {
                rep.pass = false;
                rep.notes.push_back("fiber sum mismatch at projected weight " + vec_str(beta) + " (window " +
                                    std::to_string(radius) + ")");
            }
        }
    }
    return rep;
}

struct QrReport {
    bool pass = false;
    long long lhs = 0;
    long long rhs = 0;
    bool mixed_orientations = false;  // reduced-space components of both signs met
};

// Quantization commutes with reduction, at level zero of the product with a
// compact toric piece: the invariant pairing against Q(N) must equal the
// direct signed enumeration of the reduced points.
inline QrReport qr_check(const ManifoldSpec& spec, const HPolytope& delta_n) {
    if (delta_n.dim != spec.d) throw std::invalid_argument("N polytope has wrong dimension");
    if (!polytope_nonempty(delta_n)) throw std::invalid_argument("N polytope is empty");
    if (!recession_cone_trivial(delta_n)) throw std::invalid_argument("N polytope is not compact");
    if (!delzant_check(delta_n)) throw std::invalid_argument("N polytope must be Delzant");

    QrReport rep;
    std::map<Vec, long long> nfin;
    for (const auto& q : enumerate_lattice_points(delta_n)) nfin[q] = 1;
    VirtualTModule n = canonicalize(spec.d, nfin, {});
    rep.lhs = pair_with_finite(quantize(spec), n);

    QuantizeParts parts = assemble(spec);
    bool seen_plus = false, seen_minus = false;
    for (const auto& [beta, w] : nfin) {
        Vec alpha = vneg(beta);
        for (const auto& r : parts.regions)
            if (contains(r.region, alpha)) {
                rep.rhs += r.sign * w;
                (r.sign > 0 ? seen_plus : seen_minus) = true;
            }
        for (const auto& end : parts.ends)
            if (prism_contains(end.prism, alpha)) {
                rep.rhs += end.sign * w;
                (end.sign > 0 ? seen_plus : seen_minus) = true;
            }
    }
    rep.mixed_orientations = seen_plus && seen_minus;
    rep.pass = rep.lhs == rep.rhs;
    return rep;
}

}  // namespace bmq
