#include "bmq/virtmod.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace bmq;

namespace {

// Independent evaluator for raw finite+ray data: ray membership by explicit
// stepping, no shared code with the canonical representation.
long long raw_mult(const std::map<Vec, long long>& fin, const std::vector<Ray>& rays, const Vec& a,
                   long long tmax = 400) {
    long long total = 0;
    auto it = fin.find(a);
    if (it != fin.end()) total += it->second;
    for (const auto& r : rays) {
        Vec p = r.base;
        for (long long t = 0; t <= tmax; ++t) {
            if (p == a) {
                total += r.value;
                break;
            }
            p = vadd(p, r.dir);
        }
    }
    return total;
}

VirtualTModule canon(int d, std::map<Vec, long long> fin, std::vector<Ray> rays) {
    return canonicalize(d, fin, std::move(rays));
}

}  // namespace

TEST_CASE("canonicalize folds opposite tails into a finite middle") {
    auto m = canon(1, {}, {Ray{{2}, {1}, 1}, Ray{{5}, {1}, -1}});
    CHECK(m.rays.empty());
    CHECK(m.finite == std::map<Vec, long long>{{{2}, 1}, {{3}, 1}, {{4}, 1}});
}

TEST_CASE("canonicalize merges same-residue rays with finite corrections off the ray") {
    std::map<Vec, long long> fin;
    std::vector<Ray> rays{Ray{{0}, {1}, 1}, Ray{{3}, {1}, 1}};
    auto m = canon(1, fin, rays);
    REQUIRE(m.rays.size() == 1);
    CHECK(m.rays[0] == Ray{{3}, {1}, 2});
    CHECK(m.finite == std::map<Vec, long long>{{{0}, 1}, {{1}, 1}, {{2}, 1}});
    // pointwise agreement with the raw input on a window
    for (long long k = -5; k <= 10; ++k) CHECK(multiplicity(m, {k}) == raw_mult(fin, rays, {k}));
    // finite entries never sit on the ray
    for (const auto& [pos, val] : m.finite)
        CHECK_FALSE(vm_detail::ray_contains(m.rays[0], pos));
}

TEST_CASE("canonicalize of nothing is the zero module") {
    auto m = canon(1, {}, {});
    CHECK(m == zero_module(1));
    CHECK(dim(m).finite);
    CHECK(dim(m).total == 0);
}

TEST_CASE("module addition cancels and truncates") {
    auto a = canon(1, {}, {Ray{{1}, {1}, 1}});
    auto b = canon(1, {}, {Ray{{1}, {1}, -1}});
    CHECK(add(a, b) == zero_module(1));
    auto c = canon(1, {}, {Ray{{3}, {1}, -1}});
    auto ac = add(a, c);
    CHECK(ac.rays.empty());
    CHECK(ac.finite == std::map<Vec, long long>{{{1}, 1}, {{2}, 1}});
    auto f1 = canon(1, {{{0}, 1}}, {});
    auto f2 = canon(1, {{{0}, -1}}, {});
    CHECK(add(f1, f2) == zero_module(1));
}

TEST_CASE("multiplicity queries") {
    auto m = canon(2, {}, {Ray{{1, 0}, {1, 0}, 1}});
    CHECK(multiplicity(m, {7, 0}) == 1);
    CHECK(multiplicity(m, {7, 1}) == 0);
    CHECK(multiplicity(m, {0, 0}) == 0);
}

TEST_CASE("dim distinguishes finite from ray-infinite modules") {
    CHECK(dim(zero_module(1)).total == 0);
    auto f = canon(1, {{{1}, 1}, {{-1}, -1}}, {});
    CHECK(dim(f).finite);
    CHECK(dim(f).total == 0);
    auto r = canon(1, {}, {Ray{{0}, {1}, 1}});
    auto dr = dim(r);
    CHECK_FALSE(dr.finite);
    CHECK(dr.ray_directions == std::vector<Vec>{{1}});
}

TEST_CASE("restriction pushes weights forward") {
    auto m = canon(2, {}, {Ray{{0, 0}, {1, 0}, 1}});
    auto r = restrict_module(m, {Vec{1, 0}});
    CHECK(r == canon(1, {}, {Ray{{0}, {1}, 1}}));

    auto vert = canon(2, {}, {Ray{{0, 0}, {0, 1}, 1}});
    CHECK_THROWS_WITH(restrict_module(vert, {Vec{1, 0}}),
                      "non-proper restriction: a ray direction maps to zero");

    auto f = canon(2, {{{0, 1}, 1}, {{1, 0}, 1}}, {});
    auto rf = restrict_module(f, {Vec{1, 1}});
    CHECK(rf == canon(1, {{{1}, 2}}, {}));

    // identity restriction in d=1
    auto one = canon(1, {{{4}, 2}}, {Ray{{6}, {1}, 1}});
    CHECK(restrict_module(one, {Vec{1}}) == one);

    // non-primitive ray image is not representable
    auto diag = canon(2, {}, {Ray{{0, 0}, {1, 1}, 1}});
    CHECK_THROWS_AS(restrict_module(diag, {Vec{1, 1}}), std::domain_error);
}

TEST_CASE("restriction is additive") {
    std::mt19937_64 rng(321);
    std::uniform_int_distribution<int> coord(-6, 6), val(-3, 3);
    for (int iter = 0; iter < 50; ++iter) {
        std::map<Vec, long long> fa, fb;
        for (int i = 0; i < 4; ++i) {
            fa[{coord(rng), coord(rng)}] = val(rng);
            fb[{coord(rng), coord(rng)}] = val(rng);
        }
        std::vector<Ray> ra{Ray{{coord(rng), coord(rng)}, {1, 0}, 1}};
        std::vector<Ray> rb{Ray{{coord(rng), coord(rng)}, {-1, 0}, 2}};
        auto a = canon(2, fa, ra), b = canon(2, fb, rb);
        std::vector<Vec> pi{Vec{1, 0}};
        CHECK(restrict_module(add(a, b), pi) == add(restrict_module(a, pi), restrict_module(b, pi)));
    }
}

TEST_CASE("pairing with finite modules") {
    auto v = canon(1, {}, {Ray{{1}, {1}, 1}});
    auto n = canon(1, {{{-3}, 1}, {{-2}, 1}, {{-1}, 1}}, {});
    CHECK(pair_with_finite(v, n) == 3);
    CHECK(pair_with_finite(v, zero_module(1)) == 0);
    auto p = canon(1, {{{0}, 1}}, {});
    CHECK(pair_with_finite(p, p) == 1);
    CHECK_THROWS_AS(pair_with_finite(v, v), std::invalid_argument);
}

TEST_CASE("pairing equals the brute-force double sum") {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> coord(-8, 8), val(-2, 2);
    for (int iter = 0; iter < 50; ++iter) {
        std::map<Vec, long long> fv, fn;
        for (int i = 0; i < 5; ++i) fv[{coord(rng)}] = val(rng);
        for (int i = 0; i < 5; ++i) fn[{coord(rng)}] = val(rng);
        std::vector<Ray> rays{Ray{{coord(rng)}, {1}, val(rng) == 0 ? 1 : val(rng)}};
        auto v = canon(1, fv, rays);
        auto n = canon(1, fn, {});
        long long expect = 0;
        for (long long a = -60; a <= 60; ++a) expect += multiplicity(v, {a}) * multiplicity(n, {-a});
        CHECK(pair_with_finite(v, n) == expect);
    }
}

TEST_CASE("asymptotic profiles") {
    auto m = canon(1, {}, {Ray{{3}, {1}, 1}, Ray{{-2}, {-1}, 1}});
    auto p = asymptotic_profile(m);
    REQUIRE(p.xi);
    CHECK(*p.xi == Vec{1});
    CHECK(p.c_plus == 1);
    CHECK(p.c_minus == 1);
    CHECK(p.lambda0 == 3);
    CHECK(p.off_axis_clean);
    CHECK_FALSE(p.multi_direction);

    auto z = asymptotic_profile(zero_module(2));
    CHECK_FALSE(z.xi);
    CHECK(z.c_plus == 0);
    CHECK(z.c_minus == 0);

    auto two = canon(2, {}, {Ray{{0, 0}, {1, 0}, 2}, Ray{{0, 1}, {1, 0}, 5}});
    auto pt = asymptotic_profile(two);
    REQUIRE(pt.xi);
    CHECK(*pt.xi == Vec{1, 0});
    CHECK(pt.c_plus == 2);
    CHECK(pt.c_minus == 0);
    CHECK(pt.off_axis_clean);

    auto multi = canon(2, {}, {Ray{{0, 0}, {1, 0}, 1}, Ray{{0, 0}, {0, 1}, 1}});
    CHECK(asymptotic_profile(multi).multi_direction);
}

TEST_CASE("profile tails match pointwise multiplicities") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> coord(-7, 7), val(-3, 3);
    for (int iter = 0; iter < 40; ++iter) {
        std::map<Vec, long long> fin;
        for (int i = 0; i < 3; ++i) fin[{coord(rng), coord(rng)}] = val(rng);
        std::vector<Ray> rays;
        int nr = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < nr; ++i) {
            long long v = val(rng);
            rays.push_back(Ray{{coord(rng), coord(rng)}, rng() % 2 ? Vec{1, 0} : Vec{-1, 0}, v ? v : 1});
        }
        auto m = canon(2, fin, rays);
        auto p = asymptotic_profile(m);
        if (!p.xi || m.rays.empty()) continue;
        for (long long lam = p.lambda0 + 1; lam <= p.lambda0 + 25; ++lam) {
            CHECK(multiplicity(m, vscale(*p.xi, lam)) == p.c_plus);
            CHECK(multiplicity(m, vscale(*p.xi, -lam)) == p.c_minus);
            CHECK(multiplicity(m, Vec{lam, lam}) == 0);   // eta = (1,1)
            CHECK(multiplicity(m, Vec{0, lam}) == 0);     // eta = (0,1)
            CHECK(multiplicity(m, Vec{-lam, 2 * lam}) == 0);
        }
    }
}

TEST_CASE("canonicalize is idempotent and faithful on random raw data") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> coord(-8, 8), val(-3, 3), dpick(1, 2);
    for (int iter = 0; iter < 120; ++iter) {
        int d = dpick(rng);
        std::map<Vec, long long> fin;
        for (int i = 0; i < 4; ++i) {
            Vec k(d);
            for (auto& x : k) x = coord(rng);
            fin[k] = val(rng);
        }
        std::vector<Ray> rays;
        int nr = static_cast<int>(rng() % 4);
        for (int i = 0; i < nr; ++i) {
            Vec b(d), dir(d, 0);
            for (auto& x : b) x = coord(rng);
            dir[rng() % d] = rng() % 2 ? 1 : -1;
            long long v = val(rng);
            rays.push_back(Ray{b, dir, v ? v : 2});
        }
        auto m = canon(d, fin, rays);
        CHECK(canonicalize(m) == m);
        // pointwise agreement with the raw data
        Vec a(d, 0);
        std::uniform_int_distribution<int> probe(-40, 40);
        for (int q = 0; q < 60; ++q) {
            for (auto& x : a) x = probe(rng);
            CHECK(multiplicity(m, a) == raw_mult(fin, rays, a));
        }
        // invariant: finite entries lie on no ray
        for (const auto& [pos, v] : m.finite)
            for (const auto& r : m.rays) CHECK_FALSE(vm_detail::ray_contains(r, pos));
        // invariant: at most one ray per oriented line
        for (std::size_t i = 0; i < m.rays.size(); ++i)
            for (std::size_t j = i + 1; j < m.rays.size(); ++j) {
                bool same_line = vm_detail::line_key(m.rays[i].base, m.rays[i].dir) ==
                                 vm_detail::line_key(m.rays[j].base, m.rays[j].dir);
                bool same_orient = m.rays[i].dir == m.rays[j].dir;
                CHECK_FALSE((same_line && same_orient));
            }
    }
}

TEST_CASE("semantically equal presentations canonicalize identically") {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> coord(-6, 6), val(1, 3), shift(1, 5);
    for (int iter = 0; iter < 60; ++iter) {
        Vec base{coord(rng), coord(rng)};
        Vec dir = rng() % 2 ? Vec{1, 0} : Vec{0, -1};
        long long v = val(rng);
        auto m = canon(2, {{{coord(rng), coord(rng)}, val(rng)}}, {Ray{base, dir, v}});
        // alternate presentation: push the ray base outward and add the gap
        long long k = shift(rng);
        std::map<Vec, long long> fin2 = {};
        std::vector<Ray> rays2{Ray{vadd(base, vscale(dir, k)), dir, v}};
        for (long long t = 0; t < k; ++t) fin2[vadd(base, vscale(dir, t))] += v;
        auto m2 = add(canon(2, fin2, rays2), canon(2, m.finite, {}));
        auto direct = add(canon(2, {}, {Ray{base, dir, v}}), canon(2, m.finite, {}));
        CHECK(m2 == direct);
    }
}

TEST_CASE("commutativity and associativity hold pointwise and structurally") {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<int> coord(-5, 5), val(-2, 2);
    for (int iter = 0; iter < 40; ++iter) {
        auto mk = [&] {
            std::map<Vec, long long> fin;
            fin[{coord(rng)}] = val(rng);
            std::vector<Ray> rays;
            if (rng() % 2) rays.push_back(Ray{{coord(rng)}, rng() % 2 ? Vec{1} : Vec{-1}, val(rng) ? val(rng) : 1});
            return canon(1, fin, rays);
        };
        auto a = mk(), b = mk(), c = mk();
        CHECK(add(a, b) == add(b, a));
        CHECK(add(add(a, b), c) == add(a, add(b, c)));
        CHECK(add(a, negate(a)) == zero_module(1));
    }
}
