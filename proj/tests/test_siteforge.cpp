#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "toposcope/sheafify.hpp"
#include "toposcope/siteforge.hpp"

using namespace toposcope;
using namespace toposcope::testing;

TEST_CASE("canonical coverage builders") {
    auto c = remark_category();
    REQUIRE(is_coverage(trivial_coverage(c)));
    REQUIRE(is_coverage(maximal_coverage(c)));
    REQUIRE(is_coverage(iso_coverage(c)));

    // a two-object groupoid: iso coverage holds both singleton isos
    auto gpd = std::make_shared<FinCategory>(validate_category(
        {"a", "b"}, {{"s", 0, 1}, {"t", 1, 0}}, {{"t", "s", "id_a"}, {"s", "t", "id_b"}}));
    auto iso = iso_coverage(gpd);
    REQUIRE(iso.contains(Family::make(*gpd, 1, {gpd->morphism_index("s")})));
    REQUIRE(iso.contains(Family::make(*gpd, 0, {gpd->morphism_index("t")})));

    auto max = maximal_coverage(c);
    for (int u = 0; u < 3; ++u)
        REQUIRE(max.contains(mask_family(*c, u, maximal_sieve_mask(*c, u))));
}

TEST_CASE("open cover site of the Sierpinski space") {
    auto site = open_cover_site(FiniteSpace::sierpinski());
    const FinCategory& c = *site.cat();
    REQUIRE(c.objects() == 3);
    REQUIRE(is_coverage(site.coverage));

    int empty_obj = site.object_of_open(0);
    REQUIRE(site.coverage.covers[empty_obj].size() == 2); // empty family and identity

    // the singular object forces singleton values on sheaves
    std::mt19937 rng(151);
    for (int t = 0; t < 5; ++t) {
        auto x = random_presheaf(rng, site.cat(), 2);
        if (is_sheaf(site.coverage, x)) REQUIRE(x.at[empty_obj].size() == 1);
    }
}

TEST_CASE("open cover site of the discrete two-point space") {
    auto site = open_cover_site(FiniteSpace::discrete(2));
    const FinCategory& c = *site.cat();
    int whole = site.object_of_open(0b11);
    int px = site.object_of_open(0b01), py = site.object_of_open(0b10);
    std::vector<int> members;
    for (int f : c.hom(px, whole)) members.push_back(f);
    for (int f : c.hom(py, whole)) members.push_back(f);
    REQUIRE(site.coverage.contains(Family::make(c, whole, members)));
    REQUIRE(is_coverage(site.coverage));

    auto one = open_cover_site(FiniteSpace::discrete(1));
    REQUIRE(one.cat()->objects() == 2);
    REQUIRE(is_coverage(one.coverage));
}

TEST_CASE("alexandrov sites and minimal covers") {
    // P = {x0 <= x1}
    Preorder p{2, {{1, 1}, {0, 1}}};
    auto a = alexandrov_site(p);
    REQUIRE(a.site.space.opens == std::vector<PointSet>{0b00, 0b10, 0b11});
    int top = a.site.object_of_open(0b11);
    auto mc = min_cover(a, top);
    // up(x0) is the whole space and up(x1) = {x1}
    REQUIRE(mc.members.size() == 2);
    REQUIRE(std::count(mc.members.begin(), mc.members.end(), a.site.cat()->identity(top)) == 1);

    // discrete preorder: minimal covers are the point opens
    Preorder d{2, {{1, 0}, {0, 1}}};
    auto ad = alexandrov_site(d);
    int wholed = ad.site.object_of_open(0b11);
    auto mcd = min_cover(ad, wholed);
    REQUIRE(mcd.members.size() == 2);
    for (int f : mcd.members) {
        PointSet open = ad.site.open_of_object[ad.site.cat()->dom(f)];
        REQUIRE((open == 0b01 || open == 0b10));
    }

    // 3-chain: the principal up-set of the bottom is the whole space
    Preorder chain{3, {{1, 1, 1}, {0, 1, 1}, {0, 0, 1}}};
    auto ac = alexandrov_site(chain);
    auto mcc = min_cover(ac, ac.site.object_of_open(0b111));
    REQUIRE(std::count(mcc.members.begin(), mcc.members.end(),
                       ac.site.cat()->identity(ac.site.object_of_open(0b111))) == 1);

    // the minimal cover refines every cover of its object
    for (const AlexandrovSite& s : {a, ad, ac})
        for (int u = 0; u < s.site.cat()->objects(); ++u) {
            auto m = min_cover(s, u);
            for (const Family& r : s.site.coverage.covers[u])
                REQUIRE(refines(*s.site.cat(), m, r).has_value());
        }
}

TEST_CASE("basis coverage is equivalent to the full open-cover coverage") {
    Preorder p = vee_with_point();
    auto a = alexandrov_site(p);
    std::vector<std::vector<Family>> basis_covers(a.site.cat()->objects());
    for (int u = 0; u < a.site.cat()->objects(); ++u) basis_covers[u].push_back(min_cover(a, u));
    auto basis = make_coverage(a.site.cat(), basis_covers);
    REQUIRE(is_coverage(basis));
    auto cmp = compare(basis, a.site.coverage);
    REQUIRE(cmp.equivalent);

    // equivalent coverages have the same sheaves
    std::mt19937 rng(157);
    for (int t = 0; t < 4; ++t) {
        auto x = random_presheaf(rng, a.site.cat(), 2);
        REQUIRE(is_sheaf(basis, x) == is_sheaf(a.site.coverage, x));
    }
}

TEST_CASE("cellular sheaves on a preorder") {
    Preorder p{2, {{1, 1}, {0, 1}}};
    auto a = alexandrov_site(p);
    const FinCategory& pc = *a.pcat;

    // F with two sections over x0 collapsing to one over x1
    SetDiagram f{a.pcat, {FinSetObj::numbered(2, "s"), FinSetObj::numbered(1, "t")}, {}};
    f.act.assign(pc.morphisms(), FinFunction{});
    f.act[pc.identity(0)] = FinFunction::identity(f.at[0]);
    f.act[pc.identity(1)] = FinFunction::identity(f.at[1]);
    f.act[pc.morphism_index("l0_1")] = FinFunction{f.at[0], f.at[1], {0, 0}};
    f.validate();

    auto psi = cellular_psi(a, f);
    REQUIRE(is_sheaf(a.site.coverage, psi));
    REQUIRE(psi.at[a.site.object_of_open(0b11)].size() == 2);
    REQUIRE(psi.at[a.site.object_of_open(0b00)].size() == 1); // empty limit

    auto phi = cellular_phi(a, psi);
    // round trip back to F
    for (int x = 0; x < p.n; ++x) REQUIRE(phi.at[x].size() == f.at[x].size());

    std::mt19937 rng(163);
    for (int t = 0; t < 8; ++t) {
        auto g = random_diagram(rng, a.pcat, 3);
        auto sheaf = cellular_psi(a, g);
        REQUIRE(is_sheaf(a.site.coverage, sheaf));
        auto back = cellular_phi(a, sheaf);
        // canonical comparison: evaluation at the principal up-set
        for (int x = 0; x < p.n; ++x) REQUIRE(back.at[x].size() == g.at[x].size());
    }
}

TEST_CASE("the finite-set site with jointly epimorphic covers") {
    auto site = finset_epi_site(2);
    const FinCategory& c = *site.coverage.cat;
    REQUIRE(c.objects() == 3);
    REQUIRE(is_coverage(site.coverage));
    REQUIRE(is_saturated(site.coverage));
    REQUIRE(is_pullback_stable(site.coverage));
    REQUIRE(is_composition_closed(site.coverage));
    REQUIRE(is_pretopology(site.coverage));
    REQUIRE(is_subcanonical(site.coverage));
    REQUIRE(is_concrete_site(site.coverage));

    // a sheaf has X(Nk) of size |X(N1)|^k
    auto gro = grothendieck_closure(site.coverage);
    std::mt19937 rng(167);
    for (int t = 0; t < 3; ++t) {
        auto x = random_presheaf(rng, site.coverage.cat, 2);
        auto ax = sheafify(gro, x);
        int base = ax.sheaf.at[1].size();
        REQUIRE(ax.sheaf.at[0].size() == 1);
        REQUIRE(ax.sheaf.at[2].size() == base * base);
    }
}

TEST_CASE("slice sites") {
    auto c = remark_category();
    auto j = remark_coverage(c);
    auto slice = slice_site(j, c->object_index("U"));
    REQUIRE(slice.coverage.cat->objects() == 3);
    REQUIRE(is_coverage(slice.coverage));
    slice.projection.validate();

    // covers over the slice object id_U correspond to covers of U
    int idU_obj = -1;
    for (std::size_t i = 0; i < slice.object_arrow.size(); ++i)
        if (slice.object_arrow[i] == c->identity(c->object_index("U"))) idU_obj = static_cast<int>(i);
    REQUIRE(slice.coverage.covers[idU_obj].size() == j.covers[c->object_index("U")].size());
}

TEST_CASE("induced coverage of a full subcategory") {
    auto fx = fixture_sierpinski_basis();
    const auto& basis = fx.sites[0].second;
    REQUIRE(basis.cat->objects() == 2);
    REQUIRE(is_coverage(basis));
    std::get<3>(fx.functors[0]).validate();
}

TEST_CASE("dense, atomic and canonical coverages") {
    auto c = remark_category();
    auto dense = dense_coverage(c);
    REQUIRE(is_sifted(dense));
    REQUIRE(is_grothendieck(dense));

    REQUIRE(has_ore_condition(*c));
    auto atomic = atomic_coverage(c);
    REQUIRE(atomic.covers == dense.covers); // Ore: dense and atomic coincide
    REQUIRE(is_grothendieck(atomic));

    // the vee poset x0 -> x2 <- x1 has a cospan with no span over it
    auto vee = preorder_category(Preorder{3, {{1, 0, 1}, {0, 1, 1}, {0, 0, 1}}});
    REQUIRE_FALSE(has_ore_condition(*vee));
    REQUIRE_THROWS_AS(atomic_coverage(vee), OreViolation);

    auto canon = canonical_coverage(c);
    REQUIRE(is_grothendieck(canon));
    REQUIRE(is_subcanonical(canon));
}

TEST_CASE("discrete categories satisfy the Ore condition vacuously") {
    auto d2 = discrete_category(2);
    REQUIRE(has_ore_condition(*d2));
    REQUIRE_NOTHROW(atomic_coverage(d2));
}

TEST_CASE("canonical coverage on the Sierpinski poset contains the open covers") {
    auto site = open_cover_site(FiniteSpace::sierpinski());
    auto canon = canonical_coverage(site.cat());
    REQUIRE(is_subcanonical(canon));
    auto gro = grothendieck_closure(site.coverage);
    // the open-cover coverage is subcanonical, so its closure sits inside
    const FinCategory& c = *site.cat();
    for (int u = 0; u < c.objects(); ++u)
        for (SieveMask m : gro.covering_sieves(u))
            REQUIRE(canon.contains(mask_family(c, u, m)));
}

TEST_CASE("meet coverage on a meet-semilattice") {
    Preorder chain{3, {{1, 1, 1}, {0, 1, 1}, {0, 0, 1}}};
    auto pcat = preorder_category(chain);
    auto mc = meet_coverage(pcat);
    REQUIRE(is_coverage(mc));
}

TEST_CASE("fixture registry") {
    for (const auto& name : fixture_names()) {
        auto fx = build_fixture(name);
        REQUIRE_FALSE(fx.sites.empty());
        for (auto& [n, cov] : fx.sites) REQUIRE(is_coverage(cov));
        for (auto& [n, s, x] : fx.presheaves) x.validate();
        for (auto& [n, s, m] : fx.maps) m.validate();
        for (auto& [n, s, t, f] : fx.functors) f.validate();
        for (auto& [n, s, a] : fx.points) a.validate();
    }
}
