#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "toposcope/fincat.hpp"

using namespace toposcope;
using namespace toposcope::testing;

TEST_CASE("validate_category accepts the three-object chain") {
    auto c = remark_category();
    REQUIRE(c->objects() == 3);
    REQUIRE(c->morphisms() == 6); // 3 identities + p, q, pq
    int p = c->morphism_index("p"), q = c->morphism_index("q"), pq = c->morphism_index("pq");
    REQUIRE(c->compose(p, q) == pq);
    REQUIRE(c->dom(pq) == c->object_index("W"));
    REQUIRE(c->cod(pq) == c->object_index("U"));
}

TEST_CASE("validate_category builds the terminal category") {
    auto c = terminal_category();
    REQUIRE(c->objects() == 1);
    REQUIRE(c->morphisms() == 1);
    REQUIRE(c->is_identity(0));
}

TEST_CASE("validate_category rejects a mistyped composite") {
    // p∘q declared as p: the result's domain disagrees with dom q.
    REQUIRE_THROWS_AS(validate_category({"U", "V", "W"},
                                        {{"p", 1, 0}, {"q", 2, 1}},
                                        {{"p", "q", "p"}}),
                      MissingComposite);
}

TEST_CASE("validate_category reports a genuinely missing composite") {
    REQUIRE_THROWS_AS(validate_category({"U", "V", "W"},
                                        {{"p", 1, 0}, {"q", 2, 1}},
                                        {}),
                      MissingComposite);
}

TEST_CASE("validate_category derives forced composites") {
    // h∘(g∘f) forced from declared (h∘g)∘f on a 4-chain.
    auto c = validate_category({"A", "B", "C", "D"},
                               {{"f", 0, 1}, {"g", 1, 2}, {"h", 2, 3}, {"gf", 0, 2}, {"hg", 1, 3}, {"hgf", 0, 3}},
                               {{"g", "f", "gf"}, {"h", "g", "hg"}, {"hg", "f", "hgf"}});
    REQUIRE(c.compose(c.morphism_index("h"), c.morphism_index("gf")) == c.morphism_index("hgf"));
}

TEST_CASE("hom sets come out in canonical order") {
    auto c = remark_category();
    int U = c->object_index("U"), W = c->object_index("W");
    REQUIRE(c->hom(W, U) == std::vector<int>{c->morphism_index("pq")});
    REQUIRE(c->hom(U, U) == std::vector<int>{c->identity(U)});
    REQUIRE(c->hom(U, W).empty());
}

namespace {

// Independent filteredness oracle: cocones are searched for the empty
// diagram, every discrete pair, and every parallel pair directly.
bool filtered_oracle(const FinCategory& c) {
    if (c.objects() == 0) return false;
    for (int u = 0; u < c.objects(); ++u)
        for (int v = 0; v < c.objects(); ++v) {
            bool any = false;
            for (int fu = 0; fu < c.morphisms() && !any; ++fu)
                for (int fv = 0; fv < c.morphisms() && !any; ++fv)
                    any = c.dom(fu) == u && c.dom(fv) == v && c.cod(fu) == c.cod(fv);
            if (!any) return false;
        }
    for (int f = 0; f < c.morphisms(); ++f)
        for (int g = 0; g < c.morphisms(); ++g) {
            if (f == g || c.dom(f) != c.dom(g) || c.cod(f) != c.cod(g)) continue;
            bool any = false;
            for (int h = 0; h < c.morphisms() && !any; ++h)
                any = c.dom(h) == c.cod(f) && c.compose(h, f) == c.compose(h, g);
            if (!any) return false;
        }
    return true;
}

} // namespace

TEST_CASE("finite filteredness") {
    REQUIRE(is_finitely_filtered(*terminal_category()));
    REQUIRE_FALSE(is_finitely_filtered(*discrete_category(2)));
    // The chain category has a weakly terminal object, so it is filtered;
    // the oracle agrees.
    auto remark = remark_category();
    REQUIRE(is_finitely_filtered(*remark) == filtered_oracle(*remark));
    REQUIRE(is_finitely_filtered(*remark));

    std::mt19937 rng(7);
    for (int t = 0; t < 30; ++t) {
        auto c = random_filtered_poset(rng);
        REQUIRE(is_finitely_filtered(*c) == filtered_oracle(*c));
    }
}

TEST_CASE("limits: pullback of two injections is the intersection") {
    auto shape = cospan_category();
    FinSetObj two = FinSetObj::numbered(2, "c");
    FinSetObj one_a{{"a0"}}, one_b{{"b0"}};
    SetDiagram d{shape, {one_a, one_b, two}, {}};
    d.act.assign(shape->morphisms(), FinFunction{});
    for (int u = 0; u < 3; ++u) d.act[shape->identity(u)] = FinFunction::identity(d.at[u]);
    d.act[shape->morphism_index("f")] = FinFunction{one_a, two, {0}};
    d.act[shape->morphism_index("g")] = FinFunction{one_b, two, {1}};
    REQUIRE(limit_finset(d).apex.size() == 0); // disjoint images

    d.act[shape->morphism_index("g")] = FinFunction{one_b, two, {0}};
    REQUIRE(limit_finset(d).apex.size() == 1); // overlapping images
}

TEST_CASE("limits: equalizer of the fold and twisted fold") {
    // X <= X+X with (1,1) and (1,σ); only the left copy equalizes.
    auto shape = parallel_pair_category();
    FinSetObj xx = FinSetObj{{"x0", "x1", "y0", "y1"}};
    FinSetObj x = FinSetObj{{"x", "y"}};
    SetDiagram d{shape, {xx, x}, {}};
    d.act.assign(shape->morphisms(), FinFunction{});
    d.act[shape->identity(0)] = FinFunction::identity(xx);
    d.act[shape->identity(1)] = FinFunction::identity(x);
    d.act[shape->morphism_index("f")] = FinFunction{xx, x, {0, 1, 0, 1}}; // fold
    d.act[shape->morphism_index("g")] = FinFunction{xx, x, {0, 1, 1, 0}}; // fold after swap
    auto lim = limit_finset(d);
    REQUIRE(lim.apex.size() == 2);
}

TEST_CASE("limits: empty diagram gives a point") {
    auto shape = std::make_shared<FinCategory>(validate_category({}, {}, {}));
    SetDiagram d{shape, {}, {}};
    REQUIRE(limit_finset(d).apex.size() == 1);
}

TEST_CASE("colimits: the swap pushout collapses to a point") {
    auto shape = span_category();
    FinSetObj xx = FinSetObj{{"x0", "x1", "y0", "y1"}};
    FinSetObj x = FinSetObj{{"x", "y"}};
    SetDiagram d{shape, {xx, x, x}, {}};
    d.act.assign(shape->morphisms(), FinFunction{});
    d.act[shape->identity(0)] = FinFunction::identity(xx);
    d.act[shape->identity(1)] = FinFunction::identity(x);
    d.act[shape->identity(2)] = FinFunction::identity(x);
    d.act[shape->morphism_index("f")] = FinFunction{xx, x, {0, 1, 0, 1}};
    d.act[shape->morphism_index("g")] = FinFunction{xx, x, {0, 1, 1, 0}};
    auto colim = colimit_finset(d);
    REQUIRE(colim.apex.size() == 1);

    // The induced square X -> colim is not a pullback of * -> * <- X.
    FinFunction to_colim = colim.injections[1];
    FinSetObj pt = FinSetObj::singleton();
    FinFunction bang{x, pt, {0, 0}};
    FinFunction id_pt = FinFunction::identity(pt);
    REQUIRE_FALSE(is_pullback_square(bang, to_colim, id_pt, FinFunction{colim.apex, pt, {0}}));
}

TEST_CASE("colimits: one-object diagram and chains of inclusions") {
    auto one = terminal_category();
    FinSetObj s = FinSetObj::numbered(3);
    SetDiagram d{one, {s}, {FinFunction::identity(s)}};
    REQUIRE(colimit_finset(d).apex.size() == 3);

    auto chain = std::make_shared<FinCategory>(validate_category(
        {"a", "b", "c"}, {{"i", 0, 1}, {"j", 1, 2}, {"ji", 0, 2}}, {{"j", "i", "ji"}}));
    FinSetObj s1 = FinSetObj::numbered(1), s2 = FinSetObj::numbered(2), s3 = FinSetObj::numbered(3);
    SetDiagram e{chain, {s1, s2, s3}, {}};
    e.act.assign(chain->morphisms(), FinFunction{});
    for (int u = 0; u < 3; ++u) e.act[chain->identity(u)] = FinFunction::identity(e.at[u]);
    e.act[chain->morphism_index("i")] = FinFunction{s1, s2, {0}};
    e.act[chain->morphism_index("j")] = FinFunction{s2, s3, {0, 1}};
    e.act[chain->morphism_index("ji")] = FinFunction{s1, s3, {0}};
    REQUIRE(colimit_finset(e).apex.size() == 3);
}

TEST_CASE("cones and cocones satisfy every diagram arrow") {
    std::mt19937 rng(11);
    for (int t = 0; t < 25; ++t) {
        auto shape = random_filtered_poset(rng);
        auto d = random_diagram(rng, shape, 3);
        auto lim = limit_finset(d);
        for (int f = 0; f < shape->morphisms(); ++f)
            REQUIRE(FinFunction::compose(d.act[f], lim.projections[shape->dom(f)]).map ==
                    lim.projections[shape->cod(f)].map);
        auto colim = colimit_finset(d);
        for (int f = 0; f < shape->morphisms(); ++f)
            REQUIRE(FinFunction::compose(colim.injections[shape->cod(f)], d.act[f]).map ==
                    colim.injections[shape->dom(f)].map);
    }
}

TEST_CASE("equivalence relations in finite sets are effective") {
    std::mt19937 rng(13);
    auto shape = parallel_pair_category();
    for (int t = 0; t < 40; ++t) {
        std::uniform_int_distribution<int> nd(1, 6);
        int n = nd(rng);
        FinSetObj x = FinSetObj::numbered(n);
        // random partition -> equivalence relation
        std::vector<int> block(n);
        std::uniform_int_distribution<int> bd(0, n - 1);
        for (int i = 0; i < n; ++i) block[i] = bd(rng);
        std::vector<std::pair<int, int>> rel;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (block[a] == block[b]) rel.emplace_back(a, b);
        FinSetObj r = FinSetObj::numbered(static_cast<int>(rel.size()), "r");
        FinFunction s{r, x, {}}, tt{r, x, {}};
        for (auto [a, b] : rel) {
            s.map.push_back(a);
            tt.map.push_back(b);
        }
        SetDiagram d{shape, {r, x}, {}};
        d.act = {FinFunction::identity(r), FinFunction::identity(x), s, tt};
        // shape morphism order: id_a, id_b, f, g
        d.act.assign(shape->morphisms(), FinFunction{});
        d.act[shape->identity(0)] = FinFunction::identity(r);
        d.act[shape->identity(1)] = FinFunction::identity(x);
        d.act[shape->morphism_index("f")] = s;
        d.act[shape->morphism_index("g")] = tt;
        auto q = colimit_finset(d);
        const FinFunction& quot = q.injections[1];
        std::vector<std::pair<int, int>> kernel;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (quot.map[a] == quot.map[b]) kernel.emplace_back(a, b);
        REQUIRE(kernel == rel);
    }
}

TEST_CASE("filtered colimits commute with finite limits") {
    std::mt19937 rng(17);
    std::vector<CatPtr> finite_shapes{discrete_category(2), parallel_pair_category(), cospan_category()};
    for (int t = 0; t < 20; ++t) {
        auto idx = random_filtered_poset(rng);
        auto jshape = finite_shapes[t % finite_shapes.size()];
        // random functor D : I x J -> FinSet, represented as one diagram per i
        // compatible along I. We build it as a diagram on the product category.
        CategoryAssembler pa;
        std::vector<std::vector<int>> po(idx->objects(), std::vector<int>(jshape->objects()));
        for (int i = 0; i < idx->objects(); ++i)
            for (int j = 0; j < jshape->objects(); ++j)
                po[i][j] = pa.add_object(idx->object_name(i) + "*" + jshape->object_name(j));
        struct PM {
            int fi, fj;
        };
        std::vector<PM> pm;
        std::vector<std::vector<int>> pmor(idx->morphisms(), std::vector<int>(jshape->morphisms()));
        for (int fi = 0; fi < idx->morphisms(); ++fi)
            for (int fj = 0; fj < jshape->morphisms(); ++fj) {
                pmor[fi][fj] = pa.add_morphism("(" + idx->morphism_name(fi) + "," + jshape->morphism_name(fj) + ")",
                                               po[idx->dom(fi)][jshape->dom(fj)],
                                               po[idx->cod(fi)][jshape->cod(fj)]);
                pm.push_back({fi, fj});
            }
        auto product = std::make_shared<FinCategory>(pa.finish(
            [&](int u) {
                int i = u / jshape->objects(), j = u % jshape->objects();
                return pmor[idx->identity(i)][jshape->identity(j)];
            },
            [&](int g, int f) {
                return pmor[idx->compose(pm[g].fi, pm[f].fi)][jshape->compose(pm[g].fj, pm[f].fj)];
            }));
        auto d = random_diagram(rng, product, 2);

        // colim_I lim_J: limit per i, transition maps induced on tuples.
        std::vector<LimitResult> lims;
        for (int i = 0; i < idx->objects(); ++i) {
            SetDiagram di{jshape, {}, {}};
            for (int j = 0; j < jshape->objects(); ++j) di.at.push_back(d.at[po[i][j]]);
            for (int fj = 0; fj < jshape->morphisms(); ++fj)
                di.act.push_back(d.act[pmor[idx->identity(i)][fj]]);
            lims.push_back(limit_finset(di));
        }
        SetDiagram lim_diagram{idx, {}, {}};
        for (int i = 0; i < idx->objects(); ++i) lim_diagram.at.push_back(lims[i].apex);
        lim_diagram.act.assign(idx->morphisms(), FinFunction{});
        for (int fi = 0; fi < idx->morphisms(); ++fi) {
            int a = idx->dom(fi), b = idx->cod(fi);
            FinFunction step{lims[a].apex, lims[b].apex, {}};
            for (const auto& tup : lims[a].tuples) {
                std::vector<int> image(jshape->objects());
                for (int j = 0; j < jshape->objects(); ++j)
                    image[j] = d.act[pmor[fi][jshape->identity(j)]].map[tup[j]];
                int found = -1;
                for (std::size_t k = 0; k < lims[b].tuples.size(); ++k)
                    if (lims[b].tuples[k] == image) found = static_cast<int>(k);
                REQUIRE(found >= 0);
                step.map.push_back(found);
            }
            lim_diagram.act[fi] = step;
        }
        auto lhs = colimit_finset(lim_diagram);

        // lim_J colim_I: colimit per j, then compatible tuples.
        std::vector<ColimitResult> colims;
        for (int j = 0; j < jshape->objects(); ++j) {
            SetDiagram dj{idx, {}, {}};
            for (int i = 0; i < idx->objects(); ++i) dj.at.push_back(d.at[po[i][j]]);
            for (int fi = 0; fi < idx->morphisms(); ++fi)
                dj.act.push_back(d.act[pmor[fi][jshape->identity(j)]]);
            colims.push_back(colimit_finset(dj));
        }
        SetDiagram colim_diagram{jshape, {}, {}};
        for (int j = 0; j < jshape->objects(); ++j) colim_diagram.at.push_back(colims[j].apex);
        colim_diagram.act.assign(jshape->morphisms(), FinFunction{});
        for (int fj = 0; fj < jshape->morphisms(); ++fj) {
            int a = jshape->dom(fj), b = jshape->cod(fj);
            FinFunction step{colims[a].apex, colims[b].apex, {}};
            for (auto [i, x] : colims[a].representatives)
                step.map.push_back(colims[b].injections[i].map[d.act[pmor[idx->identity(i)][fj]].map[x]]);
            colim_diagram.act[fj] = step;
        }
        auto rhs = limit_finset(colim_diagram);

        // canonical comparison: class of (i, tuple) -> tuple of classes
        std::vector<int> comparison;
        for (auto [i, t_idx] : lhs.representatives) {
            std::vector<int> classes(jshape->objects());
            for (int j = 0; j < jshape->objects(); ++j)
                classes[j] = colims[j].injections[i].map[lims[i].tuples[t_idx][j]];
            int found = -1;
            for (std::size_t k = 0; k < rhs.tuples.size(); ++k)
                if (rhs.tuples[k] == classes) found = static_cast<int>(k);
            REQUIRE(found >= 0);
            comparison.push_back(found);
        }
        std::vector<int> sorted = comparison;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        REQUIRE(sorted.size() == comparison.size());       // injective
        REQUIRE(comparison.size() == rhs.tuples.size());   // surjective
    }
}

TEST_CASE("functor validation") {
    auto c = remark_category();
    auto f = FinFunctor::identity(c);
    REQUIRE_NOTHROW(f.validate());
    f.mor_map[c->morphism_index("pq")] = c->morphism_index("p");
    REQUIRE_THROWS_AS(f.validate(), ValidationError);
}
