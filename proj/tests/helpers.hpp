#ifndef TOPOSCOPE_TEST_HELPERS_HPP
#define TOPOSCOPE_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include "toposcope/fincat.hpp"

namespace toposcope::testing {

// The three-object chain W --q--> V --p--> U with p∘q = pq.
inline CatPtr remark_category() {
    auto c = validate_category({"U", "V", "W"},
                               {{"p", 1, 0}, {"q", 2, 1}, {"pq", 2, 0}},
                               {{"p", "q", "pq"}});
    return std::make_shared<FinCategory>(std::move(c));
}

inline CatPtr terminal_category() {
    return std::make_shared<FinCategory>(validate_category({"*"}, {}, {}));
}

inline CatPtr discrete_category(int n) {
    std::vector<std::string> objs;
    for (int i = 0; i < n; ++i) objs.push_back("d" + std::to_string(i));
    return std::make_shared<FinCategory>(validate_category(objs, {}, {}));
}

inline CatPtr parallel_pair_category() {
    return std::make_shared<FinCategory>(
        validate_category({"a", "b"}, {{"f", 0, 1}, {"g", 0, 1}}, {}));
}

inline CatPtr span_category() { // l <- m -> r
    return std::make_shared<FinCategory>(
        validate_category({"m", "l", "r"}, {{"f", 0, 1}, {"g", 0, 2}}, {}));
}

inline CatPtr cospan_category() { // l -> m <- r
    return std::make_shared<FinCategory>(
        validate_category({"l", "r", "m"}, {{"f", 0, 2}, {"g", 1, 2}}, {}));
}

/// Random finite poset as a thin category, with a top element appended
/// so the result is finitely filtered.
inline CatPtr random_filtered_poset(std::mt19937& rng, int max_base = 3) {
    std::uniform_int_distribution<int> nd(1, max_base);
    int n = nd(rng);
    // random partial order on 0..n-1 via random comparability of i<j
    std::vector<std::vector<char>> le(n + 1, std::vector<char>(n + 1, 0));
    for (int i = 0; i <= n; ++i) le[i][i] = 1;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) le[i][j] = 1;
    for (int k = 0; k <= n; ++k) // transitive closure
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                if (le[i][k] && le[k][j]) le[i][j] = 1;
    for (int i = 0; i < n; ++i) le[i][n] = 1; // top
    std::vector<std::string> objs;
    for (int i = 0; i <= n; ++i) objs.push_back("p" + std::to_string(i));
    std::vector<MorDecl> mors;
    std::vector<CompDecl> comps;
    std::vector<std::vector<std::string>> name(n + 1, std::vector<std::string>(n + 1));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            if (i != j && le[i][j]) {
                name[i][j] = "m" + std::to_string(i) + "_" + std::to_string(j);
                mors.push_back({name[i][j], i, j});
            }
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k)
                if (i != j && j != k && i != k && le[i][j] && le[j][k])
                    comps.push_back({name[j][k], name[i][j], name[i][k]});
    return std::make_shared<FinCategory>(validate_category(objs, mors, comps, SizeLimits::internal()));
}

inline FinSetObj random_finset(std::mt19937& rng, int max_size, const std::string& prefix = "x") {
    std::uniform_int_distribution<int> d(0, max_size);
    return FinSetObj::numbered(d(rng), prefix);
}

inline FinFunction random_function(std::mt19937& rng, const FinSetObj& dom, const FinSetObj& cod) {
    FinFunction f{dom, cod, {}};
    if (cod.size() == 0 && dom.size() > 0) throw ValidationError("no function into empty set");
    std::uniform_int_distribution<int> d(0, cod.size() - 1);
    for (int i = 0; i < dom.size(); ++i) f.map.push_back(cod.size() ? d(rng) : 0);
    return f;
}

/// Random covariant diagram on a category; sizes chosen so that every
/// action can be filled in (functorially, by choosing actions on a
/// generating set and deriving the rest would be overkill for thin
/// shapes, so we retry until composition holds).
inline SetDiagram random_diagram(std::mt19937& rng, CatPtr shape, int max_size) {
    const FinCategory& c = *shape;
    for (int attempt = 0; attempt < 200; ++attempt) {
        SetDiagram d;
        d.shape = shape;
        d.at.clear();
        for (int u = 0; u < c.objects(); ++u)
            d.at.push_back(random_finset(rng, max_size, c.object_name(u) + "_"));
        bool nonempty_ok = true;
        for (int f = 0; f < c.morphisms(); ++f)
            if (d.at[c.dom(f)].size() > 0 && d.at[c.cod(f)].size() == 0) nonempty_ok = false;
        if (!nonempty_ok) continue;
        d.act.assign(c.morphisms(), FinFunction{});
        for (int u = 0; u < c.objects(); ++u) d.act[c.identity(u)] = FinFunction::identity(d.at[u]);
        bool ok = true;
        for (int f = 0; f < c.morphisms() && ok; ++f) {
            if (c.is_identity(f)) continue;
            d.act[f] = random_function(rng, d.at[c.dom(f)], d.at[c.cod(f)]);
        }
        if (!ok) continue;
        // repair composites where forced; reject on conflict
        bool consistent = true;
        for (int rounds = 0; rounds < c.morphisms() && consistent; ++rounds)
            for (int f = 0; f < c.morphisms() && consistent; ++f)
                for (int g = 0; g < c.morphisms() && consistent; ++g) {
                    if (!c.composable(g, f)) continue;
                    auto want = FinFunction::compose(d.act[g], d.act[f]);
                    int gf = c.compose(g, f);
                    if (!c.is_identity(gf))
                        d.act[gf] = want;
                    else if (!(d.act[gf].map == want.map))
                        consistent = false;
                }
        if (!consistent) continue;
        try {
            d.validate();
            return d;
        } catch (const ToposError&) {
            continue;
        }
    }
    throw ValidationError("could not sample a random diagram");
}

} // namespace toposcope::testing

#include "toposcope/coverings.hpp"

namespace toposcope::testing {

inline Coverage remark_coverage(CatPtr c) {
    int U = c->object_index("U"), V = c->object_index("V"), W = c->object_index("W");
    std::vector<std::vector<Family>> covers(3);
    covers[U] = {Family::make(*c, U, {c->morphism_index("p")})};
    covers[V] = {Family::make(*c, V, {c->morphism_index("q")})};
    covers[W] = {};
    return make_coverage(c, covers);
}

inline Coverage trivial_cov(CatPtr c) { return make_coverage(c, {}); }

/// Random small category: a random preorder, optionally decorated with
/// one extra parallel arrow (kept only when a lawful composition table
/// exists).
inline CatPtr random_category(std::mt19937& rng, int max_objects = 5, int max_morphisms = 14) {
    while (true) {
        std::uniform_int_distribution<int> nd(1, max_objects);
        int n = nd(rng);
        std::vector<std::vector<char>> le(n, std::vector<char>(n, 0));
        for (int i = 0; i < n; ++i) le[i][i] = 1;
        std::uniform_int_distribution<int> coin(0, 3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && coin(rng) == 0) le[i][j] = 1;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (le[i][k] && le[k][j]) le[i][j] = 1;
        int count = n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && le[i][j]) ++count;
        if (count > max_morphisms) continue;
        std::vector<std::string> objs;
        for (int i = 0; i < n; ++i) objs.push_back("o" + std::to_string(i));
        std::vector<MorDecl> mors;
        std::vector<std::vector<std::string>> name(n, std::vector<std::string>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && le[i][j]) {
                    name[i][j] = "a" + std::to_string(i) + "_" + std::to_string(j);
                    mors.push_back({name[i][j], i, j});
                }
        std::vector<CompDecl> comps;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (i != j && j != k && i != k && le[i][j] && le[j][k] && le[i][k])
                        comps.push_back({name[j][k], name[i][j], name[i][k]});
        // cycles in the preorder need their round trips declared as identities
        bool has_cycle_issue = false;
        for (int i = 0; i < n && !has_cycle_issue; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && le[i][j] && le[j][i]) has_cycle_issue = true;
        if (has_cycle_issue) continue; // keep the generator simple: posets only

        if (count < max_morphisms && coin(rng) == 0 && !mors.empty()) {
            // duplicate one arrow; composites with the twin copy the original
            std::uniform_int_distribution<std::size_t> pick(0, mors.size() - 1);
            MorDecl orig = mors[pick(rng)];
            MorDecl twin{orig.name + "x", orig.dom, orig.cod};
            mors.push_back(twin);
            for (int i = 0; i < n; ++i) {
                if (i != orig.dom && le[i][orig.dom] && le[i][orig.cod])
                    comps.push_back({twin.name, name[i][orig.dom], name[i][orig.cod]});
                if (i != orig.cod && le[orig.cod][i] && le[orig.dom][i])
                    comps.push_back({name[orig.cod][i], twin.name, name[orig.dom][i]});
            }
            ++count;
        }
        try {
            return std::make_shared<FinCategory>(validate_category(objs, mors, comps));
        } catch (const ToposError&) {
            continue;
        }
    }
}

/// Random coverage: random small families, then repaired to satisfy the
/// coverage axiom by adding pullback sieves until stable.
inline Coverage random_coverage(std::mt19937& rng, CatPtr c) {
    const FinCategory& cat = *c;
    std::uniform_int_distribution<int> coin(0, 2);
    std::vector<std::vector<Family>> covers(cat.objects());
    for (int u = 0; u < cat.objects(); ++u) {
        if (coin(rng) != 0) continue;
        std::vector<int> pool;
        for (int f : cat.arrows_into(u))
            if (!cat.is_identity(f)) pool.push_back(f);
        if (pool.empty()) continue;
        std::vector<int> members;
        for (int f : pool)
            if (coin(rng) == 0) members.push_back(f);
        covers[u].push_back(Family::make(cat, u, members));
    }
    Coverage j = make_coverage(c, covers);
    for (int rounds = 0; rounds < 200; ++rounds) {
        auto viol = coverage_violation(j);
        if (!viol) break;
        if (viol->morphism < 0) throw ValidationError("random coverage lost its identities");
        SieveMask pb = pullback_sieve_mask(cat, viol->morphism,
                                           generated_sieve_mask(cat, viol->cover));
        int v = cat.dom(viol->morphism);
        auto patched = j.covers;
        patched[v].push_back(mask_family(cat, v, pb));
        j = make_coverage(c, patched);
    }
    if (!is_coverage(j)) throw ValidationError("random coverage repair failed");
    return j;
}

struct RandomSite {
    CatPtr cat;
    Coverage coverage;
};

inline RandomSite random_site(std::mt19937& rng, int max_objects = 5, int max_morphisms = 14) {
    auto c = random_category(rng, max_objects, max_morphisms);
    return RandomSite{c, random_coverage(rng, c)};
}

} // namespace toposcope::testing

#include "toposcope/presheaf.hpp"

namespace toposcope::testing {

// Presheaves of the counterexample on the chain site: X is the
// everywhere-singleton sheaf, Y has a doubled value at U and V.
inline Presheaf remark_X(CatPtr c) {
    Presheaf x{c, {}, {}};
    x.at = {FinSetObj{{"a"}}, FinSetObj{{"b"}}, FinSetObj{{"c"}}};
    x.action.assign(c->morphisms(), FinFunction{});
    for (int u = 0; u < 3; ++u) x.action[c->identity(u)] = FinFunction::identity(x.at[u]);
    x.action[c->morphism_index("p")] = FinFunction{x.at[0], x.at[1], {0}};
    x.action[c->morphism_index("q")] = FinFunction{x.at[1], x.at[2], {0}};
    x.action[c->morphism_index("pq")] = FinFunction{x.at[0], x.at[2], {0}};
    return x;
}

inline Presheaf remark_Y(CatPtr c) {
    Presheaf y{c, {}, {}};
    y.at = {FinSetObj{{"alpha", "alpha'"}}, FinSetObj{{"beta", "beta'"}}, FinSetObj{{"gamma"}}};
    y.action.assign(c->morphisms(), FinFunction{});
    for (int u = 0; u < 3; ++u) y.action[c->identity(u)] = FinFunction::identity(y.at[u]);
    y.action[c->morphism_index("p")] = FinFunction{y.at[0], y.at[1], {0, 1}};
    y.action[c->morphism_index("q")] = FinFunction{y.at[1], y.at[2], {0, 0}};
    y.action[c->morphism_index("pq")] = FinFunction{y.at[0], y.at[2], {0, 0}};
    return y;
}

inline NatTrans remark_f(const Presheaf& x, const Presheaf& y) {
    NatTrans f{x, y, {{0}, {0}, {0}}};
    f.validate();
    return f;
}

inline Presheaf random_presheaf(std::mt19937& rng, CatPtr c, int max_size) {
    auto op = std::make_shared<FinCategory>(opposite(*c));
    auto d = random_diagram(rng, op, max_size);
    Presheaf p{c, d.at, d.act};
    p.validate();
    return p;
}

inline std::optional<NatTrans> random_nat_trans(std::mt19937& rng, const Presheaf& x, const Presheaf& y) {
    auto all = nat_trans_all(x, y);
    if (all.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> d(0, all.size() - 1);
    return all[d(rng)];
}

/// Random monotone map between two thin (poset) categories, as a functor.
inline std::optional<FinFunctor> random_thin_functor(std::mt19937& rng, CatPtr src, CatPtr dst) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        FinFunctor f{src, dst, {}, {}};
        std::uniform_int_distribution<int> od(0, dst->objects() - 1);
        f.obj_map.resize(src->objects());
        for (int u = 0; u < src->objects(); ++u) f.obj_map[u] = od(rng);
        bool ok = true;
        f.mor_map.assign(src->morphisms(), -1);
        for (int m = 0; m < src->morphisms() && ok; ++m) {
            auto hom = dst->hom(f.obj_map[src->dom(m)], f.obj_map[src->cod(m)]);
            if (hom.empty())
                ok = false;
            else
                f.mor_map[m] = hom.front(); // thin target: unique
        }
        if (!ok) continue;
        try {
            f.validate();
            return f;
        } catch (const ToposError&) {
            continue;
        }
    }
    return std::nullopt;
}

} // namespace toposcope::testing

#endif
