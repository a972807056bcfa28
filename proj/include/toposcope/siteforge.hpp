#ifndef TOPOSCOPE_SITEFORGE_HPP
#define TOPOSCOPE_SITEFORGE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toposcope/sheaves.hpp"

namespace toposcope {

inline Coverage trivial_coverage(CatPtr c) { return make_coverage(c, {}); }

inline Coverage iso_coverage(CatPtr c) {
    std::vector<std::vector<Family>> covers(c->objects());
    for (int f = 0; f < c->morphisms(); ++f)
        if (c->is_iso(f)) covers[c->cod(f)].push_back(Family::make(*c, c->cod(f), {f}));
    return make_coverage(c, covers);
}

inline Coverage maximal_coverage(CatPtr c) {
    std::vector<std::vector<Family>> covers(c->objects());
    for (int u = 0; u < c->objects(); ++u)
        covers[u].push_back(mask_family(*c, u, maximal_sieve_mask(*c, u)));
    return make_coverage(c, covers);
}

// ---------------------------------------------------------------------------
// Finite topological spaces and their open-cover sites.

using PointSet = std::uint32_t;

struct FiniteSpace {
    int points = 0;
    std::vector<PointSet> opens; // ascending, contains 0 and the full set

    PointSet full() const { return points == 32 ? ~PointSet{0} : (PointSet{1} << points) - 1; }

    void validate() const {
        if (!std::is_sorted(opens.begin(), opens.end())) throw ValidationError("opens not sorted");
        auto has = [&](PointSet s) { return std::binary_search(opens.begin(), opens.end(), s); };
        if (!has(0) || !has(full())) throw ValidationError("topology misses empty or full set");
        for (PointSet a : opens)
            for (PointSet b : opens) {
                if (!has(a | b)) throw ValidationError("opens not closed under union");
                if (!has(a & b)) throw ValidationError("opens not closed under intersection");
            }
    }

    static FiniteSpace sierpinski() {
        // points x=0, y=1; opens: {}, {y}, {x,y}
        FiniteSpace s{2, {0b00, 0b10, 0b11}};
        s.validate();
        return s;
    }
    static FiniteSpace discrete(int n) {
        FiniteSpace s{n, {}};
        for (PointSet m = 0; m <= s.full(); ++m) s.opens.push_back(m);
        s.validate();
        return s;
    }
};

struct SpaceSite {
    FiniteSpace space;
    Coverage coverage;
    std::vector<PointSet> open_of_object; // object index -> open

    CatPtr cat() const { return coverage.cat; }
    int object_of_open(PointSet s) const {
        for (std::size_t i = 0; i < open_of_object.size(); ++i)
            if (open_of_object[i] == s) return static_cast<int>(i);
        throw UnknownObject("open set");
    }
};

/// The poset of opens under inclusion, with all union covers; the empty
/// open carries the empty cover, making it singular.
inline SpaceSite open_cover_site(const FiniteSpace& space, const SizeLimits& limits = SizeLimits::internal(),
                                 int cover_cap_bits = 20) {
    space.validate();
    std::vector<std::string> objs;
    for (PointSet s : space.opens) objs.push_back("O" + std::to_string(s));
    std::vector<MorDecl> mors;
    std::vector<std::map<PointSet, std::string>> incl(space.opens.size());
    std::vector<CompDecl> comps;
    auto idx_of = [&](PointSet s) {
        return static_cast<int>(std::lower_bound(space.opens.begin(), space.opens.end(), s) -
                                space.opens.begin());
    };
    std::vector<std::vector<std::string>> name(space.opens.size(),
                                               std::vector<std::string>(space.opens.size()));
    for (std::size_t a = 0; a < space.opens.size(); ++a)
        for (std::size_t b = 0; b < space.opens.size(); ++b)
            if (a != b && (space.opens[a] & ~space.opens[b]) == 0) {
                name[a][b] = "i" + std::to_string(space.opens[a]) + "_" + std::to_string(space.opens[b]);
                mors.push_back({name[a][b], static_cast<int>(a), static_cast<int>(b)});
            }
    for (std::size_t a = 0; a < space.opens.size(); ++a)
        for (std::size_t b = 0; b < space.opens.size(); ++b)
            for (std::size_t d = 0; d < space.opens.size(); ++d)
                if (a != b && b != d && a != d && !name[a][b].empty() && !name[b][d].empty() &&
                    !name[a][d].empty())
                    comps.push_back({name[b][d], name[a][b], name[a][d]});
    auto cat = std::make_shared<FinCategory>(validate_category(objs, mors, comps, limits));

    std::vector<std::vector<Family>> covers(cat->objects());
    for (std::size_t u = 0; u < space.opens.size(); ++u) {
        // subsets of opens below u whose union is u
        std::vector<int> below; // arrows into u
        for (int f : cat->arrows_into(static_cast<int>(u))) below.push_back(f);
        if (static_cast<int>(below.size()) > cover_cap_bits) throw SizeOverflow("open cover enumeration");
        for (SieveMask bits = 0; bits < (SieveMask{1} << below.size()); ++bits) {
            PointSet uni = 0;
            std::vector<int> members;
            for (std::size_t k = 0; k < below.size(); ++k)
                if (bits >> k & 1) {
                    members.push_back(below[k]);
                    uni |= space.opens[cat->dom(below[k])];
                }
            if (uni == space.opens[u]) covers[u].push_back(Family::make(*cat, static_cast<int>(u), members));
        }
    }
    SpaceSite out{space, make_coverage(cat, std::move(covers)), space.opens};
    return out;
}

// ---------------------------------------------------------------------------
// Alexandrov sites of finite preorders and the cellular equivalence.

struct Preorder {
    int n = 0;
    std::vector<std::vector<char>> le; // le[x][y] iff x <= y

    void validate() const {
        for (int x = 0; x < n; ++x)
            if (!le[x][x]) throw ValidationError("preorder not reflexive");
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    if (le[x][y] && le[y][z] && !le[x][z]) throw ValidationError("preorder not transitive");
    }

    PointSet upset(int x) const {
        PointSet s = 0;
        for (int y = 0; y < n; ++y)
            if (le[x][y]) s |= PointSet{1} << y;
        return s;
    }
};

inline FiniteSpace alexandrov_space(const Preorder& p) {
    p.validate();
    FiniteSpace s{p.n, {}};
    PointSet full = p.n == 32 ? ~PointSet{0} : (PointSet{1} << p.n) - 1;
    for (PointSet m = 0; m <= full; ++m) {
        bool up = true;
        for (int x = 0; x < p.n && up; ++x)
            if (m >> x & 1) up = (p.upset(x) & ~m) == 0;
        if (up) s.opens.push_back(m);
    }
    s.validate();
    return s;
}

struct AlexandrovSite {
    Preorder preorder;
    SpaceSite site;
    CatPtr pcat; // the preorder as a thin category, objects = points
};

inline CatPtr preorder_category(const Preorder& p) {
    std::vector<std::string> objs;
    for (int x = 0; x < p.n; ++x) objs.push_back("x" + std::to_string(x));
    std::vector<MorDecl> mors;
    std::vector<CompDecl> comps;
    std::vector<std::vector<std::string>> name(p.n, std::vector<std::string>(p.n));
    for (int x = 0; x < p.n; ++x)
        for (int y = 0; y < p.n; ++y)
            if (x != y && p.le[x][y]) {
                name[x][y] = "l" + std::to_string(x) + "_" + std::to_string(y);
                mors.push_back({name[x][y], x, y});
            }
    for (int x = 0; x < p.n; ++x)
        for (int y = 0; y < p.n; ++y)
            for (int z = 0; z < p.n; ++z)
                if (x != y && y != z && x != z && p.le[x][y] && p.le[y][z])
                    comps.push_back({name[y][z], name[x][y], name[x][z]});
    return std::make_shared<FinCategory>(validate_category(objs, mors, comps, SizeLimits::internal()));
}

inline AlexandrovSite alexandrov_site(const Preorder& p, int cover_cap_bits = 20) {
    AlexandrovSite out{p, open_cover_site(alexandrov_space(p), SizeLimits::internal(), cover_cap_bits),
                       preorder_category(p)};
    return out;
}

/// The most refined cover of an open: its points' up-sets.
inline Family min_cover(const AlexandrovSite& a, int object) {
    const FinCategory& c = *a.site.cat();
    PointSet u = a.site.open_of_object[object];
    std::vector<int> members;
    for (int x = 0; x < a.preorder.n; ++x) {
        if (!(u >> x & 1)) continue;
        int sub = a.site.object_of_open(a.preorder.upset(x));
        if (sub == object) {
            members.push_back(c.identity(object));
            continue;
        }
        for (int f : c.hom(sub, object)) members.push_back(f);
    }
    return Family::make(c, object, std::move(members));
}

/// phi(X)(x) = X(up-set of x), a covariant functor on the preorder.
inline SetDiagram cellular_phi(const AlexandrovSite& a, const Presheaf& x, bool check_sheaf = true) {
    if (check_sheaf && !is_sheaf(a.site.coverage, x)) throw NotASheaf("cellular_phi input");
    const FinCategory& oc = *a.site.cat();
    const FinCategory& pc = *a.pcat;
    SetDiagram out{a.pcat, {}, {}};
    std::vector<int> obj_of(a.preorder.n);
    for (int p = 0; p < a.preorder.n; ++p) {
        obj_of[p] = a.site.object_of_open(a.preorder.upset(p));
        out.at.push_back(x.at[obj_of[p]]);
    }
    out.act.assign(pc.morphisms(), FinFunction{});
    for (int m = 0; m < pc.morphisms(); ++m) {
        int p = pc.dom(m), q = pc.cod(m);
        if (pc.is_identity(m)) {
            out.act[m] = FinFunction::identity(out.at[p]);
            continue;
        }
        // up(q) ⊆ up(p): restrict along the inclusion
        auto hom = oc.hom(obj_of[q], obj_of[p]);
        out.act[m] = x.action[hom.front()];
    }
    out.validate();
    return out;
}

/// psi(F)(U) = compatible tuples over the points of U.
inline Presheaf cellular_psi(const AlexandrovSite& a, const SetDiagram& f) {
    const FinCategory& oc = *a.site.cat();
    const FinCategory& pc = *a.pcat;
    Presheaf out{a.site.cat(), {}, {}};
    std::vector<std::vector<std::vector<int>>> tuples(oc.objects());
    for (int u = 0; u < oc.objects(); ++u) {
        PointSet open = a.site.open_of_object[u];
        std::vector<int> pts;
        for (int p = 0; p < a.preorder.n; ++p)
            if (open >> p & 1) pts.push_back(p);
        std::vector<int> cur(pts.size(), 0);
        bool any_empty = false;
        for (int p : pts)
            if (f.at[p].size() == 0) any_empty = true;
        if (!any_empty) {
            while (true) {
                bool ok = true;
                for (std::size_t i = 0; i < pts.size() && ok; ++i)
                    for (std::size_t k = 0; k < pts.size() && ok; ++k) {
                        if (i == k || !a.preorder.le[pts[i]][pts[k]]) continue;
                        auto hom = pc.hom(pts[i], pts[k]);
                        ok = f.act[hom.front()].map[cur[i]] == cur[k];
                    }
                if (ok) tuples[u].push_back(cur);
                std::size_t i = 0;
                while (i < cur.size() && cur[i] == f.at[pts[i]].size() - 1) cur[i++] = 0;
                if (i == cur.size()) break;
                ++cur[i];
            }
            if (pts.empty()) {} // the single empty tuple is already recorded
        }
        if (pts.empty() && tuples[u].empty()) tuples[u].push_back({});
        FinSetObj s;
        for (std::size_t i = 0; i < tuples[u].size(); ++i) s.elements.push_back("t" + std::to_string(i));
        out.at.push_back(std::move(s));
    }
    out.action.assign(oc.morphisms(), FinFunction{});
    for (int m = 0; m < oc.morphisms(); ++m) {
        int usub = oc.dom(m), usup = oc.cod(m);
        PointSet sub = a.site.open_of_object[usub], sup = a.site.open_of_object[usup];
        std::vector<int> sup_pts, sub_pts;
        for (int p = 0; p < a.preorder.n; ++p) {
            if (sup >> p & 1) sup_pts.push_back(p);
            if (sub >> p & 1) sub_pts.push_back(p);
        }
        FinFunction act{out.at[usup], out.at[usub], {}};
        for (const auto& t : tuples[usup]) {
            std::vector<int> proj;
            for (int p : sub_pts) {
                int pos = -1;
                for (std::size_t k = 0; k < sup_pts.size(); ++k)
                    if (sup_pts[k] == p) pos = static_cast<int>(k);
                proj.push_back(t[pos]);
            }
            int idx = -1;
            for (std::size_t k = 0; k < tuples[usub].size(); ++k)
                if (tuples[usub][k] == proj) idx = static_cast<int>(k);
            if (idx < 0) throw ValidationError("internal: projected tuple missing");
            act.map.push_back(idx);
        }
        out.action[m] = std::move(act);
    }
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// The skeleton of finite sets with the jointly epimorphic coverage.

struct FinSetSite {
    Coverage coverage; // with sieve-representative semantics
    int n = 0;
    std::vector<std::vector<std::vector<int>>> graphs; // per morphism: none; see maps below
    std::vector<std::vector<int>> function_of;          // morphism -> its graph
};

inline FinSetSite finset_epi_site(int n, const SizeLimits& limits = SizeLimits{}) {
    if (n > 3) throw SizeOverflow("finite set skeleton beyond 3");
    std::vector<std::string> objs;
    for (int k = 0; k <= n; ++k) objs.push_back("N" + std::to_string(k));
    struct Fn {
        int m, k;
        std::vector<int> graph;
        std::string name;
    };
    std::vector<Fn> fns;
    for (int m = 0; m <= n; ++m)
        for (int k = 0; k <= n; ++k) {
            if (m > 0 && k == 0) continue;
            std::vector<int> g(m, 0);
            while (true) {
                bool is_id = m == k;
                for (int i = 0; i < m && is_id; ++i) is_id = g[i] == i;
                if (!is_id) {
                    std::string name = "f" + std::to_string(m) + "_" + std::to_string(k);
                    for (int v : g) name += std::to_string(v);
                    fns.push_back({m, k, g, name});
                }
                int i = 0;
                while (i < m && g[i] == k - 1) g[i++] = 0;
                if (i == m) break;
                ++g[i];
            }
            if (m == 0) {} // the empty function was added above (empty graph, not id unless k==0)
        }
    std::vector<MorDecl> mors;
    for (const Fn& f : fns) mors.push_back({f.name, f.m, f.k});
    auto graph_of = [&](int m, int k, const std::vector<int>& g) -> std::string {
        bool is_id = m == k;
        for (int i = 0; i < m && is_id; ++i) is_id = g[i] == i;
        if (is_id) return ""; // identity, named by the validator
        std::string name = "f" + std::to_string(m) + "_" + std::to_string(k);
        for (int v : g) name += std::to_string(v);
        return name;
    };
    std::vector<CompDecl> comps;
    for (const Fn& f : fns)
        for (const Fn& g : fns) {
            if (f.k != g.m) continue;
            std::vector<int> comp(f.m);
            for (int i = 0; i < f.m; ++i) comp[i] = g.graph[f.graph[i]];
            std::string nm = graph_of(f.m, g.k, comp);
            comps.push_back({g.name, f.name, nm.empty() ? "id_N" + std::to_string(f.m) : nm});
        }
    auto cat = std::make_shared<FinCategory>(validate_category(objs, mors, comps, limits));

    // Covering sieves are the jointly surjective ones.  Each is stored
    // through its canonical generating family of order-preserving
    // injections onto its maximal images: the truncated skeleton lacks
    // general pullbacks, but preimages of subset inclusions always
    // exist, which keeps the stored covers pullback-stable.
    auto image_of_arrow = [&](int f) -> int {
        if (cat->is_identity(f)) return (1 << cat->dom(f)) - 1;
        for (const Fn& fn : fns)
            if (fn.name == cat->morphism_name(f)) {
                int im = 0;
                for (int v : fn.graph) im |= 1 << v;
                return im;
            }
        throw ValidationError("internal: unknown arrow");
    };
    auto injection_onto = [&](int subset, int k) -> int {
        std::vector<int> g;
        for (int v = 0; v < k; ++v)
            if (subset >> v & 1) g.push_back(v);
        std::string nm = "f" + std::to_string(g.size()) + "_" + std::to_string(k);
        for (int v : g) nm += std::to_string(v);
        if (static_cast<int>(g.size()) == k) return cat->identity(k);
        return cat->morphism_index(nm);
    };
    std::vector<std::vector<Family>> covers(cat->objects());
    for (int k = 0; k <= n; ++k) {
        auto lat = enumerate_sieves_on(*cat, k);
        const auto& arrows = cat->arrows_into(k);
        for (SieveMask s : lat) {
            std::vector<int> images;
            int covered = 0;
            for (std::size_t a = 0; a < arrows.size(); ++a) {
                if (!(s >> a & 1)) continue;
                int im = image_of_arrow(arrows[a]);
                covered |= im;
                images.push_back(im);
            }
            if (covered != (1 << k) - 1) continue;
            std::vector<int> members;
            for (int im : images) {
                bool maximal = true;
                for (int other : images)
                    if (other != im && (im & ~other) == 0) maximal = false;
                if (maximal) members.push_back(injection_onto(im, k));
            }
            covers[k].push_back(Family::make(*cat, k, std::move(members)));
        }
    }
    FinSetSite out;
    out.n = n;
    out.coverage = make_coverage(cat, std::move(covers), /*sieve_semantics=*/true);
    return out;
}

// ---------------------------------------------------------------------------
// Derived sites.

struct SliceSite {
    Coverage coverage;
    FinFunctor projection;                 // to the base category
    std::vector<int> object_arrow;         // slice object -> arrow into U
};

inline SliceSite slice_site(const Coverage& j, int u) {
    const FinCategory& c = *j.cat;
    c.check_object(u);
    CategoryAssembler a;
    std::vector<int> object_arrow = c.arrows_into(u);
    std::vector<int> obj_of_arrow(c.morphisms(), -1);
    for (std::size_t i = 0; i < object_arrow.size(); ++i) {
        a.add_object("s_" + c.morphism_name(object_arrow[i]));
        obj_of_arrow[object_arrow[i]] = static_cast<int>(i);
    }
    struct M {
        int h;    // morphism in C
        int from; // slice object indices
        int to;
    };
    std::vector<M> ms;
    std::vector<std::map<int, int>> mor_of(object_arrow.size()); // [to][h] -> index
    for (std::size_t t = 0; t < object_arrow.size(); ++t) {
        int g = object_arrow[t];
        for (int h : c.arrows_into(c.dom(g))) {
            int f = c.compose(g, h); // the source object
            int from = obj_of_arrow[f];
            mor_of[t][h] = a.add_morphism("m_" + c.morphism_name(h) + "_" + c.morphism_name(g),
                                          from, static_cast<int>(t));
            ms.push_back({h, from, static_cast<int>(t)});
        }
    }
    auto cat = std::make_shared<FinCategory>(a.finish(
        [&](int o) { return mor_of[o].at(c.identity(c.dom(object_arrow[o]))); },
        [&](int g2, int f2) { return mor_of[ms[g2].to].at(c.compose(ms[g2].h, ms[f2].h)); }));

    std::vector<std::vector<Family>> covers(cat->objects());
    for (std::size_t t = 0; t < object_arrow.size(); ++t) {
        int g = object_arrow[t];
        for (const Family& r : j.covers[c.dom(g)]) {
            std::vector<int> members;
            for (int ri : r.members) members.push_back(mor_of[t].at(ri));
            covers[t].push_back(Family::make(*cat, static_cast<int>(t), std::move(members)));
        }
    }
    SliceSite out{make_coverage(cat, std::move(covers), j.sieve_semantics), {}, object_arrow};
    FinFunctor pr{cat, j.cat, {}, {}};
    for (int g : object_arrow) pr.obj_map.push_back(c.dom(g));
    for (const M& m : ms) pr.mor_map.push_back(m.h);
    pr.validate();
    out.projection = std::move(pr);
    return out;
}

struct SubSite {
    Coverage coverage;
    FinFunctor inclusion;
    std::vector<int> object_of; // subsite object -> base object
};

/// Full subcategory on the chosen objects with the induced coverage
/// r ∩ Mor(D).
inline SubSite induced_coverage(const Coverage& j, const std::vector<int>& objects) {
    const FinCategory& c = *j.cat;
    CategoryAssembler a;
    std::vector<int> obj_of = objects;
    std::vector<int> sub_of(c.objects(), -1);
    for (std::size_t i = 0; i < objects.size(); ++i) {
        a.add_object(c.object_name(objects[i]));
        sub_of[objects[i]] = static_cast<int>(i);
    }
    std::vector<int> mor_base; // subsite morphism -> base morphism
    std::vector<int> sub_mor(c.morphisms(), -1);
    for (int f = 0; f < c.morphisms(); ++f)
        if (sub_of[c.dom(f)] >= 0 && sub_of[c.cod(f)] >= 0) {
            sub_mor[f] = a.add_morphism(c.morphism_name(f), sub_of[c.dom(f)], sub_of[c.cod(f)]);
            mor_base.push_back(f);
        }
    auto cat = std::make_shared<FinCategory>(a.finish(
        [&](int o) { return sub_mor[c.identity(obj_of[o])]; },
        [&](int g, int f) { return sub_mor[c.compose(mor_base[g], mor_base[f])]; }));
    std::vector<std::vector<Family>> covers(cat->objects());
    for (std::size_t i = 0; i < objects.size(); ++i)
        for (const Family& r : j.covers[objects[i]]) {
            std::vector<int> members;
            for (int f : r.members)
                if (sub_mor[f] >= 0) members.push_back(sub_mor[f]);
            covers[i].push_back(Family::make(*cat, static_cast<int>(i), std::move(members)));
        }
    SubSite out{make_coverage(cat, std::move(covers), j.sieve_semantics), {}, obj_of};
    FinFunctor inc{cat, j.cat, obj_of, mor_base};
    inc.validate();
    out.inclusion = std::move(inc);
    return out;
}

/// Sieves whose pullback along every arrow is nonempty.
inline Coverage dense_coverage(CatPtr c) {
    const FinCategory& cat = *c;
    auto lat = sieve_lattice(cat);
    std::vector<std::vector<Family>> covers(cat.objects());
    for (int u = 0; u < cat.objects(); ++u)
        for (SieveMask s : lat.sieves[u]) {
            bool dense = true;
            for (int f : cat.arrows_into(u))
                if (pullback_sieve_mask(cat, f, s) == 0) {
                    dense = false;
                    break;
                }
            if (dense) covers[u].push_back(mask_family(cat, u, s));
        }
    return make_coverage(c, covers, false, /*sifted=*/true);
}

/// All nonempty sieves; requires the Ore condition.
inline Coverage atomic_coverage(CatPtr c) {
    if (!has_ore_condition(*c)) throw OreViolation("atomic coverage needs the Ore condition");
    const FinCategory& cat = *c;
    auto lat = sieve_lattice(cat);
    std::vector<std::vector<Family>> covers(cat.objects());
    for (int u = 0; u < cat.objects(); ++u)
        for (SieveMask s : lat.sieves[u])
            if (s != 0) covers[u].push_back(mask_family(cat, u, s));
    return make_coverage(c, covers, false, /*sifted=*/true);
}

/// Universal colimit sieves: every representable is a sheaf on the
/// sieve and on all of its pullbacks.
inline Coverage canonical_coverage(CatPtr c) {
    const FinCategory& cat = *c;
    auto lat = sieve_lattice(cat);
    std::vector<std::vector<char>> colimit(cat.objects());
    std::vector<Presheaf> reps;
    for (int v = 0; v < cat.objects(); ++v) reps.push_back(yoneda(c, v));
    for (int u = 0; u < cat.objects(); ++u) {
        colimit[u].assign(lat.size(u), 1);
        for (int i = 0; i < lat.size(u); ++i) {
            Sieve s = Sieve::from_mask(cat, u, lat.sieves[u][i]);
            for (int v = 0; v < cat.objects() && colimit[u][i]; ++v)
                colimit[u][i] = is_sheaf_on_sieve(cat, s, reps[v]);
        }
    }
    std::vector<std::vector<Family>> covers(cat.objects());
    for (int u = 0; u < cat.objects(); ++u)
        for (int i = 0; i < lat.size(u); ++i) {
            if (!colimit[u][i]) continue;
            bool universal = true;
            for (int f : cat.arrows_into(u)) {
                SieveMask pb = pullback_sieve_mask(cat, f, lat.sieves[u][i]);
                int k = lat.find(cat.dom(f), pb);
                if (k < 0 || !colimit[cat.dom(f)][k]) universal = false;
            }
            if (universal) covers[u].push_back(mask_family(cat, u, lat.sieves[u][i]));
        }
    return make_coverage(c, covers, false, /*sifted=*/true);
}

/// On a poset with meets: every inhabited family covers (each principal
/// down-set meets some member's down-set).
inline Coverage meet_coverage(CatPtr c, int cap_bits = 16) {
    const FinCategory& cat = *c;
    std::vector<std::vector<Family>> covers(cat.objects());
    for (int u = 0; u < cat.objects(); ++u) {
        int n = family_space_width(cat, u, cap_bits);
        for (SieveMask t = 1; t < (SieveMask{1} << n); ++t)
            covers[u].push_back(mask_family(cat, u, t));
    }
    return make_coverage(c, covers);
}

// ---------------------------------------------------------------------------
// Fixture registry.

/// A named bundle of sites and presheaf data, addressable from the CLI.
struct Fixture {
    std::vector<std::pair<std::string, Coverage>> sites;
    std::vector<std::tuple<std::string, std::string, Presheaf>> presheaves; // name, site, value
    std::vector<std::tuple<std::string, std::string, NatTrans>> maps;       // name, site, value
    // functor name, source site, target site, functor
    std::vector<std::tuple<std::string, std::string, std::string, FinFunctor>> functors;
    std::vector<std::tuple<std::string, std::string, SetDiagram>> points; // name, site, value
};

inline CatPtr chain_category() {
    return std::make_shared<FinCategory>(validate_category(
        {"U", "V", "W"}, {{"p", 1, 0}, {"q", 2, 1}, {"pq", 2, 0}}, {{"p", "q", "pq"}}));
}

inline Fixture fixture_remark() {
    auto c = chain_category();
    std::vector<std::vector<Family>> covers(3);
    covers[0] = {Family::make(*c, 0, {c->morphism_index("p")})};
    covers[1] = {Family::make(*c, 1, {c->morphism_index("q")})};
    Fixture out;
    out.sites.emplace_back("remark", make_coverage(c, covers));

    Presheaf x{c, {FinSetObj{{"a"}}, FinSetObj{{"b"}}, FinSetObj{{"c"}}}, {}};
    x.action.assign(c->morphisms(), FinFunction{});
    for (int u = 0; u < 3; ++u) x.action[c->identity(u)] = FinFunction::identity(x.at[u]);
    x.action[c->morphism_index("p")] = FinFunction{x.at[0], x.at[1], {0}};
    x.action[c->morphism_index("q")] = FinFunction{x.at[1], x.at[2], {0}};
    x.action[c->morphism_index("pq")] = FinFunction{x.at[0], x.at[2], {0}};
    x.validate();

    Presheaf y{c,
               {FinSetObj{{"alpha", "alphaP"}}, FinSetObj{{"beta", "betaP"}}, FinSetObj{{"gamma"}}},
               {}};
    y.action.assign(c->morphisms(), FinFunction{});
    for (int u = 0; u < 3; ++u) y.action[c->identity(u)] = FinFunction::identity(y.at[u]);
    y.action[c->morphism_index("p")] = FinFunction{y.at[0], y.at[1], {0, 1}};
    y.action[c->morphism_index("q")] = FinFunction{y.at[1], y.at[2], {0, 0}};
    y.action[c->morphism_index("pq")] = FinFunction{y.at[0], y.at[2], {0, 0}};
    y.validate();

    NatTrans f{x, y, {{0}, {0}, {0}}};
    f.validate();
    out.presheaves.emplace_back("X", "remark", x);
    out.presheaves.emplace_back("Y", "remark", y);
    out.maps.emplace_back("f", "remark", f);
    return out;
}

inline Fixture fixture_sierpinski() {
    auto site = open_cover_site(FiniteSpace::sierpinski());
    Fixture out;
    out.sites.emplace_back("sierpinski", site.coverage);
    // points of the space as covariant functors: singleton where the
    // open contains the point
    for (int pt = 0; pt < 2; ++pt) {
        SetDiagram a{site.cat(), {}, {}};
        const FinCategory& c = *site.cat();
        for (int u = 0; u < c.objects(); ++u)
            a.at.push_back(site.open_of_object[u] >> pt & 1 ? FinSetObj::singleton()
                                                            : FinSetObj{});
        for (int m = 0; m < c.morphisms(); ++m)
            a.act.push_back(FinFunction{a.at[c.dom(m)], a.at[c.cod(m)],
                                        std::vector<int>(a.at[c.dom(m)].size(), 0)});
        a.validate();
        out.points.emplace_back(pt == 0 ? "px" : "py", "sierpinski", a);
    }
    return out;
}

/// The basis sub-site of the Sierpinski site (the two nonempty opens)
/// together with its inclusion.
inline Fixture fixture_sierpinski_basis() {
    auto site = open_cover_site(FiniteSpace::sierpinski());
    std::vector<int> basis_objects;
    for (int u = 0; u < site.cat()->objects(); ++u)
        if (site.open_of_object[u] != 0) basis_objects.push_back(u);
    auto sub = induced_coverage(site.coverage, basis_objects);
    Fixture out;
    out.sites.emplace_back("basis", sub.coverage);
    out.sites.emplace_back("sierpinski", site.coverage);
    out.functors.emplace_back("inc", "basis", "sierpinski", sub.inclusion);
    return out;
}

inline Preorder vee_with_point() {
    // x0 <= x2, x1 <= x2, and an isolated x3
    Preorder p{4, std::vector<std::vector<char>>(4, std::vector<char>(4, 0))};
    for (int i = 0; i < 4; ++i) p.le[i][i] = 1;
    p.le[0][2] = p.le[1][2] = 1;
    return p;
}

/// A four-element Alexandrov site together with its minimal-up-set
/// subsite and the inclusion.
inline Fixture fixture_alexandrov() {
    auto a = alexandrov_site(vee_with_point());
    std::vector<int> min_objects;
    for (int x = 0; x < a.preorder.n; ++x) {
        int o = a.site.object_of_open(a.preorder.upset(x));
        if (std::find(min_objects.begin(), min_objects.end(), o) == min_objects.end())
            min_objects.push_back(o);
    }
    std::sort(min_objects.begin(), min_objects.end());
    auto sub = induced_coverage(a.site.coverage, min_objects);
    Fixture out;
    out.sites.emplace_back("upsets", sub.coverage);
    out.sites.emplace_back("alexandrov", a.site.coverage);
    out.functors.emplace_back("inc", "upsets", "alexandrov", sub.inclusion);
    return out;
}

inline Fixture fixture_finset(int n) {
    Fixture out;
    auto site = finset_epi_site(n);
    out.sites.emplace_back("finset" + std::to_string(n), site.coverage);
    // the identity point: each object as an honest finite set
    SetDiagram ident{site.coverage.cat, {}, {}};
    const FinCategory& c = *site.coverage.cat;
    for (int k = 0; k <= n; ++k) ident.at.push_back(FinSetObj::numbered(k, "e"));
    ident.act.assign(c.morphisms(), FinFunction{});
    for (int k = 0; k <= n; ++k) ident.act[c.identity(k)] = FinFunction::identity(ident.at[k]);
    for (int m = 0; m < c.morphisms(); ++m) {
        if (c.is_identity(m)) continue;
        // recover the graph from the name: f<m>_<k><digits>
        const std::string& name = c.morphism_name(m);
        auto underscore = name.find('_');
        std::vector<int> graph;
        for (std::size_t i = underscore + 2; i < name.size(); ++i) graph.push_back(name[i] - '0');
        ident.act[m] = FinFunction{ident.at[c.dom(m)], ident.at[c.cod(m)], graph};
    }
    ident.validate();
    out.points.emplace_back("ident", "finset" + std::to_string(n), ident);
    return out;
}

inline std::vector<std::string> fixture_names() {
    return {"remark", "sierpinski", "sierpinski_basis", "alexandrov", "finset2", "finset3"};
}

inline Fixture build_fixture(const std::string& name) {
    if (name == "remark") return fixture_remark();
    if (name == "sierpinski") return fixture_sierpinski();
    if (name == "sierpinski_basis") return fixture_sierpinski_basis();
    if (name == "alexandrov") return fixture_alexandrov();
    if (name == "finset2") return fixture_finset(2);
    if (name == "finset3") return fixture_finset(3);
    throw ValidationError("unknown fixture " + name);
}

} // namespace toposcope

#endif
