#ifndef TOPOSCOPE_SITEMORPH_HPP
#define TOPOSCOPE_SITEMORPH_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toposcope/sheafify.hpp"
#include "toposcope/siteforge.hpp"

namespace toposcope {

/// A functor between sites with cached classification results.
struct SiteFunctor {
    FinFunctor functor;
    Coverage src;
    Coverage dst;

    TriState set_flat = TriState::unknown;
    TriState rep_flat = TriState::unknown;
    TriState covering_flat = TriState::unknown;
    TriState preserves_saturating = TriState::unknown;
    TriState morphism = TriState::unknown;
    TriState comorphism = TriState::unknown;
    TriState dense = TriState::unknown;
};

inline bool is_set_flat(const SetDiagram& a) {
    return is_finitely_cofiltered(*elements_of_covariant(a).cat);
}

/// The comma category (V ↓ F): pairs (U, g : V -> F(U)).
inline CatPtr comma_under(const FinFunctor& f, int v) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    CategoryAssembler a;
    struct Obj {
        int u, g;
    };
    std::vector<Obj> objs;
    std::vector<std::map<int, int>> obj_of(c.objects()); // [u][g] -> object
    for (int u = 0; u < c.objects(); ++u)
        for (int g : d.hom(v, f.obj_map[u])) {
            obj_of[u][g] = a.add_object(c.object_name(u) + "/" + d.morphism_name(g));
            objs.push_back({u, g});
        }
    struct M {
        int h, from, to;
    };
    std::vector<M> ms;
    std::vector<std::map<std::pair<int, int>, int>> mor_of(objs.size()); // [from][(h,to)] -> idx
    for (std::size_t o = 0; o < objs.size(); ++o)
        for (int h : c.arrows_from(objs[o].u)) {
            int g2 = d.compose(f.mor_map[h], objs[o].g);
            int to = obj_of[c.cod(h)].at(g2);
            mor_of[o][{h, to}] = a.add_morphism("h" + std::to_string(o) + "_" + c.morphism_name(h),
                                                static_cast<int>(o), to);
            ms.push_back({h, static_cast<int>(o), to});
        }
    return std::make_shared<FinCategory>(a.finish(
        [&](int o) { return mor_of[o].at({c.identity(objs[o].u), o}); },
        [&](int g2, int f2) {
            int h = c.compose(ms[g2].h, ms[f2].h);
            return mor_of[ms[f2].from].at({h, ms[g2].to});
        }));
}

inline bool is_representably_flat(const FinFunctor& f) {
    for (int v = 0; v < f.dst->objects(); ++v)
        if (!is_finitely_cofiltered(*comma_under(f, v))) return false;
    return true;
}

/// Covering flatness via the locally-cofiltered criterion: for each of
/// the three conditions the set of arrows admitting the witness data is
/// a sieve, which must be covering in the closure of the target site.
inline bool is_covering_flat(const FinFunctor& f, const GroCoverage& dst_gro) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    for (int v = 0; v < d.objects(); ++v) {
        const auto& arrows = d.arrows_into(v);
        // (1) arrows r : V' -> V with some V' -> F(U)
        SieveMask w1 = 0;
        for (std::size_t a = 0; a < arrows.size(); ++a) {
            int vp = d.dom(arrows[a]);
            bool nonempty = false;
            for (int u = 0; u < c.objects() && !nonempty; ++u) nonempty = !d.hom(vp, f.obj_map[u]).empty();
            if (nonempty) w1 |= SieveMask{1} << a;
        }
        if (!dst_gro.is_covering(v, w1)) return false;
        // (2) spans over every pair of arrows into the image
        for (int u = 0; u < c.objects(); ++u)
            for (int up = 0; up < c.objects(); ++up)
                for (int g1 : d.hom(v, f.obj_map[u]))
                    for (int g2 : d.hom(v, f.obj_map[up])) {
                        SieveMask w2 = 0;
                        for (std::size_t a = 0; a < arrows.size(); ++a) {
                            int vp = d.dom(arrows[a]);
                            bool good = false;
                            for (int ui = 0; ui < c.objects() && !good; ++ui)
                                for (int h : d.hom(vp, f.obj_map[ui])) {
                                    bool f1ok = false, f2ok = false;
                                    for (int f1 : c.hom(ui, u))
                                        if (d.compose(f.mor_map[f1], h) == d.compose(g1, arrows[a])) f1ok = true;
                                    for (int f2 : c.hom(ui, up))
                                        if (d.compose(f.mor_map[f2], h) == d.compose(g2, arrows[a])) f2ok = true;
                                    if (f1ok && f2ok) {
                                        good = true;
                                        break;
                                    }
                                }
                            if (good) w2 |= SieveMask{1} << a;
                        }
                        if (!dst_gro.is_covering(v, w2)) return false;
                    }
        // (3) local coequalizing of parallel pairs
        for (int m1 = 0; m1 < c.morphisms(); ++m1)
            for (int m2 = 0; m2 < c.morphisms(); ++m2) {
                if (m1 == m2 || c.dom(m1) != c.dom(m2) || c.cod(m1) != c.cod(m2)) continue;
                int u = c.dom(m1);
                for (int h : d.hom(v, f.obj_map[u])) {
                    if (d.compose(f.mor_map[m1], h) != d.compose(f.mor_map[m2], h)) continue;
                    SieveMask w3 = 0;
                    for (std::size_t a = 0; a < arrows.size(); ++a) {
                        int vp = d.dom(arrows[a]);
                        bool good = false;
                        for (int ui = 0; ui < c.objects() && !good; ++ui)
                            for (int k : c.hom(ui, u)) {
                                if (c.compose(m1, k) != c.compose(m2, k)) continue;
                                for (int hi : d.hom(vp, f.obj_map[ui]))
                                    if (d.compose(f.mor_map[k], hi) == d.compose(h, arrows[a])) {
                                        good = true;
                                        break;
                                    }
                                if (good) break;
                            }
                        if (good) w3 |= SieveMask{1} << a;
                    }
                    if (!dst_gro.is_covering(v, w3)) return false;
                }
            }
    }
    return true;
}

/// Image sieve of F(S) for a sieve S on u.
inline SieveMask image_sieve_mask(const FinFunctor& f, int u, SieveMask s) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    const auto& arrows = c.arrows_into(u);
    SieveMask out = 0;
    for (std::size_t a = 0; a < arrows.size(); ++a)
        if (s >> a & 1) out |= principal_sieve_mask(d, f.mor_map[arrows[a]]);
    return out;
}

inline bool preserves_saturating_families(const FinFunctor& f, const GroCoverage& src_gro,
                                          const GroCoverage& dst_gro) {
    const FinCategory& c = *f.src;
    for (int u = 0; u < c.objects(); ++u)
        for (SieveMask s : src_gro.covering_sieves(u))
            if (!dst_gro.is_covering(f.obj_map[u], image_sieve_mask(f, u, s))) return false;
    return true;
}

inline bool is_site_morphism(const FinFunctor& f, const GroCoverage& src_gro, const GroCoverage& dst_gro) {
    return is_covering_flat(f, dst_gro) && preserves_saturating_families(f, src_gro, dst_gro);
}

inline bool is_comorphism(const FinFunctor& f, const GroCoverage& src_gro, const GroCoverage& dst_gro) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    for (int u = 0; u < c.objects(); ++u) {
        const auto& arrows = c.arrows_into(u);
        for (SieveMask sp : dst_gro.covering_sieves(f.obj_map[u])) {
            SieveMask preimage = 0;
            for (std::size_t a = 0; a < arrows.size(); ++a)
                if (sp >> d.into_index(f.mor_map[arrows[a]]) & 1) preimage |= SieveMask{1} << a;
            if (!src_gro.is_covering(u, preimage)) return false;
        }
    }
    return true;
}

struct DenseReport {
    bool d1 = false, d2 = false, d3 = false, d4 = false;
    bool ok() const { return d1 && d2 && d3 && d4; }
};

inline DenseReport check_dense(const FinFunctor& f, const GroCoverage& src_gro, const GroCoverage& dst_gro) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    DenseReport rep;
    // (D1) a sieve is covering iff its image sieve is covering
    rep.d1 = true;
    for (int u = 0; u < c.objects() && rep.d1; ++u)
        for (SieveMask s : src_gro.lattice.sieves[u]) {
            bool src_cov = src_gro.is_covering(u, s);
            bool dst_cov = dst_gro.is_covering(f.obj_map[u], image_sieve_mask(f, u, s));
            if (src_cov != dst_cov) {
                rep.d1 = false;
                break;
            }
        }
    // (D2) every target object is covered by arrows out of the image
    rep.d2 = true;
    for (int v = 0; v < d.objects() && rep.d2; ++v) {
        SieveMask candidates = 0;
        const auto& arrows = d.arrows_into(v);
        for (std::size_t a = 0; a < arrows.size(); ++a) {
            bool from_image = false;
            for (int u = 0; u < c.objects() && !from_image; ++u) from_image = f.obj_map[u] == d.dom(arrows[a]);
            if (from_image) candidates |= SieveMask{1} << a;
        }
        // the candidate family generates the relevant sieve
        SieveMask sieve = 0;
        for (std::size_t a = 0; a < arrows.size(); ++a)
            if (candidates >> a & 1) sieve |= principal_sieve_mask(d, arrows[a]);
        rep.d2 = dst_gro.is_covering(v, sieve);
    }
    // (D3) arrows between image objects are locally in the image
    rep.d3 = true;
    for (int u = 0; u < c.objects() && rep.d3; ++u)
        for (int up = 0; up < c.objects() && rep.d3; ++up)
            for (int g : d.hom(f.obj_map[u], f.obj_map[up])) {
                const auto& arrows = c.arrows_into(u);
                SieveMask good = 0;
                for (std::size_t a = 0; a < arrows.size(); ++a) {
                    bool ok = false;
                    for (int b : c.hom(c.dom(arrows[a]), up))
                        if (d.compose(g, f.mor_map[arrows[a]]) == f.mor_map[b]) {
                            ok = true;
                            break;
                        }
                    if (ok) good |= SieveMask{1} << a;
                }
                if (!src_gro.is_covering(u, good)) rep.d3 = false;
            }
    // (D4) arrows identified by F are locally equal
    rep.d4 = true;
    for (int m1 = 0; m1 < c.morphisms() && rep.d4; ++m1)
        for (int m2 = 0; m2 < c.morphisms() && rep.d4; ++m2) {
            if (m1 >= m2 || c.dom(m1) != c.dom(m2) || c.cod(m1) != c.cod(m2)) continue;
            if (f.mor_map[m1] != f.mor_map[m2]) continue;
            int u = c.dom(m1);
            const auto& arrows = c.arrows_into(u);
            SieveMask good = 0;
            for (std::size_t a = 0; a < arrows.size(); ++a)
                if (c.compose(m1, arrows[a]) == c.compose(m2, arrows[a])) good |= SieveMask{1} << a;
            if (!src_gro.is_covering(u, good)) rep.d4 = false;
        }
    return rep;
}

inline bool is_dense_morphism(const FinFunctor& f, const GroCoverage& src_gro, const GroCoverage& dst_gro) {
    return check_dense(f, src_gro, dst_gro).ok();
}

// ---------------------------------------------------------------------------
// Induced geometric morphism.

inline Presheaf direct_image(const FinFunctor& f, const GroCoverage& src_gro, const GroCoverage& dst_gro,
                             const Coverage& src_cov, const Coverage& dst_cov, const Presheaf& y) {
    if (!is_site_morphism(f, src_gro, dst_gro)) throw NotASiteMorphism("direct image");
    if (!is_sheaf(dst_cov, y)) throw NotASheaf("direct image input");
    Presheaf out = delta(f, y);
    if (!is_sheaf(src_cov, out)) throw NotASheaf("direct image output");
    return out;
}

inline SheafifyResult inverse_image(const FinFunctor& f, const GroCoverage& dst_gro, const Presheaf& x) {
    return sheafify(dst_gro, sigma(f, x));
}

/// Unit of the Kan adjunction at X: X(U) -> (Sigma_F X)(F(U)).
inline NatTrans kan_unit(const FinFunctor& f, const Presheaf& x, const Presheaf& sigma_x) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    NatTrans out{x, delta(f, sigma_x), {}};
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<int> comp;
        int fu = f.obj_map[u];
        // recompute the tensor class of (x ⊗ 1_{F(U)})
        SetDiagram av{f.src, {}, {}};
        std::vector<std::vector<int>> homs(c.objects());
        for (int u2 = 0; u2 < c.objects(); ++u2) {
            homs[u2] = d.hom(fu, f.obj_map[u2]);
            FinSetObj s;
            for (int g : homs[u2]) s.elements.push_back(d.morphism_name(g));
            av.at.push_back(std::move(s));
        }
        for (int m = 0; m < c.morphisms(); ++m) {
            int a0 = c.dom(m), b0 = c.cod(m);
            FinFunction act{av.at[a0], av.at[b0], {}};
            for (int g : homs[a0]) {
                int fg = d.compose(f.mor_map[m], g);
                int idx = -1;
                for (std::size_t k = 0; k < homs[b0].size(); ++k)
                    if (homs[b0][k] == fg) idx = static_cast<int>(k);
                act.map.push_back(idx);
            }
            av.act.push_back(std::move(act));
        }
        auto tr = tensor(x, av);
        if (tr.set.size() != sigma_x.at[fu].size())
            throw ValidationError("internal: kan unit tensor mismatch");
        int id_pos = -1;
        for (std::size_t k = 0; k < homs[u].size(); ++k)
            if (homs[u][k] == d.identity(fu)) id_pos = static_cast<int>(k);
        for (int e = 0; e < x.at[u].size(); ++e) comp.push_back(tr.class_of[u][e][id_pos]);
        out.component.push_back(std::move(comp));
    }
    out.validate();
    return out;
}

/// delta applied to a map of presheaves on the target site.
inline NatTrans delta_on_map(const FinFunctor& f, const NatTrans& n) {
    NatTrans out{delta(f, n.src), delta(f, n.dst), {}};
    for (int u = 0; u < f.src->objects(); ++u) out.component.push_back(n.component[f.obj_map[u]]);
    return out;
}

/// Kan counit at a presheaf y on the target: Sigma_F Delta_F Y -> Y.
inline NatTrans kan_counit(const FinFunctor& f, const Presheaf& y, const Presheaf& sigma_dy) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    Presheaf dy = delta(f, y);
    NatTrans out{sigma_dy, y, {}};
    for (int v = 0; v < d.objects(); ++v) {
        // rebuild the tensor to read off class representatives
        SetDiagram av{f.src, {}, {}};
        std::vector<std::vector<int>> homs(c.objects());
        for (int u = 0; u < c.objects(); ++u) {
            homs[u] = d.hom(v, f.obj_map[u]);
            FinSetObj s;
            for (int g : homs[u]) s.elements.push_back(d.morphism_name(g));
            av.at.push_back(std::move(s));
        }
        for (int m = 0; m < c.morphisms(); ++m) {
            int a0 = c.dom(m), b0 = c.cod(m);
            FinFunction act{av.at[a0], av.at[b0], {}};
            for (int g : homs[a0]) {
                int fg = d.compose(f.mor_map[m], g);
                int idx = -1;
                for (std::size_t k = 0; k < homs[b0].size(); ++k)
                    if (homs[b0][k] == fg) idx = static_cast<int>(k);
                act.map.push_back(idx);
            }
            av.act.push_back(std::move(act));
        }
        auto tr = tensor(dy, av);
        if (tr.set.size() != sigma_dy.at[v].size())
            throw ValidationError("internal: kan counit tensor mismatch");
        std::vector<int> comp;
        for (auto [u, ye, ge] : tr.representatives)
            comp.push_back(y.action[homs[u][ge]].map[ye]);
        out.component.push_back(std::move(comp));
    }
    out.validate();
    return out;
}

struct MoritaReport {
    bool ok = true;
    std::string witness;
};

/// Bounded Morita check: the unit and counit of the induced adjunction
/// must be isomorphisms on every supplied sheaf; hom-set bijections are
/// verified on a bounded sample of pairs.
inline MoritaReport check_morita(const FinFunctor& f, const Coverage& src_cov, const Coverage& dst_cov,
                                 const GroCoverage& src_gro, const GroCoverage& dst_gro,
                                 const std::vector<Presheaf>& src_sheaves,
                                 const std::vector<Presheaf>& dst_sheaves, int hom_sample = 40) {
    if (!is_dense_morphism(f, src_gro, dst_gro)) return {false, "functor is not site dense"};
    for (std::size_t i = 0; i < src_sheaves.size(); ++i) {
        const Presheaf& x = src_sheaves[i];
        auto sx = sigma(f, x);
        auto asx = sheafify(dst_gro, sx);
        auto unit = NatTrans::compose(delta_on_map(f, asx.unit), kan_unit(f, x, sx));
        if (!is_natural_iso(unit)) return {false, "unit not iso on source sheaf " + std::to_string(i)};
    }
    for (std::size_t i = 0; i < dst_sheaves.size(); ++i) {
        const Presheaf& y = dst_sheaves[i];
        auto dy = delta(f, y);
        if (!is_sheaf(src_cov, dy)) return {false, "direct image of sheaf " + std::to_string(i) + " not a sheaf"};
        auto sdy = sigma(f, dy);
        auto asdy = sheafify(dst_gro, sdy);
        // Kan counit: class of (y over F(U), g : V -> F(U)) -> Y(g)(y)
        NatTrans eps = kan_counit(f, y, sdy);
        auto factored = factor_through_sheafify(dst_gro, asdy, eps, y);
        if (!is_natural_iso(factored)) return {false, "counit not iso on target sheaf " + std::to_string(i)};
    }
    int done = 0;
    for (std::size_t i = 0; i < src_sheaves.size() && done < hom_sample; ++i)
        for (std::size_t k = 0; k < dst_sheaves.size() && done < hom_sample; ++k, ++done) {
            auto sx = sigma(f, src_sheaves[i]);
            auto asx = sheafify(dst_gro, sx);
            auto lhs = nat_trans_all(asx.sheaf, dst_sheaves[k]).size();
            auto rhs = nat_trans_all(src_sheaves[i], delta(f, dst_sheaves[k])).size();
            if (lhs != rhs) return {false, "hom sets differ on pair"};
        }
    return {true, ""};
}

// ---------------------------------------------------------------------------
// Points and stalks.

inline bool is_continuous(const Coverage& j, const SetDiagram& a) {
    const FinCategory& c = *j.cat;
    for (int u = 0; u < c.objects(); ++u)
        for (const Family& r : j.covers[u]) {
            std::vector<char> hit(a.at[u].size(), 0);
            for (int m : r.members)
                for (int e = 0; e < a.at[c.dom(m)].size(); ++e) hit[a.act[m].map[e]] = 1;
            for (char h : hit)
                if (!h) return false;
        }
    return true;
}

inline bool is_point(const Coverage& j, const SetDiagram& a) {
    return is_set_flat(a) && is_continuous(j, a);
}

inline FinSetObj stalk(const Presheaf& x, const SetDiagram& a) { return tensor(x, a).set; }

/// The induced map of stalks.
inline FinFunction stalk_map(const NatTrans& f, const SetDiagram& a) {
    auto tx = tensor(f.src, a);
    auto ty = tensor(f.dst, a);
    FinFunction out{tx.set, ty.set, std::vector<int>(tx.set.size(), -1)};
    for (std::size_t cls = 0; cls < tx.representatives.size(); ++cls) {
        auto [u, xe, ae] = tx.representatives[cls];
        out.map[cls] = ty.class_of[u][f.component[u][xe]][ae];
    }
    return out;
}

/// skyscraper(S)(U) = functions A(U) -> S.
inline Presheaf skyscraper(CatPtr base, const SetDiagram& a, const FinSetObj& s) {
    const FinCategory& c = *base;
    Presheaf out{base, {}, {}};
    std::vector<std::vector<std::vector<int>>> fns(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        int n = a.at[u].size();
        std::vector<int> cur(n, 0);
        if (s.size() == 0 && n > 0) {
            // no functions
        } else if (n == 0) {
            fns[u].push_back({});
        } else {
            while (true) {
                fns[u].push_back(cur);
                int i = 0;
                while (i < n && cur[i] == s.size() - 1) cur[i++] = 0;
                if (i == n) break;
                ++cur[i];
            }
        }
        FinSetObj so;
        for (std::size_t k = 0; k < fns[u].size(); ++k) so.elements.push_back("g" + std::to_string(k));
        out.at.push_back(std::move(so));
    }
    for (int m = 0; m < c.morphisms(); ++m) {
        int u = c.dom(m), v = c.cod(m);
        FinFunction act{out.at[v], out.at[u], {}};
        for (const auto& g : fns[v]) {
            std::vector<int> pre(a.at[u].size());
            for (int e = 0; e < a.at[u].size(); ++e) pre[e] = g[a.act[m].map[e]];
            int idx = -1;
            for (std::size_t k = 0; k < fns[u].size(); ++k)
                if (fns[u][k] == pre) idx = static_cast<int>(k);
            act.map.push_back(idx);
        }
        out.action.push_back(std::move(act));
    }
    out.validate();
    return out;
}

/// Subcanonical shortcut: the product of the points, as a functor to
/// powers of finite sets, must reflect isomorphisms on the base.
inline bool points_reflect_isos_on_base(const FinCategory& c, const std::vector<SetDiagram>& points) {
    for (int m = 0; m < c.morphisms(); ++m) {
        if (c.is_iso(m)) continue;
        bool all_bij = true;
        for (const SetDiagram& p : points)
            if (!p.act[m].is_bijective()) all_bij = false;
        if (all_bij) return false;
    }
    return true;
}

/// Direct definition on a supplied list of sheaves: maps whose stalks
/// are all bijective must be isomorphisms.
inline bool points_reflect_isos_direct(const Coverage& j, const std::vector<SetDiagram>& points,
                                       const std::vector<Presheaf>& sheaves) {
    for (const Presheaf& x : sheaves)
        for (const Presheaf& y : sheaves)
            for (const NatTrans& f : nat_trans_all(x, y)) {
                bool stalks_iso = true;
                for (const SetDiagram& p : points)
                    if (!stalk_map(f, p).is_bijective()) stalks_iso = false;
                if (stalks_iso && !is_natural_iso(f)) return false;
            }
    return true;
}

inline bool has_enough_points(const Coverage& j, const std::vector<SetDiagram>& points,
                              const std::vector<Presheaf>& sheaves_for_direct = {}) {
    for (const SetDiagram& p : points)
        if (!is_point(j, p)) return false;
    if (is_subcanonical(j)) return points_reflect_isos_on_base(*j.cat, points);
    return points_reflect_isos_direct(j, points, sheaves_for_direct);
}

/// Every sheaf with values of size <= bound, by filtering the presheaf
/// enumeration; only usable on small sites.
inline std::vector<Presheaf> all_sheaves(const Coverage& j, int bound,
                                         std::uint64_t budget = 50'000'000) {
    std::vector<Presheaf> out;
    for (auto& x : all_presheaves(j.cat, bound, budget))
        if (is_sheaf(j, x)) out.push_back(std::move(x));
    return out;
}

} // namespace toposcope

#endif
