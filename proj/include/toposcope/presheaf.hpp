#ifndef TOPOSCOPE_PRESHEAF_HPP
#define TOPOSCOPE_PRESHEAF_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "toposcope/fincat.hpp"

namespace toposcope {

/// Finite-set-valued contravariant functor.  action[f] maps values at
/// cod(f) to values at dom(f).
struct Presheaf {
    CatPtr base;
    std::vector<FinSetObj> at;
    std::vector<FinFunction> action;

    int size_at(int u) const { return at[u].size(); }
    int restrict_along(int f, int x) const { return action[f].map[x]; }

    void validate() const {
        const FinCategory& c = *base;
        if (static_cast<int>(at.size()) != c.objects() || static_cast<int>(action.size()) != c.morphisms())
            throw ValidationError("presheaf shape mismatch");
        for (int f = 0; f < c.morphisms(); ++f) {
            action[f].validate();
            if (!(action[f].dom == at[c.cod(f)]) || !(action[f].cod == at[c.dom(f)]))
                throw ValidationError("presheaf action endpoints mismatch at " + c.morphism_name(f));
        }
        for (int u = 0; u < c.objects(); ++u)
            if (!(action[c.identity(u)].map == FinFunction::identity(at[u]).map))
                throw ValidationError("presheaf breaks identity at " + c.object_name(u));
        for (int f = 0; f < c.morphisms(); ++f)
            for (int g = 0; g < c.morphisms(); ++g)
                if (c.composable(g, f) &&
                    !(action[c.compose(g, f)].map == FinFunction::compose(action[f], action[g]).map))
                    throw ValidationError("presheaf breaks contravariant composition at " + c.morphism_name(g) +
                                          " after " + c.morphism_name(f));
    }

    /// Structure signature ignoring element names; two presheaves with
    /// equal signatures are identical up to renaming carriers.
    std::vector<int> signature() const {
        std::vector<int> sig;
        for (const auto& s : at) sig.push_back(s.size());
        for (const auto& a : action) {
            sig.push_back(-1);
            sig.insert(sig.end(), a.map.begin(), a.map.end());
        }
        return sig;
    }
};

struct NatTrans {
    Presheaf src;
    Presheaf dst;
    std::vector<std::vector<int>> component; // per object: src.at[u] -> dst.at[u]

    int apply(int u, int x) const { return component[u][x]; }

    void validate() const {
        const FinCategory& c = *src.base;
        if (src.base.get() != dst.base.get() && !(src.base->objects() == dst.base->objects()))
            throw BaseMismatch("natural transformation across different bases");
        for (int u = 0; u < c.objects(); ++u) {
            if (static_cast<int>(component[u].size()) != src.at[u].size())
                throw ValidationError("component size mismatch at " + c.object_name(u));
            for (int y : component[u])
                if (y < 0 || y >= dst.at[u].size()) throw ValidationError("component out of range");
        }
        for (int f = 0; f < c.morphisms(); ++f) {
            int u = c.dom(f), v = c.cod(f);
            for (int x = 0; x < src.at[v].size(); ++x)
                if (component[u][src.action[f].map[x]] != dst.action[f].map[component[v][x]])
                    throw ValidationError("naturality fails at " + c.morphism_name(f));
        }
    }

    bool is_natural() const {
        try {
            validate();
            return true;
        } catch (const ToposError&) {
            return false;
        }
    }

    static NatTrans identity(const Presheaf& x) {
        NatTrans n{x, x, {}};
        for (const auto& s : x.at) {
            std::vector<int> id(s.elements.size());
            std::iota(id.begin(), id.end(), 0);
            n.component.push_back(std::move(id));
        }
        return n;
    }

    /// g after f.
    static NatTrans compose(const NatTrans& g, const NatTrans& f) {
        NatTrans n{f.src, g.dst, {}};
        for (std::size_t u = 0; u < f.component.size(); ++u) {
            std::vector<int> comp;
            comp.reserve(f.component[u].size());
            for (int x : f.component[u]) comp.push_back(g.component[u][x]);
            n.component.push_back(std::move(comp));
        }
        return n;
    }

    bool operator==(const NatTrans& o) const { return component == o.component; }
};

inline bool is_epi(const NatTrans& f) {
    for (std::size_t u = 0; u < f.component.size(); ++u) {
        std::vector<char> hit(f.dst.at[u].size(), 0);
        for (int y : f.component[u]) hit[y] = 1;
        for (char h : hit)
            if (!h) return false;
    }
    return true;
}

inline bool is_mono(const NatTrans& f) {
    for (std::size_t u = 0; u < f.component.size(); ++u) {
        std::vector<char> hit(f.dst.at[u].size(), 0);
        for (int y : f.component[u]) {
            if (hit[y]) return false;
            hit[y] = 1;
        }
    }
    return true;
}

inline bool is_natural_iso(const NatTrans& f) { return is_epi(f) && is_mono(f); }

inline Presheaf yoneda(CatPtr base, int u) {
    base->check_object(u);
    const FinCategory& c = *base;
    Presheaf y{base, {}, {}};
    std::vector<std::vector<int>> homs(c.objects());
    for (int v = 0; v < c.objects(); ++v) {
        homs[v] = c.hom(v, u);
        FinSetObj s;
        for (int f : homs[v]) s.elements.push_back(c.morphism_name(f));
        y.at.push_back(std::move(s));
    }
    auto index_in = [&](int v, int f) {
        for (std::size_t i = 0; i < homs[v].size(); ++i)
            if (homs[v][i] == f) return static_cast<int>(i);
        throw ValidationError("internal: missing hom element");
    };
    for (int f = 0; f < c.morphisms(); ++f) {
        int a = c.dom(f), b = c.cod(f);
        FinFunction act{y.at[b], y.at[a], {}};
        for (int g : homs[b]) act.map.push_back(index_in(a, c.compose(g, f)));
        y.action.push_back(std::move(act));
    }
    return y;
}

inline Presheaf terminal_presheaf(CatPtr base) {
    Presheaf t{base, {}, {}};
    for (int u = 0; u < base->objects(); ++u) t.at.push_back(FinSetObj::singleton());
    for (int f = 0; f < base->morphisms(); ++f)
        t.action.push_back(FinFunction{t.at[base->cod(f)], t.at[base->dom(f)], {0}});
    return t;
}

inline Presheaf empty_presheaf(CatPtr base) {
    Presheaf e{base, {}, {}};
    for (int u = 0; u < base->objects(); ++u) e.at.push_back(FinSetObj{});
    for (int f = 0; f < base->morphisms(); ++f)
        e.action.push_back(FinFunction{e.at[base->cod(f)], e.at[base->dom(f)], {}});
    return e;
}

/// Objectwise product with projection maps.
struct ProductResult {
    Presheaf product;
    NatTrans pr_left;
    NatTrans pr_right;
    std::vector<std::vector<std::pair<int, int>>> pairs; // per object
};

inline ProductResult product_presheaf(const Presheaf& x, const Presheaf& y) {
    const FinCategory& c = *x.base;
    ProductResult out{{x.base, {}, {}}, {}, {}, {}};
    out.pairs.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        FinSetObj s;
        for (int a = 0; a < x.at[u].size(); ++a)
            for (int b = 0; b < y.at[u].size(); ++b) {
                s.elements.push_back("(" + x.at[u].elements[a] + "," + y.at[u].elements[b] + ")");
                out.pairs[u].emplace_back(a, b);
            }
        out.product.at.push_back(std::move(s));
    }
    auto pair_index = [&](int u, int a, int b) { return a * y.at[u].size() + b; };
    for (int f = 0; f < c.morphisms(); ++f) {
        int u = c.dom(f), v = c.cod(f);
        FinFunction act{out.product.at[v], out.product.at[u], {}};
        for (auto [a, b] : out.pairs[v]) act.map.push_back(pair_index(u, x.action[f].map[a], y.action[f].map[b]));
        out.product.action.push_back(std::move(act));
    }
    out.pr_left = NatTrans{out.product, x, {}};
    out.pr_right = NatTrans{out.product, y, {}};
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<int> l, r;
        for (auto [a, b] : out.pairs[u]) {
            l.push_back(a);
            r.push_back(b);
        }
        out.pr_left.component.push_back(std::move(l));
        out.pr_right.component.push_back(std::move(r));
    }
    return out;
}

/// Sub-presheaf of a product: pairs with f(a) = g(b).
struct PullbackResult {
    Presheaf apex;
    NatTrans pr_left;  // to src of f
    NatTrans pr_right; // to src of g
    std::vector<std::vector<std::pair<int, int>>> pairs;
};

inline PullbackResult pullback_presheaf(const NatTrans& f, const NatTrans& g) {
    const FinCategory& c = *f.src.base;
    PullbackResult out{{f.src.base, {}, {}}, {}, {}, {}};
    out.pairs.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        FinSetObj s;
        for (int a = 0; a < f.src.at[u].size(); ++a)
            for (int b = 0; b < g.src.at[u].size(); ++b)
                if (f.component[u][a] == g.component[u][b]) {
                    s.elements.push_back("(" + f.src.at[u].elements[a] + "," + g.src.at[u].elements[b] + ")");
                    out.pairs[u].emplace_back(a, b);
                }
        out.apex.at.push_back(std::move(s));
    }
    auto pair_index = [&](int u, int a, int b) {
        for (std::size_t i = 0; i < out.pairs[u].size(); ++i)
            if (out.pairs[u][i] == std::pair<int, int>{a, b}) return static_cast<int>(i);
        throw ValidationError("internal: pullback pair missing");
    };
    for (int m = 0; m < c.morphisms(); ++m) {
        int u = c.dom(m), v = c.cod(m);
        FinFunction act{out.apex.at[v], out.apex.at[u], {}};
        for (auto [a, b] : out.pairs[v])
            act.map.push_back(pair_index(u, f.src.action[m].map[a], g.src.action[m].map[b]));
        out.apex.action.push_back(std::move(act));
    }
    out.pr_left = NatTrans{out.apex, f.src, {}};
    out.pr_right = NatTrans{out.apex, g.src, {}};
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<int> l, r;
        for (auto [a, b] : out.pairs[u]) {
            l.push_back(a);
            r.push_back(b);
        }
        out.pr_left.component.push_back(std::move(l));
        out.pr_right.component.push_back(std::move(r));
    }
    return out;
}

struct ImageFactorization {
    Presheaf image;
    NatTrans epi;  // X ->> im f
    NatTrans mono; // im f -> Y
};

inline ImageFactorization image_presheaf(const NatTrans& f) {
    const FinCategory& c = *f.src.base;
    ImageFactorization out{{f.src.base, {}, {}}, {}, {}};
    std::vector<std::vector<int>> kept(c.objects()); // dst indices in image, ascending
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<char> hit(f.dst.at[u].size(), 0);
        for (int y : f.component[u]) hit[y] = 1;
        FinSetObj s;
        for (int y = 0; y < f.dst.at[u].size(); ++y)
            if (hit[y]) {
                kept[u].push_back(y);
                s.elements.push_back(f.dst.at[u].elements[y]);
            }
        out.image.at.push_back(std::move(s));
    }
    auto kept_index = [&](int u, int y) {
        for (std::size_t i = 0; i < kept[u].size(); ++i)
            if (kept[u][i] == y) return static_cast<int>(i);
        throw ValidationError("internal: image not closed");
    };
    for (int m = 0; m < c.morphisms(); ++m) {
        int u = c.dom(m), v = c.cod(m);
        FinFunction act{out.image.at[v], out.image.at[u], {}};
        for (int y : kept[v]) act.map.push_back(kept_index(u, f.dst.action[m].map[y]));
        out.image.action.push_back(std::move(act));
    }
    out.epi = NatTrans{f.src, out.image, {}};
    out.mono = NatTrans{out.image, f.dst, {}};
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<int> e;
        for (int x = 0; x < f.src.at[u].size(); ++x) e.push_back(kept_index(u, f.component[u][x]));
        out.epi.component.push_back(std::move(e));
        out.mono.component.push_back(kept[u]);
    }
    return out;
}

/// Enumerates every natural transformation X -> Y in a canonical order
/// (lexicographic in flattened component assignments).  `budget` bounds
/// the number of search nodes.
inline std::vector<NatTrans> nat_trans_all(const Presheaf& x, const Presheaf& y,
                                           std::uint64_t budget = 20'000'000) {
    const FinCategory& c = *x.base;
    std::vector<std::pair<int, int>> slots; // (object, element)
    for (int u = 0; u < c.objects(); ++u)
        for (int e = 0; e < x.at[u].size(); ++e) slots.emplace_back(u, e);
    std::vector<std::vector<int>> comp(c.objects());
    for (int u = 0; u < c.objects(); ++u) comp[u].assign(x.at[u].size(), -1);
    std::vector<NatTrans> out;
    std::uint64_t steps = 0;

    // naturality checks touching only assigned slots
    auto consistent = [&](int u, int e) {
        for (int f = 0; f < c.morphisms(); ++f) {
            int a = c.dom(f), b = c.cod(f);
            if (a == u) {
                for (int xb = 0; xb < x.at[b].size(); ++xb) {
                    if (x.action[f].map[xb] != e || comp[b][xb] < 0) continue;
                    if (comp[u][e] != y.action[f].map[comp[b][xb]]) return false;
                }
            }
            if (b == u) {
                int xa = x.action[f].map[e];
                if (comp[a][xa] >= 0 && comp[a][xa] != y.action[f].map[comp[u][e]]) return false;
            }
        }
        return true;
    };

    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (++steps > budget) throw SizeOverflow("natural transformation enumeration");
        if (i == slots.size()) {
            NatTrans n{x, y, comp};
            out.push_back(std::move(n));
            return;
        }
        auto [u, e] = slots[i];
        for (int target = 0; target < y.at[u].size(); ++target) {
            comp[u][e] = target;
            if (consistent(u, e)) rec(i + 1);
        }
        comp[u][e] = -1;
    };
    rec(0);
    return out;
}

/// Internal hom [X,Y](U) = Nat(X x y(U), Y), with restriction given by
/// reindexing the representable factor.
inline Presheaf internal_hom(const Presheaf& x, const Presheaf& y, std::uint64_t budget = 20'000'000) {
    const FinCategory& c = *x.base;
    CatPtr base = x.base;
    std::vector<ProductResult> prods;
    std::vector<std::vector<NatTrans>> homs(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        prods.push_back(product_presheaf(x, yoneda(base, u)));
        homs[u] = nat_trans_all(prods[u].product, y, budget);
    }
    Presheaf h{base, {}, {}};
    for (int u = 0; u < c.objects(); ++u) {
        FinSetObj s;
        for (std::size_t i = 0; i < homs[u].size(); ++i) s.elements.push_back("phi" + std::to_string(i));
        h.at.push_back(std::move(s));
    }
    for (int f = 0; f < c.morphisms(); ++f) {
        int u = c.dom(f), v = c.cod(f);
        FinFunction act{h.at[v], h.at[u], {}};
        for (const NatTrans& phi : homs[v]) {
            // psi_W(x, g : W -> U) = phi_W(x, f∘g)
            NatTrans psi{prods[u].product, y, {}};
            for (int w = 0; w < c.objects(); ++w) {
                std::vector<int> compw;
                auto hom_wu = c.hom(w, u);
                auto hom_wv = c.hom(w, v);
                for (auto [a, gi] : prods[u].pairs[w]) {
                    int g = hom_wu[gi];
                    int fg = c.compose(f, g);
                    int fgi = -1;
                    for (std::size_t k = 0; k < hom_wv.size(); ++k)
                        if (hom_wv[k] == fg) fgi = static_cast<int>(k);
                    int pair_idx = a * static_cast<int>(hom_wv.size()) + fgi;
                    compw.push_back(phi.component[w][pair_idx]);
                }
                psi.component.push_back(std::move(compw));
            }
            int found = -1;
            for (std::size_t k = 0; k < homs[u].size(); ++k)
                if (homs[u][k].component == psi.component) found = static_cast<int>(k);
            if (found < 0) throw ValidationError("internal: hom restriction not found");
            act.map.push_back(found);
        }
        h.action.push_back(std::move(act));
    }
    return h;
}

struct CatOfElements {
    CatPtr cat;
    FinFunctor projection;
    std::vector<std::pair<int, int>> objects; // (base object, element)
};

/// Category of elements of a presheaf: objects (U, x in X(U)), a
/// morphism (U,x) -> (V,y) for each f : U -> V with X(f)(y) = x.
inline CatOfElements category_of_elements(const Presheaf& x) {
    const FinCategory& c = *x.base;
    CategoryAssembler a;
    CatOfElements out;
    std::vector<std::vector<int>> obj_of(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        obj_of[u].resize(x.at[u].size());
        for (int e = 0; e < x.at[u].size(); ++e) {
            obj_of[u][e] = a.add_object("(" + c.object_name(u) + "," + x.at[u].elements[e] + ")");
            out.objects.emplace_back(u, e);
        }
    }
    struct MorInfo {
        int f, y;
    };
    std::vector<MorInfo> minfo;
    std::vector<std::vector<int>> mor_of(c.morphisms());
    for (int f = 0; f < c.morphisms(); ++f) {
        int v = c.cod(f);
        mor_of[f].resize(x.at[v].size());
        for (int y = 0; y < x.at[v].size(); ++y) {
            int xx = x.action[f].map[y];
            mor_of[f][y] = a.add_morphism(c.morphism_name(f) + "@" + x.at[v].elements[y],
                                          obj_of[c.dom(f)][xx], obj_of[v][y]);
            minfo.push_back({f, y});
        }
    }
    auto cat = std::make_shared<FinCategory>(a.finish(
        [&](int o) {
            auto [u, e] = out.objects[o];
            return mor_of[c.identity(u)][e];
        },
        [&](int g, int f) {
            // g : (V,y)->(W,z), f : (U,x)->(V,y); composite over c.compose
            int gf = c.compose(minfo[g].f, minfo[f].f);
            return mor_of[gf][minfo[g].y];
        }));
    out.cat = cat;
    FinFunctor pr{cat, x.base, {}, {}};
    for (auto [u, e] : out.objects) pr.obj_map.push_back(u);
    for (const auto& m : minfo) pr.mor_map.push_back(m.f);
    out.projection = std::move(pr);
    return out;
}

/// Category of elements of a covariant set-valued functor.
inline CatOfElements elements_of_covariant(const SetDiagram& d) {
    const FinCategory& c = *d.shape;
    CategoryAssembler a;
    CatOfElements out;
    std::vector<std::vector<int>> obj_of(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        obj_of[u].resize(d.at[u].size());
        for (int e = 0; e < d.at[u].size(); ++e) {
            obj_of[u][e] = a.add_object("(" + c.object_name(u) + "," + d.at[u].elements[e] + ")");
            out.objects.emplace_back(u, e);
        }
    }
    struct MorInfo {
        int f, xdom;
    };
    std::vector<MorInfo> minfo;
    std::vector<std::vector<int>> mor_of(c.morphisms());
    for (int f = 0; f < c.morphisms(); ++f) {
        int u = c.dom(f);
        mor_of[f].resize(d.at[u].size());
        for (int xdom = 0; xdom < d.at[u].size(); ++xdom) {
            mor_of[f][xdom] = a.add_morphism(c.morphism_name(f) + "@" + d.at[u].elements[xdom],
                                             obj_of[u][xdom], obj_of[c.cod(f)][d.act[f].map[xdom]]);
            minfo.push_back({f, xdom});
        }
    }
    auto cat = std::make_shared<FinCategory>(a.finish(
        [&](int o) {
            auto [u, e] = out.objects[o];
            return mor_of[c.identity(u)][e];
        },
        [&](int g, int f) {
            int gf = c.compose(minfo[g].f, minfo[f].f);
            return mor_of[gf][minfo[f].xdom];
        }));
    out.cat = cat;
    FinFunctor pr{cat, d.shape, {}, {}};
    for (auto [u, e] : out.objects) pr.obj_map.push_back(u);
    for (const auto& m : minfo) pr.mor_map.push_back(m.f);
    out.projection = std::move(pr);
    return out;
}

/// Functor tensor product X ⊗_C A of a presheaf with a covariant
/// finite-set functor on the same base, as a coequalizer of the usual
/// pair.  Keeps the quotient data so maps out of the tensor can be built.
struct TensorResult {
    FinSetObj set;
    std::vector<std::vector<std::vector<int>>> class_of; // [u][x][a] -> class index
    std::vector<std::tuple<int, int, int>> representatives;
};

inline TensorResult tensor(const Presheaf& x, const SetDiagram& a) {
    const FinCategory& c = *x.base;
    std::vector<int> offset(c.objects() + 1, 0);
    for (int u = 0; u < c.objects(); ++u) offset[u + 1] = offset[u] + x.at[u].size() * a.at[u].size();
    const int total = offset[c.objects()];
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    auto unite = [&](int p, int q) {
        p = find(p);
        q = find(q);
        if (p != q) parent[std::max(p, q)] = std::min(p, q);
    };
    auto id_of = [&](int u, int xe, int ae) { return offset[u] + xe * a.at[u].size() + ae; };
    // (X(f)(x'), a) ~ (x', A(f)(a)) for f : U -> V, x' in X(V), a in A(U)
    for (int f = 0; f < c.morphisms(); ++f) {
        int u = c.dom(f), v = c.cod(f);
        for (int xv = 0; xv < x.at[v].size(); ++xv)
            for (int au = 0; au < a.at[u].size(); ++au)
                unite(id_of(u, x.action[f].map[xv], au), id_of(v, xv, a.act[f].map[au]));
    }
    TensorResult out;
    std::map<int, int> class_index;
    for (int i = 0; i < total; ++i) class_index.emplace(find(i), -1);
    int k = 0;
    for (auto& [root, idx] : class_index) idx = k++;
    out.class_of.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        out.class_of[u].assign(x.at[u].size(), std::vector<int>(a.at[u].size(), -1));
        for (int xe = 0; xe < x.at[u].size(); ++xe)
            for (int ae = 0; ae < a.at[u].size(); ++ae)
                out.class_of[u][xe][ae] = class_index[find(id_of(u, xe, ae))];
    }
    out.representatives.resize(class_index.size());
    for (auto& [root, idx] : class_index) {
        int u = 0;
        while (offset[u + 1] <= root) ++u;
        int rem = root - offset[u];
        out.representatives[idx] = {u, rem / a.at[u].size(), rem % a.at[u].size()};
    }
    for (auto [u, xe, ae] : out.representatives)
        out.set.elements.push_back("[" + x.at[u].elements[xe] + "⊗" + a.at[u].elements[ae] + "]");
    return out;
}

/// Restriction along a functor: (delta_F Y)(U) = Y(F(U)).
inline Presheaf delta(const FinFunctor& f, const Presheaf& y) {
    Presheaf out{f.src, {}, {}};
    for (int u = 0; u < f.src->objects(); ++u) out.at.push_back(y.at[f.obj_map[u]]);
    for (int m = 0; m < f.src->morphisms(); ++m) out.action.push_back(y.action[f.mor_map[m]]);
    return out;
}

/// Left Kan extension along F^op via the functor tensor product
/// (Sigma_F X)(V) = X ⊗_C D(V, F(-)).
inline Presheaf sigma(const FinFunctor& f, const Presheaf& x) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    std::vector<TensorResult> per_v;
    std::vector<std::vector<std::vector<int>>> hom_vfu(d.objects()); // [v][u] = hom(v, F(u))
    for (int v = 0; v < d.objects(); ++v) {
        SetDiagram av{f.src, {}, {}};
        hom_vfu[v].resize(c.objects());
        for (int u = 0; u < c.objects(); ++u) {
            hom_vfu[v][u] = d.hom(v, f.obj_map[u]);
            FinSetObj s;
            for (int g : hom_vfu[v][u]) s.elements.push_back(d.morphism_name(g));
            av.at.push_back(std::move(s));
        }
        for (int m = 0; m < c.morphisms(); ++m) {
            int u0 = c.dom(m), u1 = c.cod(m);
            FinFunction act{av.at[u0], av.at[u1], {}};
            for (int g : hom_vfu[v][u0]) {
                int fg = d.compose(f.mor_map[m], g);
                int idx = -1;
                for (std::size_t k = 0; k < hom_vfu[v][u1].size(); ++k)
                    if (hom_vfu[v][u1][k] == fg) idx = static_cast<int>(k);
                act.map.push_back(idx);
            }
            av.act.push_back(std::move(act));
        }
        per_v.push_back(tensor(x, av));
    }
    Presheaf out{f.dst, {}, {}};
    for (int v = 0; v < d.objects(); ++v) out.at.push_back(per_v[v].set);
    for (int m = 0; m < d.morphisms(); ++m) {
        int v0 = d.dom(m), v1 = d.cod(m);
        FinFunction act{out.at[v1], out.at[v0], {}};
        for (auto [u, xe, ge] : per_v[v1].representatives) {
            int g = hom_vfu[v1][u][ge];
            int gk = d.compose(g, m); // precompose with m : v0 -> v1
            int idx = -1;
            for (std::size_t k = 0; k < hom_vfu[v0][u].size(); ++k)
                if (hom_vfu[v0][u][k] == gk) idx = static_cast<int>(k);
            act.map.push_back(per_v[v0].class_of[u][xe][idx]);
        }
        out.action.push_back(std::move(act));
    }
    return out;
}

/// Right Kan extension along F^op: (Pi_F X)(V) = compatible families
/// over all pairs (U, g : F(U) -> V).
inline Presheaf pi(const FinFunctor& f, const Presheaf& x) {
    const FinCategory& c = *f.src;
    const FinCategory& d = *f.dst;
    struct Slot {
        int u, g;
    };
    std::vector<std::vector<Slot>> slots(d.objects());
    for (int v = 0; v < d.objects(); ++v)
        for (int u = 0; u < c.objects(); ++u)
            for (int g : d.hom(f.obj_map[u], v)) slots[v].push_back({u, g});
    // families (x_{(U,g)}) with X(h)(x_{(U,g)}) = x_{(U', g∘F(h))} for h : U' -> U
    std::vector<std::vector<std::vector<int>>> families(d.objects());
    for (int v = 0; v < d.objects(); ++v) {
        const auto& sl = slots[v];
        std::vector<int> cur(sl.size(), -1);
        auto slot_index = [&](int u, int g) {
            for (std::size_t i = 0; i < sl.size(); ++i)
                if (sl[i].u == u && sl[i].g == g) return static_cast<int>(i);
            return -1;
        };
        auto consistent = [&](std::size_t upto) {
            for (std::size_t i = 0; i <= upto; ++i)
                for (int h = 0; h < c.morphisms(); ++h) {
                    if (c.cod(h) != sl[i].u) continue;
                    int j = slot_index(c.dom(h), d.compose(sl[i].g, f.mor_map[h]));
                    if (j < 0 || static_cast<std::size_t>(j) > upto) continue;
                    if (x.action[h].map[cur[i]] != cur[j]) return false;
                }
            return true;
        };
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == sl.size()) {
                families[v].push_back(cur.empty() ? std::vector<int>{} : cur);
                if (sl.empty()) families[v].back() = {};
                return;
            }
            for (int e = 0; e < x.at[sl[i].u].size(); ++e) {
                cur[i] = e;
                if (consistent(i)) rec(i + 1);
            }
            cur[i] = -1;
        };
        rec(0);
    }
    Presheaf out{f.dst, {}, {}};
    for (int v = 0; v < d.objects(); ++v) {
        FinSetObj s;
        for (std::size_t i = 0; i < families[v].size(); ++i) s.elements.push_back("s" + std::to_string(i));
        out.at.push_back(std::move(s));
    }
    for (int m = 0; m < d.morphisms(); ++m) {
        int v0 = d.dom(m), v1 = d.cod(m);
        FinFunction act{out.at[v1], out.at[v0], {}};
        for (const auto& fam : families[v1]) {
            std::vector<int> restricted(slots[v0].size());
            for (std::size_t i = 0; i < slots[v0].size(); ++i) {
                int g = d.compose(m, slots[v0][i].g);
                int j = -1;
                for (std::size_t k = 0; k < slots[v1].size(); ++k)
                    if (slots[v1][k].u == slots[v0][i].u && slots[v1][k].g == g) j = static_cast<int>(k);
                restricted[i] = fam[j];
            }
            int found = -1;
            for (std::size_t k = 0; k < families[v0].size(); ++k)
                if (families[v0][k] == restricted) found = static_cast<int>(k);
            if (found < 0) throw ValidationError("internal: pi restriction missing");
            act.map.push_back(found);
        }
        out.action.push_back(std::move(act));
    }
    return out;
}

struct EquivalenceRelationCheck {
    bool jointly_mono = false;
    bool reflexive = false;
    bool symmetric = false;
    bool transitive = false;
    bool ok() const { return jointly_mono && reflexive && symmetric && transitive; }
};

inline EquivalenceRelationCheck is_equivalence_relation(const Presheaf& r, const NatTrans& s, const NatTrans& t) {
    const FinCategory& c = *r.base;
    const Presheaf& x = s.dst;
    EquivalenceRelationCheck out;
    out.jointly_mono = out.reflexive = out.symmetric = out.transitive = true;
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<std::pair<int, int>> pairs;
        for (int e = 0; e < r.at[u].size(); ++e) pairs.emplace_back(s.component[u][e], t.component[u][e]);
        auto has = [&](int a, int b) {
            return std::find(pairs.begin(), pairs.end(), std::pair<int, int>{a, b}) != pairs.end();
        };
        for (std::size_t i = 0; i < pairs.size(); ++i)
            for (std::size_t j = i + 1; j < pairs.size(); ++j)
                if (pairs[i] == pairs[j]) out.jointly_mono = false;
        for (int a = 0; a < x.at[u].size(); ++a)
            if (!has(a, a)) out.reflexive = false;
        for (auto [a, b] : pairs)
            if (!has(b, a)) out.symmetric = false;
        for (auto [a, b] : pairs)
            for (auto [b2, cc] : pairs)
                if (b == b2 && !has(a, cc)) out.transitive = false;
    }
    return out;
}

struct QuotientResult {
    Presheaf quotient;
    NatTrans projection;
};

/// Objectwise coequalizer of (s, t) : R => X.
inline QuotientResult quotient_presheaf(const Presheaf& x, const Presheaf& r, const NatTrans& s,
                                        const NatTrans& t) {
    if (!is_equivalence_relation(r, s, t).jointly_mono) throw NotARelation("pair (s,t) is not jointly injective");
    const FinCategory& c = *x.base;
    QuotientResult out{{x.base, {}, {}}, {}};
    std::vector<std::vector<int>> class_of(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<int> parent(x.at[u].size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
        for (int e = 0; e < r.at[u].size(); ++e) {
            int a = find(s.component[u][e]), b = find(t.component[u][e]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
        std::map<int, int> idx;
        for (int e = 0; e < x.at[u].size(); ++e) idx.emplace(find(e), -1);
        int k = 0;
        FinSetObj qs;
        for (auto& [root, i] : idx) {
            i = k++;
            qs.elements.push_back("[" + x.at[u].elements[root] + "]");
        }
        class_of[u].resize(x.at[u].size());
        for (int e = 0; e < x.at[u].size(); ++e) class_of[u][e] = idx[find(e)];
        out.quotient.at.push_back(std::move(qs));
    }
    for (int m = 0; m < c.morphisms(); ++m) {
        int u = c.dom(m), v = c.cod(m);
        FinFunction act{out.quotient.at[v], out.quotient.at[u], std::vector<int>(out.quotient.at[v].size(), -1)};
        for (int e = 0; e < x.at[v].size(); ++e) {
            int& slot = act.map[class_of[v][e]];
            int val = class_of[u][x.action[m].map[e]];
            if (slot != -1 && slot != val) throw ValidationError("quotient action ill-defined");
            slot = val;
        }
        out.quotient.action.push_back(std::move(act));
    }
    out.projection = NatTrans{x, out.quotient, class_of};
    return out;
}

/// Does coequalizing and pulling back recover the relation?
inline bool is_effective(const Presheaf& x, const Presheaf& r, const NatTrans& s, const NatTrans& t) {
    auto q = quotient_presheaf(x, r, s, t);
    const FinCategory& c = *x.base;
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<std::pair<int, int>> rel;
        for (int e = 0; e < r.at[u].size(); ++e) rel.emplace_back(s.component[u][e], t.component[u][e]);
        std::sort(rel.begin(), rel.end());
        std::vector<std::pair<int, int>> kernel;
        for (int a = 0; a < x.at[u].size(); ++a)
            for (int b = 0; b < x.at[u].size(); ++b)
                if (q.projection.component[u][a] == q.projection.component[u][b]) kernel.emplace_back(a, b);
        if (rel != kernel) return false;
    }
    return true;
}

/// Searches for a natural isomorphism X ≅ Y by elementwise backtracking.
inline std::optional<NatTrans> find_iso(const Presheaf& x, const Presheaf& y,
                                        std::uint64_t budget = 5'000'000) {
    const FinCategory& c = *x.base;
    for (int u = 0; u < c.objects(); ++u)
        if (x.at[u].size() != y.at[u].size()) return std::nullopt;
    std::vector<std::pair<int, int>> slots;
    for (int u = 0; u < c.objects(); ++u)
        for (int e = 0; e < x.at[u].size(); ++e) slots.emplace_back(u, e);
    std::vector<std::vector<int>> comp(c.objects());
    std::vector<std::vector<char>> used(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        comp[u].assign(x.at[u].size(), -1);
        used[u].assign(y.at[u].size(), 0);
    }
    std::uint64_t steps = 0;
    auto consistent = [&](int u, int e) {
        for (int f = 0; f < c.morphisms(); ++f) {
            int a = c.dom(f), b = c.cod(f);
            if (a == u)
                for (int xb = 0; xb < x.at[b].size(); ++xb) {
                    if (x.action[f].map[xb] != e || comp[b][xb] < 0) continue;
                    if (comp[u][e] != y.action[f].map[comp[b][xb]]) return false;
                }
            if (b == u) {
                int xa = x.action[f].map[e];
                if (comp[a][xa] >= 0 && comp[a][xa] != y.action[f].map[comp[u][e]]) return false;
            }
        }
        return true;
    };
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (++steps > budget) throw SizeOverflow("isomorphism search");
        if (i == slots.size()) return true;
        auto [u, e] = slots[i];
        for (int target = 0; target < y.at[u].size(); ++target) {
            if (used[u][target]) continue;
            comp[u][e] = target;
            used[u][target] = 1;
            if (consistent(u, e) && rec(i + 1)) return true;
            used[u][target] = 0;
        }
        comp[u][e] = -1;
        return false;
    };
    if (!rec(0)) return std::nullopt;
    return NatTrans{x, y, comp};
}

/// Every presheaf with all values of size <= max_size, on canonical
/// carriers, in a deterministic order.
inline std::vector<Presheaf> all_presheaves(CatPtr base, int max_size, std::uint64_t budget = 50'000'000) {
    const FinCategory& c = *base;
    std::vector<Presheaf> out;
    std::vector<int> sizes(c.objects(), 0);
    std::uint64_t steps = 0;

    std::function<void()> enumerate_actions = [&]() {
        Presheaf p{base, {}, {}};
        for (int u = 0; u < c.objects(); ++u)
            p.at.push_back(FinSetObj::numbered(sizes[u], c.object_name(u) + "."));
        p.action.assign(c.morphisms(), FinFunction{});
        for (int u = 0; u < c.objects(); ++u) p.action[c.identity(u)] = FinFunction::identity(p.at[u]);
        std::vector<int> free_mors;
        for (int f = 0; f < c.morphisms(); ++f)
            if (!c.is_identity(f)) {
                p.action[f] = FinFunction{p.at[c.cod(f)], p.at[c.dom(f)],
                                          std::vector<int>(p.at[c.cod(f)].size(), -1)};
                free_mors.push_back(f);
            }
        // assign one value slot at a time: slots are (morphism, element)
        std::vector<std::pair<int, int>> slots;
        for (int f : free_mors)
            for (int e = 0; e < p.at[c.cod(f)].size(); ++e) slots.emplace_back(f, e);
        auto consistent = [&](int) {
            for (int f = 0; f < c.morphisms(); ++f)
                for (int g = 0; g < c.morphisms(); ++g) {
                    if (!c.composable(g, f)) continue;
                    int gf = c.compose(g, f);
                    // X(gf) = X(f)∘X(g) wherever all three are assigned
                    for (int e = 0; e < p.at[c.cod(g)].size(); ++e) {
                        int via_g = p.action[g].map[e];
                        if (via_g < 0) continue;
                        int via_fg = p.action[f].map[via_g];
                        int direct = p.action[gf].map[e];
                        if (via_fg >= 0 && direct >= 0 && via_fg != direct) return false;
                    }
                }
            return true;
        };
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (++steps > budget) throw SizeOverflow("presheaf enumeration");
            if (i == slots.size()) {
                out.push_back(p);
                return;
            }
            auto [f, e] = slots[i];
            int n = p.at[c.dom(f)].size();
            for (int v = 0; v < n; ++v) {
                p.action[f].map[e] = v;
                if (consistent(f)) rec(i + 1);
            }
            p.action[f].map[e] = -1;
        };
        // empty-set feasibility: if some dom value is empty but codomain not
        bool feasible = true;
        for (int f : free_mors)
            if (p.at[c.dom(f)].size() == 0 && p.at[c.cod(f)].size() > 0) feasible = false;
        if (feasible) rec(0);
    };

    std::function<void(int)> pick_sizes = [&](int u) {
        if (u == c.objects()) {
            enumerate_actions();
            return;
        }
        for (int s = 0; s <= max_size; ++s) {
            sizes[u] = s;
            pick_sizes(u + 1);
        }
    };
    pick_sizes(0);
    return out;
}

} // namespace toposcope

#endif
