#ifndef TOPOSCOPE_FINCAT_HPP
#define TOPOSCOPE_FINCAT_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "toposcope/errors.hpp"

namespace toposcope {

/// Caps on the structures we are willing to build.  Closure computations
/// downstream are exponential, so the defaults are deliberately small;
/// callers may pass larger limits where they know what they are doing.
struct SizeLimits {
    int max_objects = 10;
    int max_morphisms = 64;
    int max_elements = 64;

    static SizeLimits internal() { return SizeLimits{4096, 4096, 100000}; }
};

struct MorDecl {
    std::string name;
    int dom = -1;
    int cod = -1;
};

/// Declared composite: after ∘ first = result (all morphism names).
struct CompDecl {
    std::string after;
    std::string first;
    std::string result;
};

/// A finite category with a total, validated composition table.
/// Identities occupy morphism indices 0..objects-1 in object order;
/// declared morphisms follow in declaration order.  All set-valued
/// queries are emitted in index order, so every operation downstream is
/// deterministic.
class FinCategory {
public:
    FinCategory() = default;

    int objects() const { return static_cast<int>(obj_names_.size()); }
    int morphisms() const { return static_cast<int>(mors_.size()); }

    const std::string& object_name(int u) const { return obj_names_[u]; }
    const std::string& morphism_name(int f) const { return mors_[f].name; }
    int dom(int f) const { return mors_[f].dom; }
    int cod(int f) const { return mors_[f].cod; }
    int identity(int u) const { return identity_[u]; }
    bool is_identity(int f) const { return f < objects() && identity_[mors_[f].dom] == f; }

    /// g∘f, or -1 when cod(f) != dom(g).
    int compose(int g, int f) const { return comp_[static_cast<std::size_t>(g) * mors_.size() + f]; }

    bool composable(int g, int f) const { return cod(f) == dom(g); }

    /// All f : U -> V in index order.
    std::vector<int> hom(int u, int v) const {
        check_object(u);
        check_object(v);
        std::vector<int> out;
        for (int f = 0; f < morphisms(); ++f)
            if (mors_[f].dom == u && mors_[f].cod == v) out.push_back(f);
        return out;
    }

    /// All morphisms with codomain U, in index order.
    const std::vector<int>& arrows_into(int u) const { return into_[u]; }
    const std::vector<int>& arrows_from(int u) const { return from_[u]; }

    /// Position of morphism f within arrows_into(cod f).
    int into_index(int f) const { return into_index_[f]; }

    int object_index(const std::string& name) const {
        for (int u = 0; u < objects(); ++u)
            if (obj_names_[u] == name) return u;
        throw UnknownObject(name);
    }
    int morphism_index(const std::string& name) const {
        for (int f = 0; f < morphisms(); ++f)
            if (mors_[f].name == name) return f;
        throw UnknownMorphism(name);
    }

    bool is_iso(int f) const {
        for (int g : hom(cod(f), dom(f)))
            if (compose(g, f) == identity(dom(f)) && compose(f, g) == identity(cod(f))) return true;
        return false;
    }

    void check_object(int u) const {
        if (u < 0 || u >= objects()) throw UnknownObject("object index " + std::to_string(u));
    }

    friend FinCategory validate_category(const std::vector<std::string>&, const std::vector<MorDecl>&,
                                         const std::vector<CompDecl>&, const SizeLimits&);
    friend FinCategory make_category_raw(std::vector<std::string>, std::vector<MorDecl>, std::vector<int>,
                                         std::vector<int>, bool);

private:
    std::vector<std::string> obj_names_;
    std::vector<MorDecl> mors_;
    std::vector<int> identity_;
    std::vector<int> comp_;
    std::vector<std::vector<int>> into_;
    std::vector<std::vector<int>> from_;
    std::vector<int> into_index_;

    void build_indexes() {
        into_.assign(obj_names_.size(), {});
        from_.assign(obj_names_.size(), {});
        into_index_.assign(mors_.size(), -1);
        for (int f = 0; f < morphisms(); ++f) {
            into_index_[f] = static_cast<int>(into_[mors_[f].cod].size());
            into_[mors_[f].cod].push_back(f);
            from_[mors_[f].dom].push_back(f);
        }
    }

    void check_laws() const {
        const int n = morphisms();
        for (int f = 0; f < n; ++f) {
            int l = compose(identity_[mors_[f].cod], f);
            int r = compose(f, identity_[mors_[f].dom]);
            if (l != f || r != f)
                throw IdViolation("identity law fails at " + mors_[f].name);
        }
        for (int f = 0; f < n; ++f)
            for (int g = 0; g < n; ++g) {
                if (!composable(g, f)) continue;
                int gf = compose(g, f);
                if (gf < 0) throw MissingComposite(mors_[g].name + " after " + mors_[f].name);
                if (mors_[gf].dom != mors_[f].dom || mors_[gf].cod != mors_[g].cod)
                    throw ValidationError("composite " + mors_[gf].name + " has wrong endpoints");
                for (int h = 0; h < n; ++h) {
                    if (!composable(h, g)) continue;
                    int hg = compose(h, g);
                    if (compose(h, gf) != compose(hg, f))
                        throw AssocViolation(mors_[h].name + ", " + mors_[g].name + ", " + mors_[f].name);
                }
            }
    }
};

using CatPtr = std::shared_ptr<const FinCategory>;

/// Assembles a category from complete raw tables.  Used by builders of
/// derived categories (opposite, comma, ...) where the laws hold by
/// construction; set `check` to re-verify anyway.
inline FinCategory make_category_raw(std::vector<std::string> objs, std::vector<MorDecl> mors,
                                     std::vector<int> identity, std::vector<int> comp, bool check = false) {
    FinCategory c;
    c.obj_names_ = std::move(objs);
    c.mors_ = std::move(mors);
    c.identity_ = std::move(identity);
    c.comp_ = std::move(comp);
    c.build_indexes();
    if (check) c.check_laws();
    return c;
}

/// Validates raw category data.  Identities are synthesized (never
/// declared); composites forced by the declared ones are derived via
/// associativity, and any remaining composable pair without a composite
/// is reported as MissingComposite.
inline FinCategory validate_category(const std::vector<std::string>& objects,
                                     const std::vector<MorDecl>& morphisms,
                                     const std::vector<CompDecl>& composites,
                                     const SizeLimits& limits = SizeLimits{}) {
    if (static_cast<int>(objects.size()) > limits.max_objects)
        throw SizeOverflow("objects: " + std::to_string(objects.size()) + " > " + std::to_string(limits.max_objects));
    FinCategory c;
    c.obj_names_ = objects;
    for (std::size_t i = 0; i < objects.size(); ++i)
        for (std::size_t j = i + 1; j < objects.size(); ++j)
            if (objects[i] == objects[j]) throw ValidationError("duplicate object " + objects[i]);

    const int nobj = static_cast<int>(objects.size());
    for (int u = 0; u < nobj; ++u) {
        c.identity_.push_back(static_cast<int>(c.mors_.size()));
        c.mors_.push_back(MorDecl{"id_" + objects[u], u, u});
    }
    for (const MorDecl& m : morphisms) {
        if (m.dom < 0 || m.dom >= nobj || m.cod < 0 || m.cod >= nobj)
            throw UnknownObject("endpoints of " + m.name);
        for (const MorDecl& seen : c.mors_)
            if (seen.name == m.name) throw ValidationError("duplicate morphism " + m.name);
        c.mors_.push_back(m);
    }
    const int n = static_cast<int>(c.mors_.size());
    if (n > limits.max_morphisms)
        throw SizeOverflow("morphisms: " + std::to_string(n) + " > " + std::to_string(limits.max_morphisms));

    c.comp_.assign(static_cast<std::size_t>(n) * n, -1);
    auto comp_at = [&](int g, int f) -> int& { return c.comp_[static_cast<std::size_t>(g) * n + f]; };
    auto set_comp = [&](int g, int f, int h) {
        if (c.mors_[f].cod != c.mors_[g].dom)
            throw ValidationError("pair " + c.mors_[g].name + " after " + c.mors_[f].name + " is not composable");
        if (c.mors_[h].dom != c.mors_[f].dom || c.mors_[h].cod != c.mors_[g].cod)
            throw MissingComposite("declared composite " + c.mors_[h].name + " of " + c.mors_[g].name + " after " +
                                   c.mors_[f].name + " has mismatched endpoints");
        int& slot = comp_at(g, f);
        if (slot != -1 && slot != h)
            throw AssocViolation("conflicting composites for " + c.mors_[g].name + " after " + c.mors_[f].name);
        slot = h;
    };

    for (int f = 0; f < n; ++f) {
        set_comp(c.identity_[c.mors_[f].cod], f, f);
        set_comp(f, c.identity_[c.mors_[f].dom], f);
    }
    for (const CompDecl& d : composites)
        set_comp(c.morphism_index(d.after), c.morphism_index(d.first), c.morphism_index(d.result));

    // Saturate: h∘(g∘f) = (h∘g)∘f derives forced entries until stable.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int f = 0; f < n; ++f)
            for (int g = 0; g < n; ++g) {
                int gf = comp_at(g, f);
                if (gf < 0) continue;
                for (int h = 0; h < n; ++h) {
                    if (c.mors_[h].dom != c.mors_[g].cod) continue;
                    int hg = comp_at(h, g);
                    if (hg < 0) continue;
                    int h_gf = comp_at(h, gf);
                    int hg_f = comp_at(hg, f);
                    if (h_gf < 0 && hg_f >= 0) {
                        set_comp(h, gf, hg_f);
                        changed = true;
                    } else if (hg_f < 0 && h_gf >= 0) {
                        set_comp(hg, f, h_gf);
                        changed = true;
                    } else if (h_gf >= 0 && hg_f >= 0 && hg_f != h_gf) {
                        throw AssocViolation(c.mors_[h].name + ", " + c.mors_[g].name + ", " + c.mors_[f].name);
                    }
                }
            }
    }
    for (int f = 0; f < n; ++f)
        for (int g = 0; g < n; ++g)
            if (c.composable(g, f) && comp_at(g, f) < 0)
                throw MissingComposite(c.mors_[g].name + " after " + c.mors_[f].name);

    c.build_indexes();
    c.check_laws();
    return c;
}

inline FinCategory opposite(const FinCategory& c) {
    std::vector<std::string> objs;
    for (int u = 0; u < c.objects(); ++u) objs.push_back(c.object_name(u));
    std::vector<MorDecl> mors;
    std::vector<int> identity;
    for (int f = 0; f < c.morphisms(); ++f) mors.push_back(MorDecl{c.morphism_name(f), c.cod(f), c.dom(f)});
    for (int u = 0; u < c.objects(); ++u) identity.push_back(c.identity(u));
    const int n = c.morphisms();
    std::vector<int> comp(static_cast<std::size_t>(n) * n, -1);
    for (int f = 0; f < n; ++f)
        for (int g = 0; g < n; ++g)
            if (c.composable(g, f)) comp[static_cast<std::size_t>(f) * n + g] = c.compose(g, f);
    return make_category_raw(std::move(objs), std::move(mors), std::move(identity), std::move(comp));
}

/// Nonempty, every pair of objects admits a co-span target, every
/// parallel pair is coequalized by some morphism.
inline bool is_finitely_filtered(const FinCategory& c) {
    if (c.objects() == 0) return false;
    for (int u = 0; u < c.objects(); ++u)
        for (int v = 0; v < c.objects(); ++v) {
            bool found = false;
            for (int w = 0; w < c.objects() && !found; ++w)
                found = !c.hom(u, w).empty() && !c.hom(v, w).empty();
            if (!found) return false;
        }
    for (int f = 0; f < c.morphisms(); ++f)
        for (int g = 0; g < c.morphisms(); ++g) {
            if (c.dom(f) != c.dom(g) || c.cod(f) != c.cod(g)) continue;
            bool found = false;
            for (int h : c.arrows_from(c.cod(f)))
                if (c.compose(h, f) == c.compose(h, g)) { found = true; break; }
            if (!found) return false;
        }
    return true;
}

inline bool is_finitely_cofiltered(const FinCategory& c) { return is_finitely_filtered(opposite(c)); }

struct FinSetObj {
    std::vector<std::string> elements;

    int size() const { return static_cast<int>(elements.size()); }

    static FinSetObj numbered(int n, const std::string& prefix = "e") {
        FinSetObj s;
        for (int i = 0; i < n; ++i) s.elements.push_back(prefix + std::to_string(i));
        return s;
    }
    static FinSetObj singleton(const std::string& name = "pt") { return FinSetObj{{name}}; }

    bool operator==(const FinSetObj& o) const { return elements == o.elements; }

    void check_distinct() const {
        for (std::size_t i = 0; i < elements.size(); ++i)
            for (std::size_t j = i + 1; j < elements.size(); ++j)
                if (elements[i] == elements[j]) throw ValidationError("duplicate element " + elements[i]);
    }
};

struct FinFunction {
    FinSetObj dom;
    FinSetObj cod;
    std::vector<int> map;

    int operator()(int x) const { return map[x]; }

    static FinFunction identity(const FinSetObj& s) {
        FinFunction f{s, s, std::vector<int>(s.elements.size())};
        std::iota(f.map.begin(), f.map.end(), 0);
        return f;
    }

    /// g after f.
    static FinFunction compose(const FinFunction& g, const FinFunction& f) {
        FinFunction h{f.dom, g.cod, {}};
        h.map.reserve(f.map.size());
        for (int x : f.map) h.map.push_back(g.map[x]);
        return h;
    }

    void validate() const {
        if (static_cast<int>(map.size()) != dom.size()) throw ValidationError("function map size mismatch");
        for (int y : map)
            if (y < 0 || y >= cod.size()) throw ValidationError("function image out of codomain");
    }

    bool is_injective() const {
        std::vector<char> hit(cod.size(), 0);
        for (int y : map) {
            if (hit[y]) return false;
            hit[y] = 1;
        }
        return true;
    }
    bool is_surjective() const {
        std::vector<char> hit(cod.size(), 0);
        for (int y : map) hit[y] = 1;
        return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
    }
    bool is_bijective() const { return is_injective() && is_surjective(); }

    bool operator==(const FinFunction& o) const { return map == o.map && dom == o.dom && cod == o.cod; }
};

/// A covariant finite-set-valued functor, used as the common currency
/// for diagrams whose (co)limits we compute.
struct SetDiagram {
    CatPtr shape;
    std::vector<FinSetObj> at;   // per object
    std::vector<FinFunction> act; // per morphism

    void validate() const {
        const FinCategory& c = *shape;
        if (static_cast<int>(at.size()) != c.objects() || static_cast<int>(act.size()) != c.morphisms())
            throw ValidationError("diagram shape mismatch");
        for (int f = 0; f < c.morphisms(); ++f) {
            act[f].validate();
            if (!(act[f].dom == at[c.dom(f)]) || !(act[f].cod == at[c.cod(f)]))
                throw ValidationError("diagram action endpoints mismatch at " + c.morphism_name(f));
        }
        for (int u = 0; u < c.objects(); ++u)
            if (!(act[c.identity(u)].map == FinFunction::identity(at[u]).map))
                throw ValidationError("diagram does not preserve identity at " + c.object_name(u));
        for (int f = 0; f < c.morphisms(); ++f)
            for (int g = 0; g < c.morphisms(); ++g)
                if (c.composable(g, f) &&
                    !(FinFunction::compose(act[g], act[f]).map == act[c.compose(g, f)].map))
                    throw ValidationError("diagram does not preserve composition");
    }
};

struct LimitResult {
    FinSetObj apex;
    std::vector<std::vector<int>> tuples;   // one entry per apex element
    std::vector<FinFunction> projections;   // per shape object
};

/// Cone-compatible tuples in lexicographic order; the empty diagram
/// yields a singleton.
inline LimitResult limit_finset(const SetDiagram& d) {
    const FinCategory& c = *d.shape;
    const int nobj = c.objects();
    LimitResult out;
    std::vector<int> cur(nobj, -1);
    // Backtracking over objects in index order; arrows between assigned
    // objects are checked as soon as both ends are fixed.
    auto consistent = [&](int u) {
        for (int f = 0; f < c.morphisms(); ++f) {
            int a = c.dom(f), b = c.cod(f);
            if (a > u || b > u) continue;
            if (d.act[f].map[cur[a]] != cur[b]) return false;
        }
        return true;
    };
    std::vector<std::vector<int>> tuples;
    std::vector<int> stack;
    std::function<void(int)> rec = [&](int u) {
        if (u == nobj) {
            tuples.push_back(cur);
            return;
        }
        for (int x = 0; x < d.at[u].size(); ++x) {
            cur[u] = x;
            if (consistent(u)) rec(u + 1);
        }
        cur[u] = -1;
    };
    rec(0);
    out.tuples = std::move(tuples);
    for (std::size_t i = 0; i < out.tuples.size(); ++i) {
        std::string name = "(";
        for (int u = 0; u < nobj; ++u) {
            if (u) name += ",";
            name += d.at[u].elements[out.tuples[i][u]];
        }
        name += ")";
        out.apex.elements.push_back(name);
    }
    for (int u = 0; u < nobj; ++u) {
        FinFunction pr{out.apex, d.at[u], {}};
        for (const auto& t : out.tuples) pr.map.push_back(t[u]);
        out.projections.push_back(std::move(pr));
    }
    return out;
}

struct ColimitResult {
    FinSetObj apex;
    std::vector<FinFunction> injections;          // per shape object
    std::vector<std::pair<int, int>> representatives; // (object, element), least in class
};

/// Disjoint union of all values modulo the zig-zag closure of
/// x ~ d(f)(x); class representatives are the least (object, element)
/// pair, and classes are emitted in representative order.
inline ColimitResult colimit_finset(const SetDiagram& d) {
    const FinCategory& c = *d.shape;
    std::vector<int> offset(c.objects() + 1, 0);
    for (int u = 0; u < c.objects(); ++u) offset[u + 1] = offset[u] + d.at[u].size();
    const int total = offset[c.objects()];
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    for (int f = 0; f < c.morphisms(); ++f)
        for (int x = 0; x < d.at[c.dom(f)].size(); ++x)
            unite(offset[c.dom(f)] + x, offset[c.cod(f)] + d.act[f].map[x]);

    std::map<int, int> class_index; // root -> apex index, in root order
    for (int i = 0; i < total; ++i) {
        int r = find(i);
        if (!class_index.count(r)) class_index[r] = -1;
    }
    ColimitResult out;
    int k = 0;
    for (auto& [root, idx] : class_index) {
        idx = k++;
        int u = static_cast<int>(std::upper_bound(offset.begin(), offset.end(), root) - offset.begin()) - 1;
        int x = root - offset[u];
        out.representatives.emplace_back(u, x);
        out.apex.elements.push_back("[" + c.object_name(u) + "." + d.at[u].elements[x] + "]");
    }
    for (int u = 0; u < c.objects(); ++u) {
        FinFunction inj{d.at[u], out.apex, {}};
        for (int x = 0; x < d.at[u].size(); ++x) inj.map.push_back(class_index[find(offset[u] + x)]);
        out.injections.push_back(std::move(inj));
    }
    return out;
}

/// Is the square
///     P --p1--> B
///     |p0       |g
///     A --f---> C
/// a pullback of f and g in finite sets?
inline bool is_pullback_square(const FinFunction& p0, const FinFunction& p1, const FinFunction& f,
                               const FinFunction& g) {
    if (!(p0.dom == p1.dom) || !(p0.cod == f.dom) || !(p1.cod == g.dom) || !(f.cod == g.cod)) return false;
    for (int x = 0; x < p0.dom.size(); ++x)
        if (f.map[p0.map[x]] != g.map[p1.map[x]]) return false;
    // comparison with the canonical pullback: (a, b) pairs with f(a) = g(b)
    std::vector<std::pair<int, int>> seen;
    for (int x = 0; x < p0.dom.size(); ++x) {
        std::pair<int, int> ab{p0.map[x], p1.map[x]};
        if (std::find(seen.begin(), seen.end(), ab) != seen.end()) return false;
        seen.push_back(ab);
    }
    int want = 0;
    for (int a = 0; a < f.dom.size(); ++a)
        for (int b = 0; b < g.dom.size(); ++b)
            if (f.map[a] == g.map[b]) ++want;
    return static_cast<int>(seen.size()) == want;
}

struct FinFunctor {
    CatPtr src;
    CatPtr dst;
    std::vector<int> obj_map;
    std::vector<int> mor_map;

    int on_obj(int u) const { return obj_map[u]; }
    int on_mor(int f) const { return mor_map[f]; }

    static FinFunctor identity(CatPtr c) {
        FinFunctor f{c, c, {}, {}};
        f.obj_map.resize(c->objects());
        std::iota(f.obj_map.begin(), f.obj_map.end(), 0);
        f.mor_map.resize(c->morphisms());
        std::iota(f.mor_map.begin(), f.mor_map.end(), 0);
        return f;
    }

    void validate() const {
        const FinCategory& a = *src;
        const FinCategory& b = *dst;
        if (static_cast<int>(obj_map.size()) != a.objects() || static_cast<int>(mor_map.size()) != a.morphisms())
            throw ValidationError("functor map sizes mismatch");
        for (int f = 0; f < a.morphisms(); ++f)
            if (b.dom(mor_map[f]) != obj_map[a.dom(f)] || b.cod(mor_map[f]) != obj_map[a.cod(f)])
                throw ValidationError("functor breaks endpoints at " + a.morphism_name(f));
        for (int u = 0; u < a.objects(); ++u)
            if (mor_map[a.identity(u)] != b.identity(obj_map[u]))
                throw ValidationError("functor breaks identity at " + a.object_name(u));
        for (int f = 0; f < a.morphisms(); ++f)
            for (int g = 0; g < a.morphisms(); ++g)
                if (a.composable(g, f) && mor_map[a.compose(g, f)] != b.compose(mor_map[g], mor_map[f]))
                    throw ValidationError("functor breaks composition at " + a.morphism_name(g) + " after " +
                                          a.morphism_name(f));
    }
};

/// Helper for assembling derived categories (commas, slices, elements):
/// objects and morphisms are added first, then composition is closed by
/// a caller-supplied rule.
class CategoryAssembler {
public:
    explicit CategoryAssembler(SizeLimits limits = SizeLimits::internal()) : limits_(limits) {}

    int add_object(const std::string& name) {
        if (static_cast<int>(objs_.size()) >= limits_.max_objects) throw SizeOverflow("derived category objects");
        objs_.push_back(name);
        return static_cast<int>(objs_.size()) - 1;
    }
    int add_morphism(const std::string& name, int dom, int cod) {
        if (static_cast<int>(mors_.size()) >= limits_.max_morphisms) throw SizeOverflow("derived category morphisms");
        mors_.push_back(MorDecl{name, dom, cod});
        return static_cast<int>(mors_.size()) - 1;
    }
    int objects() const { return static_cast<int>(objs_.size()); }
    int morphisms() const { return static_cast<int>(mors_.size()); }
    const MorDecl& morphism(int f) const { return mors_[f]; }

    /// `compose(g, f)` must return the index of g∘f.
    template <class Compose, class Identity>
    FinCategory finish(Identity identity_of, Compose compose) const {
        std::vector<int> ident(objs_.size());
        for (int u = 0; u < objects(); ++u) ident[u] = identity_of(u);
        const int n = morphisms();
        std::vector<int> comp(static_cast<std::size_t>(n) * n, -1);
        for (int f = 0; f < n; ++f)
            for (int g = 0; g < n; ++g)
                if (mors_[f].cod == mors_[g].dom) comp[static_cast<std::size_t>(g) * n + f] = compose(g, f);
        return make_category_raw(objs_, mors_, std::move(ident), std::move(comp));
    }

private:
    SizeLimits limits_;
    std::vector<std::string> objs_;
    std::vector<MorDecl> mors_;
};

} // namespace toposcope

#endif
