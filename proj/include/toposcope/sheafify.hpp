#ifndef TOPOSCOPE_SHEAFIFY_HPP
#define TOPOSCOPE_SHEAFIFY_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "toposcope/sheaves.hpp"

namespace toposcope {

/// One application of the plus construction.  Values are matching
/// families over the minimal covering sieve: finite Grothendieck
/// coverages are closed under intersection, so the colimit over all
/// covering sieves collapses onto it (the literal colimit is available
/// as plus_colimit_oracle).
struct PlusResult {
    Presheaf input;
    Presheaf output;
    NatTrans unit;
    std::vector<Sieve> min_sieve;                 // per object
    std::vector<std::vector<std::vector<int>>> matches; // per object, matching families
};

inline PlusResult plus(const GroCoverage& gro, const Presheaf& x) {
    const FinCategory& c = *gro.cat;
    PlusResult out;
    out.input = x;
    out.output = Presheaf{x.base, {}, {}};
    out.matches.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        out.min_sieve.push_back(min_covering_sieve(gro, u));
        out.matches[u] = sieve_matching_families(c, out.min_sieve[u], x);
        FinSetObj s;
        for (std::size_t i = 0; i < out.matches[u].size(); ++i) s.elements.push_back("m" + std::to_string(i));
        out.output.at.push_back(std::move(s));
    }
    auto match_index = [&](int u, const std::vector<int>& m) {
        for (std::size_t i = 0; i < out.matches[u].size(); ++i)
            if (out.matches[u][i] == m) return static_cast<int>(i);
        throw ValidationError("internal: plus restriction is not matching");
    };
    out.output.action.assign(c.morphisms(), FinFunction{});
    for (int f = 0; f < c.morphisms(); ++f) {
        int v = c.dom(f), u = c.cod(f);
        const auto& mem_u = out.min_sieve[u].family.members;
        const auto& mem_v = out.min_sieve[v].family.members;
        FinFunction act{out.output.at[u], out.output.at[v], {}};
        for (const auto& m : out.matches[u]) {
            std::vector<int> pulled(mem_v.size());
            for (std::size_t i = 0; i < mem_v.size(); ++i) {
                int fh = c.compose(f, mem_v[i]);
                int pos = -1;
                for (std::size_t k = 0; k < mem_u.size(); ++k)
                    if (mem_u[k] == fh) pos = static_cast<int>(k);
                if (pos < 0) throw ValidationError("internal: minimal sieve not pullback-contained");
                pulled[i] = m[pos];
            }
            act.map.push_back(match_index(v, pulled));
        }
        out.output.action[f] = std::move(act);
    }
    out.output.validate();
    out.unit = NatTrans{x, out.output, {}};
    for (int u = 0; u < c.objects(); ++u) {
        std::vector<int> comp;
        const auto& mem = out.min_sieve[u].family.members;
        for (int e = 0; e < x.at[u].size(); ++e) {
            std::vector<int> m(mem.size());
            for (std::size_t i = 0; i < mem.size(); ++i) m[i] = x.action[mem[i]].map[e];
            comp.push_back(match_index(u, m));
        }
        out.unit.component.push_back(std::move(comp));
    }
    out.unit.validate();
    return out;
}

/// Functoriality of the plus construction on a map of presheaves.
inline NatTrans plus_on_map(const GroCoverage& gro, const PlusResult& px, const PlusResult& py,
                            const NatTrans& f) {
    const FinCategory& c = *gro.cat;
    NatTrans out{px.output, py.output, {}};
    for (int u = 0; u < c.objects(); ++u) {
        const auto& mem = px.min_sieve[u].family.members;
        std::vector<int> comp;
        for (const auto& m : px.matches[u]) {
            std::vector<int> mapped(mem.size());
            for (std::size_t i = 0; i < mem.size(); ++i)
                mapped[i] = f.component[c.dom(mem[i])][m[i]];
            int idx = -1;
            for (std::size_t k = 0; k < py.matches[u].size(); ++k)
                if (py.matches[u][k] == mapped) idx = static_cast<int>(k);
            if (idx < 0) throw ValidationError("internal: mapped family is not matching");
            comp.push_back(idx);
        }
        out.component.push_back(std::move(comp));
    }
    out.validate();
    return out;
}

struct SheafifyResult {
    Presheaf sheaf;
    NatTrans unit; // X -> aX
    PlusResult first;
    PlusResult second;
};

inline SheafifyResult sheafify(const GroCoverage& gro, const Presheaf& x) {
    SheafifyResult out;
    out.first = plus(gro, x);
    out.second = plus(gro, out.first.output);
    out.sheaf = out.second.output;
    out.unit = NatTrans::compose(out.second.unit, out.first.unit);
    return out;
}

inline NatTrans sheafify_on_map(const GroCoverage& gro, const SheafifyResult& ax,
                                const SheafifyResult& ay, const NatTrans& f) {
    auto once = plus_on_map(gro, ax.first, ay.first, f);
    return plus_on_map(gro, ax.second, ay.second, once);
}

/// Universal property: a map into a sheaf factors uniquely through the
/// unit; the factor sends a class to the unique amalgamation of its
/// image.
inline NatTrans factor_through_plus(const GroCoverage& gro, const PlusResult& px, const NatTrans& f,
                                    const Presheaf& z) {
    const FinCategory& c = *gro.cat;
    NatTrans out{px.output, z, {}};
    for (int u = 0; u < c.objects(); ++u) {
        const auto& mem = px.min_sieve[u].family.members;
        std::vector<int> comp;
        for (const auto& m : px.matches[u]) {
            int found = -1;
            for (int e = 0; e < z.at[u].size(); ++e) {
                bool amalgamates = true;
                for (std::size_t i = 0; i < mem.size() && amalgamates; ++i)
                    amalgamates = z.action[mem[i]].map[e] == f.component[c.dom(mem[i])][m[i]];
                if (amalgamates) {
                    if (found >= 0) throw NotASheaf("two amalgamations in factor target");
                    found = e;
                }
            }
            if (found < 0) throw NotASheaf("no amalgamation in factor target");
            comp.push_back(found);
        }
        out.component.push_back(std::move(comp));
    }
    out.validate();
    return out;
}

inline NatTrans factor_through_sheafify(const GroCoverage& gro, const SheafifyResult& ax,
                                        const NatTrans& f, const Presheaf& z) {
    auto once = factor_through_plus(gro, ax.first, f, z);
    return factor_through_plus(gro, ax.second, once, z);
}

/// Literal filtered colimit over all covering sieves: elements are
/// matching families on any covering sieve, glued when they agree on a
/// covering sieve below both.  Returns class sizes and the bijection to
/// the minimal-sieve evaluation.
struct PlusColimitOracle {
    std::vector<int> sizes;            // per object
    std::vector<std::vector<int>> to_min; // class -> index in plus().matches
};

inline PlusColimitOracle plus_colimit_oracle(const GroCoverage& gro, const Presheaf& x,
                                             const PlusResult& px) {
    const FinCategory& c = *gro.cat;
    PlusColimitOracle out;
    for (int u = 0; u < c.objects(); ++u) {
        struct Entry {
            SieveMask sieve;
            std::vector<int> members;
            std::vector<int> sections;
        };
        std::vector<Entry> entries;
        for (SieveMask s : gro.covering_sieves(u)) {
            Sieve sv = Sieve::from_mask(c, u, s);
            for (auto& m : sieve_matching_families(c, sv, x))
                entries.push_back({s, sv.family.members, std::move(m)});
        }
        std::vector<int> parent(entries.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
        auto unite = [&](int a, int b) {
            a = find(a);
            b = find(b);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        };
        const auto& arrows = c.arrows_into(u);
        for (std::size_t a = 0; a < entries.size(); ++a)
            for (std::size_t b = a + 1; b < entries.size(); ++b) {
                SieveMask common = entries[a].sieve & entries[b].sieve;
                SieveMask agree = 0;
                for (std::size_t k = 0; k < arrows.size(); ++k) {
                    if (!(common >> k & 1)) continue;
                    int f = arrows[k];
                    int pa = -1, pb = -1;
                    for (std::size_t i = 0; i < entries[a].members.size(); ++i)
                        if (entries[a].members[i] == f) pa = static_cast<int>(i);
                    for (std::size_t i = 0; i < entries[b].members.size(); ++i)
                        if (entries[b].members[i] == f) pb = static_cast<int>(i);
                    if (entries[a].sections[pa] == entries[b].sections[pb]) agree |= SieveMask{1} << k;
                }
                if (gro.is_covering(u, agree)) unite(static_cast<int>(a), static_cast<int>(b));
            }
        std::map<int, int> classes;
        for (std::size_t i = 0; i < entries.size(); ++i) classes.emplace(find(static_cast<int>(i)), -1);
        int k = 0;
        for (auto& [root, idx] : classes) idx = k++;
        out.sizes.push_back(k);

        // restriction of each class to the minimal sieve identifies it
        // with an element of the direct computation
        const auto& mem_min = px.min_sieve[u].family.members;
        std::vector<int> to_min(k, -1);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            std::vector<int> restricted(mem_min.size());
            for (std::size_t j = 0; j < mem_min.size(); ++j) {
                int pos = -1;
                for (std::size_t q = 0; q < entries[i].members.size(); ++q)
                    if (entries[i].members[q] == mem_min[j]) pos = static_cast<int>(q);
                if (pos < 0) throw ValidationError("internal: minimal sieve not below covering sieve");
                restricted[j] = entries[i].sections[pos];
            }
            int target = -1;
            for (std::size_t q = 0; q < px.matches[u].size(); ++q)
                if (px.matches[u][q] == restricted) target = static_cast<int>(q);
            if (target < 0) throw ValidationError("internal: restricted family not matching");
            int cls = classes[find(static_cast<int>(i))];
            if (to_min[cls] != -1 && to_min[cls] != target)
                throw ValidationError("oracle: colimit classes do not restrict consistently");
            to_min[cls] = target;
        }
        // bijectivity
        std::vector<int> seen = to_min;
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end() ||
            seen.size() != px.matches[u].size())
            throw ValidationError("oracle: literal colimit disagrees with minimal-sieve evaluation");
        out.to_min.push_back(std::move(to_min));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local equality and the one-go construction.

inline bool locally_equal(const Coverage& j, int u, const Presheaf& x, int s, int t) {
    if (s == t) return true;
    const FinCategory& c = *j.cat;
    for (const Family& r : j.covers[u]) {
        bool all = true;
        for (int m : r.members)
            if (x.action[m].map[s] != x.action[m].map[t]) {
                all = false;
                break;
            }
        if (all) return true;
    }
    return false;
}

/// Families matching only up to local equality on every intersection
/// square.
inline std::vector<std::vector<int>> locally_matching_families(const Coverage& j, const Family& r,
                                                               const Presheaf& x,
                                                               std::uint64_t budget = 50'000'000) {
    const FinCategory& c = *j.cat;
    auto squares = intersection_squares(c, r);
    std::vector<std::vector<int>> out;
    std::vector<int> cur(r.members.size(), -1);
    std::uint64_t steps = 0;
    auto consistent = [&](int upto) {
        for (const auto& s : squares) {
            if (s.i > upto || s.j > upto) continue;
            int w = c.dom(s.a);
            if (!locally_equal(j, w, x, x.action[s.a].map[cur[s.i]], x.action[s.b].map[cur[s.j]]))
                return false;
        }
        return true;
    };
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (++steps > budget) throw SizeOverflow("locally matching enumeration");
        if (i == r.members.size()) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e < x.at[c.dom(r.members[i])].size(); ++e) {
            cur[i] = e;
            if (consistent(static_cast<int>(i))) rec(i + 1);
        }
        cur[i] = -1;
    };
    rec(0);
    return out;
}

/// Local equivalence of families of sections over two families on the
/// same object: on every commuting square between members, the two
/// restrictions are locally equal.
inline bool locally_equivalent(const Coverage& j, const Presheaf& x, const Family& r,
                               const std::vector<int>& xs, const Family& t,
                               const std::vector<int>& ys) {
    const FinCategory& c = *j.cat;
    for (std::size_t i = 0; i < r.members.size(); ++i)
        for (std::size_t k = 0; k < t.members.size(); ++k)
            for (int a : c.arrows_into(c.dom(r.members[i])))
                for (int b : c.arrows_into(c.dom(t.members[k]))) {
                    if (c.dom(a) != c.dom(b)) continue;
                    if (c.compose(r.members[i], a) != c.compose(t.members[k], b)) continue;
                    if (!locally_equal(j, c.dom(a), x, x.action[a].map[xs[i]], x.action[b].map[ys[k]]))
                        return false;
                }
    return true;
}

struct DaggerResult {
    Presheaf input;
    Presheaf output;
    NatTrans unit;
    std::vector<Sieve> min_sieve;
    std::vector<std::vector<std::vector<int>>> loc_matches; // per object
    std::vector<std::vector<int>> class_of;                 // per object, per loc match
};

/// One-go sheafification: locally matching families on the minimal
/// saturating sieve, modulo local equivalence (closed transitively by
/// union-find).
inline DaggerResult dagger(const GroCoverage& gro, const Coverage& j, const Presheaf& x) {
    const FinCategory& c = *gro.cat;
    DaggerResult out;
    out.input = x;
    out.output = Presheaf{x.base, {}, {}};
    out.loc_matches.resize(c.objects());
    out.class_of.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        out.min_sieve.push_back(min_covering_sieve(gro, u));
        const Family& fam = out.min_sieve[u].family;
        out.loc_matches[u] = locally_matching_families(j, fam, x);
        auto& entries = out.loc_matches[u];
        std::vector<int> parent(entries.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
        for (std::size_t a = 0; a < entries.size(); ++a)
            for (std::size_t b = a + 1; b < entries.size(); ++b)
                if (locally_equivalent(j, x, fam, entries[a], fam, entries[b])) {
                    int ra = find(static_cast<int>(a)), rb = find(static_cast<int>(b));
                    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
                }
        std::map<int, int> classes;
        for (std::size_t i = 0; i < entries.size(); ++i) classes.emplace(find(static_cast<int>(i)), -1);
        int k = 0;
        FinSetObj s;
        for (auto& [root, idx] : classes) {
            idx = k++;
            s.elements.push_back("d" + std::to_string(idx));
        }
        out.class_of[u].resize(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i)
            out.class_of[u][i] = classes[find(static_cast<int>(i))];
        out.output.at.push_back(std::move(s));
    }
    auto class_of_family = [&](int u, const std::vector<int>& m) {
        for (std::size_t i = 0; i < out.loc_matches[u].size(); ++i)
            if (out.loc_matches[u][i] == m) return out.class_of[u][i];
        throw ValidationError("internal: family is not locally matching");
    };
    out.output.action.assign(c.morphisms(), FinFunction{});
    for (int f = 0; f < c.morphisms(); ++f) {
        int v = c.dom(f), u = c.cod(f);
        const auto& mem_u = out.min_sieve[u].family.members;
        const auto& mem_v = out.min_sieve[v].family.members;
        FinFunction act{out.output.at[u], out.output.at[v],
                        std::vector<int>(out.output.at[u].size(), -1)};
        for (std::size_t i = 0; i < out.loc_matches[u].size(); ++i) {
            std::vector<int> pulled(mem_v.size());
            for (std::size_t q = 0; q < mem_v.size(); ++q) {
                int fh = c.compose(f, mem_v[q]);
                int pos = -1;
                for (std::size_t k = 0; k < mem_u.size(); ++k)
                    if (mem_u[k] == fh) pos = static_cast<int>(k);
                pulled[q] = out.loc_matches[u][i][pos];
            }
            int target = class_of_family(v, pulled);
            int& slot = act.map[out.class_of[u][i]];
            if (slot != -1 && slot != target)
                throw ValidationError("internal: dagger action ill-defined");
            slot = target;
        }
        out.output.action[f] = std::move(act);
    }
    out.output.validate();
    out.unit = NatTrans{x, out.output, {}};
    for (int u = 0; u < c.objects(); ++u) {
        const auto& mem = out.min_sieve[u].family.members;
        std::vector<int> comp;
        for (int e = 0; e < x.at[u].size(); ++e) {
            std::vector<int> m(mem.size());
            for (std::size_t i = 0; i < mem.size(); ++i) m[i] = x.action[mem[i]].map[e];
            comp.push_back(class_of_family(u, m));
        }
        out.unit.component.push_back(std::move(comp));
    }
    out.unit.validate();
    return out;
}

/// Literal colimit of locally matching families over all covering
/// sieves; must agree in size with the minimal-sieve evaluation.
inline std::vector<int> dagger_colimit_oracle(const GroCoverage& gro, const Coverage& j,
                                              const Presheaf& x) {
    const FinCategory& c = *gro.cat;
    std::vector<int> sizes;
    for (int u = 0; u < c.objects(); ++u) {
        struct Entry {
            Family fam;
            std::vector<int> sections;
        };
        std::vector<Entry> entries;
        for (SieveMask s : gro.covering_sieves(u)) {
            Family fam = mask_family(c, u, s);
            for (auto& m : locally_matching_families(j, fam, x)) entries.push_back({fam, std::move(m)});
        }
        std::vector<int> parent(entries.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
        for (std::size_t a = 0; a < entries.size(); ++a)
            for (std::size_t b = a + 1; b < entries.size(); ++b)
                if (locally_equivalent(j, x, entries[a].fam, entries[a].sections, entries[b].fam,
                                       entries[b].sections)) {
                    int ra = find(static_cast<int>(a)), rb = find(static_cast<int>(b));
                    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
                }
        std::set<int> roots;
        for (std::size_t i = 0; i < entries.size(); ++i) roots.insert(find(static_cast<int>(i)));
        sizes.push_back(static_cast<int>(roots.size()));
    }
    return sizes;
}

} // namespace toposcope

#endif
