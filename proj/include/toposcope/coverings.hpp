#ifndef TOPOSCOPE_COVERINGS_HPP
#define TOPOSCOPE_COVERINGS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toposcope/fincat.hpp"

namespace toposcope {

/// A finite set of morphisms with common codomain.  Members are kept
/// sorted and duplicate-free.
struct Family {
    int target = -1;
    std::vector<int> members;

    static Family make(const FinCategory& c, int target, std::vector<int> members) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (int f : members)
            if (c.cod(f) != target)
                throw TargetMismatch(c.morphism_name(f) + " does not land in " + c.object_name(target));
        return Family{target, std::move(members)};
    }

    bool operator==(const Family& o) const { return target == o.target && members == o.members; }
    bool operator<(const Family& o) const {
        return target != o.target ? target < o.target : members < o.members;
    }
};

using SieveMask = std::uint64_t;

inline void check_mask_width(const FinCategory& c, int u) {
    if (c.arrows_into(u).size() > 64)
        throw SizeOverflow("more than 64 arrows into " + c.object_name(u));
}

inline SieveMask family_mask(const FinCategory& c, const Family& r) {
    check_mask_width(c, r.target);
    SieveMask m = 0;
    for (int f : r.members) m |= SieveMask{1} << c.into_index(f);
    return m;
}

inline Family mask_family(const FinCategory& c, int target, SieveMask m) {
    Family r{target, {}};
    const auto& arrows = c.arrows_into(target);
    for (std::size_t i = 0; i < arrows.size(); ++i)
        if (m >> i & 1) r.members.push_back(arrows[i]);
    return r;
}

/// Mask of the principal sieve ⟨f⟩ = { f∘g } over cod(f).
inline SieveMask principal_sieve_mask(const FinCategory& c, int f) {
    check_mask_width(c, c.cod(f));
    SieveMask m = SieveMask{1} << c.into_index(f);
    for (int g : c.arrows_into(c.dom(f))) m |= SieveMask{1} << c.into_index(c.compose(f, g));
    return m;
}

inline SieveMask generated_sieve_mask(const FinCategory& c, const Family& r) {
    SieveMask m = 0;
    for (int f : r.members) m |= principal_sieve_mask(c, f);
    return m;
}

inline bool mask_is_sieve(const FinCategory& c, int target, SieveMask m) {
    const auto& arrows = c.arrows_into(target);
    for (std::size_t i = 0; i < arrows.size(); ++i)
        if ((m >> i & 1) && (principal_sieve_mask(c, arrows[i]) & ~m)) return false;
    return true;
}

/// A precomposition-closed family.
struct Sieve {
    Family family;

    static Sieve from_family_checked(const FinCategory& c, Family r) {
        if (family_mask(c, r) != generated_sieve_mask(c, r))
            throw NotASieve("family over " + c.object_name(r.target) + " is not precomposition closed");
        return Sieve{std::move(r)};
    }
    static Sieve from_mask(const FinCategory& c, int target, SieveMask m) {
        return Sieve{mask_family(c, target, m)};
    }

    int target() const { return family.target; }
    bool operator==(const Sieve& o) const { return family == o.family; }
};

inline SieveMask maximal_sieve_mask(const FinCategory& c, int u) {
    check_mask_width(c, u);
    return c.arrows_into(u).size() == 64 ? ~SieveMask{0}
                                         : (SieveMask{1} << c.arrows_into(u).size()) - 1;
}

inline Sieve generated_sieve(const FinCategory& c, const Family& r) {
    return Sieve::from_mask(c, r.target, generated_sieve_mask(c, r));
}

/// Pushforward g_*(t): composites g∘t_j, duplicates merged.
inline Family pushforward(const FinCategory& c, int g, const Family& t) {
    if (t.target != c.dom(g)) throw TargetMismatch("pushforward target is not dom of " + c.morphism_name(g));
    std::vector<int> members;
    for (int f : t.members) members.push_back(c.compose(g, f));
    return Family::make(c, c.cod(g), std::move(members));
}

inline SieveMask pullback_sieve_mask(const FinCategory& c, int g, SieveMask r_on_cod) {
    // g : V -> U, result over V: arrows h with g∘h in the sieve
    int v = c.dom(g);
    check_mask_width(c, v);
    SieveMask m = 0;
    const auto& arrows = c.arrows_into(v);
    for (std::size_t i = 0; i < arrows.size(); ++i)
        if (r_on_cod >> c.into_index(c.compose(g, arrows[i])) & 1) m |= SieveMask{1} << i;
    return m;
}

/// Pullback g^*(r): all f with g∘f factoring through a member; always a
/// sieve.
inline Sieve pullback_family(const FinCategory& c, int g, const Family& r) {
    if (r.target != c.cod(g)) throw TargetMismatch("pullback target is not cod of " + c.morphism_name(g));
    return Sieve::from_mask(c, c.dom(g), pullback_sieve_mask(c, g, generated_sieve_mask(c, r)));
}

struct Refinement {
    Family src;
    Family dst;
    std::vector<int> index_map;  // position in src.members -> position in dst.members
    std::vector<int> components; // morphism witnessing src_i = dst_{alpha(i)} ∘ comp_i

    void validate(const FinCategory& c) const {
        if (src.target != dst.target) throw TargetMismatch("refinement across targets");
        for (std::size_t i = 0; i < src.members.size(); ++i) {
            int d = dst.members[index_map[i]];
            if (c.compose(d, components[i]) != src.members[i])
                throw ValidationError("refinement triangle fails at " + c.morphism_name(src.members[i]));
        }
    }
};

/// Decides r ≤ t (every member of r factors through a member of t) and
/// returns the least witnessing factorization per member.
inline std::optional<Refinement> refines(const FinCategory& c, const Family& r, const Family& t) {
    if (r.target != t.target) throw TargetMismatch("refines across targets");
    Refinement out{r, t, {}, {}};
    for (int f : r.members) {
        bool found = false;
        for (std::size_t j = 0; j < t.members.size() && !found; ++j)
            for (int s : c.arrows_into(c.dom(t.members[j]))) {
                if (c.dom(s) != c.dom(f)) continue;
                if (c.compose(t.members[j], s) == f) {
                    out.index_map.push_back(static_cast<int>(j));
                    out.components.push_back(s);
                    found = true;
                    break;
                }
            }
        if (!found) return std::nullopt;
    }
    return out;
}

enum class TriState { unknown, yes, no };

/// Per-object finite sets of covering families.  When
/// `sieve_semantics` is set the stored families are representatives:
/// the coverage is read as "every family whose generated sieve equals
/// the sieve of a stored cover" (used by builders whose literal family
/// list would be astronomically large).
struct Coverage {
    CatPtr cat;
    std::vector<std::vector<Family>> covers;
    bool sieve_semantics = false;

    TriState is_coverage_flag = TriState::unknown;
    TriState refinement_closed_flag = TriState::unknown;
    TriState composition_closed_flag = TriState::unknown;
    TriState saturated_flag = TriState::unknown;
    TriState sifted_flag = TriState::unknown;
    TriState grothendieck_flag = TriState::unknown;

    const std::vector<Family>& at(int u) const { return covers[u]; }

    bool contains(const Family& r) const {
        const FinCategory& c = *cat;
        if (sieve_semantics) {
            SieveMask s = generated_sieve_mask(c, r);
            for (const Family& q : covers[r.target])
                if (generated_sieve_mask(c, q) == s) return true;
            return false;
        }
        SieveMask m = family_mask(c, r);
        for (const Family& q : covers[r.target])
            if (family_mask(c, q) == m) return true;
        return false;
    }
};

/// Normalizes families, inserts the mandatory identity families
/// (or the maximal sieves, for sifted collections), and deduplicates.
inline Coverage make_coverage(CatPtr cat, std::vector<std::vector<Family>> covers,
                              bool sieve_semantics = false, bool sifted = false) {
    const FinCategory& c = *cat;
    if (static_cast<int>(covers.size()) != c.objects()) covers.resize(c.objects());
    Coverage j{cat, {}, sieve_semantics};
    j.covers.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        std::set<Family> seen;
        seen.insert(sifted ? mask_family(c, u, maximal_sieve_mask(c, u))
                           : Family::make(c, u, {c.identity(u)}));
        for (const Family& r : covers[u]) {
            if (r.target != u) throw TargetMismatch("cover listed under wrong object");
            seen.insert(Family::make(c, u, r.members));
        }
        j.covers[u].assign(seen.begin(), seen.end());
    }
    return j;
}

struct CoverageViolation {
    int object = -1;
    Family cover;
    int morphism = -1;
};

/// The coverage axiom: for every cover r of U and g : V -> U some
/// cover t of V pushes forward into r.
inline std::optional<CoverageViolation> coverage_violation(const Coverage& j) {
    const FinCategory& c = *j.cat;
    for (int u = 0; u < c.objects(); ++u) {
        bool has_id = false;
        for (const Family& r : j.covers[u])
            if (generated_sieve_mask(c, r) == maximal_sieve_mask(c, u)) has_id = true;
        if (!has_id) return CoverageViolation{u, Family{u, {}}, -1};
        for (const Family& r : j.covers[u]) {
            SieveMask rbar = generated_sieve_mask(c, r);
            for (int g = 0; g < c.morphisms(); ++g) {
                if (c.cod(g) != u) continue;
                bool ok = false;
                for (const Family& t : j.covers[c.dom(g)]) {
                    SieveMask pushed = 0;
                    for (int f : t.members) pushed |= principal_sieve_mask(c, c.compose(g, f));
                    if ((pushed & ~rbar) == 0) { ok = true; break; }
                }
                if (!ok) return CoverageViolation{u, r, g};
            }
        }
    }
    return std::nullopt;
}

inline bool is_coverage(const Coverage& j) { return !coverage_violation(j).has_value(); }

// ---------------------------------------------------------------------------
// Sieve lattice: all sieves on an object, enumerated as down-sets of the
// factorization preorder on arrows.  Feasible even when the number of
// subsets of arrows is astronomically large, as long as the number of
// sieves stays small.

struct SieveLattice {
    std::vector<std::vector<SieveMask>> sieves; // per object, ascending masks
    std::vector<std::map<SieveMask, int>> index;

    int find(int u, SieveMask m) const {
        auto it = index[u].find(m);
        return it == index[u].end() ? -1 : it->second;
    }
    int size(int u) const { return static_cast<int>(sieves[u].size()); }
};

inline std::vector<SieveMask> enumerate_sieves_on(const FinCategory& c, int u,
                                                  std::size_t cap = 1u << 20) {
    check_mask_width(c, u);
    const auto& arrows = c.arrows_into(u);
    const int n = static_cast<int>(arrows.size());
    std::vector<SieveMask> principal(n);
    for (int i = 0; i < n; ++i) principal[i] = principal_sieve_mask(c, arrows[i]);

    // quotient by mutual factorization
    std::vector<int> cls(n, -1);
    std::vector<SieveMask> cls_principal;
    std::vector<SieveMask> cls_bits;
    for (int i = 0; i < n; ++i) {
        if (cls[i] != -1) continue;
        int id = static_cast<int>(cls_principal.size());
        cls[i] = id;
        cls_principal.push_back(principal[i]);
        SieveMask bits = SieveMask{1} << i;
        for (int k = i + 1; k < n; ++k)
            if (cls[k] == -1 && principal[k] == principal[i]) {
                cls[k] = id;
                bits |= SieveMask{1} << k;
            }
        cls_bits.push_back(bits);
    }
    const int m = static_cast<int>(cls_principal.size());
    if (m > 64) throw SizeOverflow("sieve lattice classes");

    // class preorder: a <= b iff principal(a) subset of principal(b)
    std::vector<SieveMask> strictly_below(m, 0), upset(m, 0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if ((cls_principal[a] & ~cls_principal[b]) == 0) {
                upset[a] |= SieveMask{1} << b;
                if (a != b) strictly_below[b] |= SieveMask{1} << a;
            }

    // recursive enumeration over class masks
    std::function<std::vector<SieveMask>(SieveMask)> enumerate = [&](SieveMask allowed) -> std::vector<SieveMask> {
        if (!allowed) return {0};
        int low = -1;
        for (int a = 0; a < m; ++a)
            if (allowed >> a & 1) {
                bool minimal = (strictly_below[a] & allowed) == 0;
                if (minimal) { low = a; break; }
            }
        // down-sets avoiding `low` cannot touch anything above it
        auto without = enumerate(allowed & ~(upset[low] & allowed) & ~(SieveMask{1} << low));
        auto with_rest = enumerate(allowed & ~(SieveMask{1} << low));
        std::vector<SieveMask> out = without;
        for (SieveMask d : with_rest) out.push_back(d | SieveMask{1} << low);
        if (out.size() > cap) throw SizeOverflow("sieve lattice");
        return out;
    };
    SieveMask all = m == 64 ? ~SieveMask{0} : (SieveMask{1} << m) - 1;
    auto class_downsets = enumerate(all);

    std::vector<SieveMask> out;
    out.reserve(class_downsets.size());
    for (SieveMask d : class_downsets) {
        SieveMask mask = 0;
        for (int a = 0; a < m; ++a)
            if (d >> a & 1) mask |= cls_bits[a];
        out.push_back(mask);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline SieveLattice sieve_lattice(const FinCategory& c, std::size_t cap = 1u << 20) {
    SieveLattice lat;
    lat.sieves.resize(c.objects());
    lat.index.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        lat.sieves[u] = enumerate_sieves_on(c, u, cap);
        for (std::size_t i = 0; i < lat.sieves[u].size(); ++i) lat.index[u][lat.sieves[u][i]] = static_cast<int>(i);
    }
    return lat;
}

// ---------------------------------------------------------------------------
// Grothendieck closure: least fixpoint over the sieve lattice containing
// the generated sieves of the covers and closed under supersets,
// pullback stability and local character.

struct GroCoverage {
    CatPtr cat;
    SieveLattice lattice;
    std::vector<std::vector<char>> covering; // per object, per lattice index

    bool is_covering(int u, SieveMask m) const {
        int i = lattice.find(u, m);
        return i >= 0 && covering[u][i];
    }
    std::vector<SieveMask> covering_sieves(int u) const {
        std::vector<SieveMask> out;
        for (int i = 0; i < lattice.size(u); ++i)
            if (covering[u][i]) out.push_back(lattice.sieves[u][i]);
        return out;
    }
    SieveMask min_covering_mask(int u) const {
        SieveMask m = maximal_sieve_mask(*cat, u);
        for (int i = 0; i < lattice.size(u); ++i)
            if (covering[u][i]) m &= lattice.sieves[u][i];
        return m;
    }

    Coverage as_coverage() const {
        const FinCategory& c = *cat;
        std::vector<std::vector<Family>> covers(c.objects());
        for (int u = 0; u < c.objects(); ++u)
            for (SieveMask m : covering_sieves(u)) covers[u].push_back(mask_family(c, u, m));
        Coverage out = make_coverage(cat, std::move(covers));
        // the identity family inserted by make_coverage is replaced by the
        // maximal sieve, which is always covering, so drop bare identities
        for (int u = 0; u < c.objects(); ++u) {
            std::vector<Family> kept;
            for (const Family& r : out.covers[u])
                if (mask_is_sieve(c, u, family_mask(c, r))) kept.push_back(r);
            out.covers[u] = std::move(kept);
        }
        out.sifted_flag = TriState::yes;
        out.grothendieck_flag = TriState::yes;
        return out;
    }
};

inline GroCoverage grothendieck_closure(const Coverage& j, std::size_t lattice_cap = 1u << 20) {
    const FinCategory& c = *j.cat;
    GroCoverage out{j.cat, sieve_lattice(c, lattice_cap), {}};
    out.covering.resize(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        out.covering[u].assign(out.lattice.size(u), 0);
        int top = out.lattice.find(u, maximal_sieve_mask(c, u));
        out.covering[u][top] = 1;
        for (const Family& r : j.covers[u]) {
            int i = out.lattice.find(u, generated_sieve_mask(c, r));
            if (i < 0) throw ValidationError("internal: generated sieve missing from lattice");
            out.covering[u][i] = 1;
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int u = 0; u < c.objects(); ++u) {
            const auto& sieves = out.lattice.sieves[u];
            // supersets
            for (std::size_t i = 0; i < sieves.size(); ++i) {
                if (!out.covering[u][i]) continue;
                for (std::size_t k = 0; k < sieves.size(); ++k)
                    if (!out.covering[u][k] && (sieves[i] & ~sieves[k]) == 0) {
                        out.covering[u][k] = 1;
                        changed = true;
                    }
            }
            // pullbacks
            for (std::size_t i = 0; i < sieves.size(); ++i) {
                if (!out.covering[u][i]) continue;
                for (int g : c.arrows_into(u)) {
                    if (c.is_identity(g)) continue;
                    SieveMask pb = pullback_sieve_mask(c, g, sieves[i]);
                    int k = out.lattice.find(c.dom(g), pb);
                    if (k < 0) throw ValidationError("internal: pullback sieve missing from lattice");
                    if (!out.covering[c.dom(g)][k]) {
                        out.covering[c.dom(g)][k] = 1;
                        changed = true;
                    }
                }
            }
            // local character
            const auto& arrows = c.arrows_into(u);
            for (std::size_t k = 0; k < sieves.size(); ++k) {
                if (out.covering[u][k]) continue;
                SieveMask good = 0;
                for (std::size_t a = 0; a < arrows.size(); ++a) {
                    SieveMask pb = pullback_sieve_mask(c, arrows[a], sieves[k]);
                    int idx = out.lattice.find(c.dom(arrows[a]), pb);
                    if (idx >= 0 && out.covering[c.dom(arrows[a])][idx]) good |= SieveMask{1} << a;
                }
                for (std::size_t i = 0; i < sieves.size() && !out.covering[u][k]; ++i)
                    if (out.covering[u][i] && (sieves[i] & ~good) == 0) {
                        out.covering[u][k] = 1;
                        changed = true;
                    }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Family-level closures.

/// All families on u as masks; guarded, for materialized closures.
inline int family_space_width(const FinCategory& c, int u, int cap_bits = 20) {
    int n = static_cast<int>(c.arrows_into(u).size());
    if (n > cap_bits) throw SizeOverflow("family space on " + c.object_name(u));
    return n;
}

/// Composition closure computed as a fixpoint on families: replacing a
/// single member by a pushed-forward cover of its domain, which reaches
/// every tree composite because identity families are always present.
inline Coverage comp_closure(const Coverage& j, std::size_t cap = 200000) {
    const FinCategory& c = *j.cat;
    std::vector<std::set<SieveMask>> fams(c.objects());
    for (int u = 0; u < c.objects(); ++u)
        for (const Family& r : j.covers[u]) fams[u].insert(family_mask(c, r));
    bool changed = true;
    while (changed) {
        changed = false;
        for (int u = 0; u < c.objects(); ++u) {
            std::vector<SieveMask> snapshot(fams[u].begin(), fams[u].end());
            for (SieveMask rm : snapshot) {
                Family r = mask_family(c, u, rm);
                for (std::size_t pos = 0; pos < r.members.size(); ++pos) {
                    int f = r.members[pos];
                    int v = c.dom(f);
                    std::vector<SieveMask> inner(fams[v].begin(), fams[v].end());
                    for (SieveMask tm : inner) {
                        SieveMask nm = rm & ~(SieveMask{1} << c.into_index(f));
                        Family t = mask_family(c, v, tm);
                        for (int tf : t.members) nm |= SieveMask{1} << c.into_index(c.compose(f, tf));
                        if (fams[u].insert(nm).second) {
                            changed = true;
                            if (fams[u].size() > cap) throw SizeOverflow("composition closure");
                        }
                    }
                }
            }
        }
    }
    std::vector<std::vector<Family>> covers(c.objects());
    for (int u = 0; u < c.objects(); ++u)
        for (SieveMask m : fams[u]) covers[u].push_back(mask_family(c, u, m));
    Coverage out = make_coverage(j.cat, std::move(covers), j.sieve_semantics);
    out.composition_closed_flag = TriState::yes;
    return out;
}

/// Refinement closure, materialized: every family refined by a cover.
inline Coverage ref_closure(const Coverage& j, int cap_bits = 20) {
    const FinCategory& c = *j.cat;
    std::vector<std::vector<Family>> covers(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        int n = family_space_width(c, u, cap_bits);
        std::vector<SieveMask> cover_sieves;
        for (const Family& r : j.covers[u]) cover_sieves.push_back(generated_sieve_mask(c, r));
        for (SieveMask t = 0; t < (SieveMask{1} << n); ++t) {
            SieveMask tbar = generated_sieve_mask(c, mask_family(c, u, t));
            for (SieveMask rbar : cover_sieves)
                if ((rbar & ~tbar) == 0) {
                    covers[u].push_back(mask_family(c, u, t));
                    break;
                }
        }
    }
    Coverage out = make_coverage(j.cat, std::move(covers), false);
    out.refinement_closed_flag = TriState::yes;
    return out;
}

/// Replaces every cover by the sieve it generates.
inline Coverage sifted_closure(const Coverage& j) {
    const FinCategory& c = *j.cat;
    std::vector<std::vector<Family>> covers(c.objects());
    for (int u = 0; u < c.objects(); ++u)
        for (const Family& r : j.covers[u])
            covers[u].push_back(mask_family(c, u, generated_sieve_mask(c, r)));
    Coverage out = make_coverage(j.cat, std::move(covers), j.sieve_semantics);
    // make_coverage re-inserted the identity family; replace it by the
    // maximal sieve so that the result is sifted
    for (int u = 0; u < c.objects(); ++u) {
        std::set<Family> fams;
        for (const Family& r : out.covers[u])
            fams.insert(mask_family(c, u, generated_sieve_mask(c, r)));
        out.covers[u].assign(fams.begin(), fams.end());
    }
    out.sifted_flag = TriState::yes;
    return out;
}

inline bool is_sifted(const Coverage& j) {
    const FinCategory& c = *j.cat;
    for (int u = 0; u < c.objects(); ++u) {
        bool has_max = false;
        for (const Family& r : j.covers[u]) {
            if (!mask_is_sieve(c, u, family_mask(c, r))) return false;
            if (family_mask(c, r) == maximal_sieve_mask(c, u)) has_max = true;
        }
        if (!has_max) return false;
    }
    return true;
}

struct GrothendieckReport {
    bool ok = true;
    std::string witness;
};

/// Axioms G1-G3 for a sifted coverage, checked against the lattice.
inline GrothendieckReport check_grothendieck(const Coverage& jj, std::size_t lattice_cap = 1u << 20) {
    const FinCategory& c = *jj.cat;
    if (!is_sifted(jj)) throw NotSifted("grothendieck check requires covering sieves");
    GrothendieckReport rep;
    auto lat = sieve_lattice(c, lattice_cap);
    std::vector<std::set<SieveMask>> J(c.objects());
    for (int u = 0; u < c.objects(); ++u)
        for (const Family& r : jj.covers[u]) J[u].insert(family_mask(c, r));
    for (int u = 0; u < c.objects(); ++u) {
        if (!J[u].count(maximal_sieve_mask(c, u)))
            return {false, "maximal sieve missing on " + c.object_name(u)};
        for (SieveMask r : J[u])
            for (int g : c.arrows_into(u))
                if (!J[c.dom(g)].count(pullback_sieve_mask(c, g, r)))
                    return {false, "pullback of a covering sieve along " + c.morphism_name(g) + " not covering"};
        const auto& arrows = c.arrows_into(u);
        for (SieveMask rp : lat.sieves[u]) {
            if (J[u].count(rp)) continue;
            for (SieveMask r : J[u]) {
                bool all_good = true;
                for (std::size_t a = 0; a < arrows.size() && all_good; ++a)
                    if (r >> a & 1)
                        all_good = J[c.dom(arrows[a])].count(pullback_sieve_mask(c, arrows[a], rp)) > 0;
                if (all_good)
                    return {false, "local character fails on " + c.object_name(u)};
            }
        }
    }
    return rep;
}

inline bool is_grothendieck(const Coverage& j) { return check_grothendieck(j).ok; }

/// Interior coverage of a sifted coverage: all families whose generated
/// sieve is covering.  Materializes the family space.
inline Coverage interior(const Coverage& jj, int cap_bits = 20) {
    const FinCategory& c = *jj.cat;
    if (!is_sifted(jj)) throw NotSifted("interior requires a sifted coverage");
    std::vector<std::set<SieveMask>> J(c.objects());
    for (int u = 0; u < c.objects(); ++u)
        for (const Family& r : jj.covers[u]) J[u].insert(family_mask(c, r));
    std::vector<std::vector<Family>> covers(c.objects());
    for (int u = 0; u < c.objects(); ++u) {
        int n = family_space_width(c, u, cap_bits);
        for (SieveMask t = 0; t < (SieveMask{1} << n); ++t)
            if (J[u].count(generated_sieve_mask(c, mask_family(c, u, t))))
                covers[u].push_back(mask_family(c, u, t));
    }
    return make_coverage(jj.cat, std::move(covers), false);
}

/// r is saturating iff its generated sieve is covering in the
/// Grothendieck closure.
inline bool is_saturating(const GroCoverage& gro, const Family& r) {
    return gro.is_covering(r.target, generated_sieve_mask(*gro.cat, r));
}

/// Saturation, computed through the Grothendieck closure and interior;
/// the composition-then-refinement route is computed independently and
/// asserted equal at the sieve level.
inline Coverage saturation(const Coverage& j, int cap_bits = 20) {
    const FinCategory& c = *j.cat;
    auto gro = grothendieck_closure(j);
    // independent route: upward closure of the composite-cover sieves
    auto comp = comp_closure(j);
    for (int u = 0; u < c.objects(); ++u) {
        std::set<SieveMask> via_comp;
        std::vector<SieveMask> comp_sieves;
        for (const Family& r : comp.covers[u]) comp_sieves.push_back(generated_sieve_mask(c, r));
        for (SieveMask s : gro.lattice.sieves[u]) {
            for (SieveMask cs : comp_sieves)
                if ((cs & ~s) == 0) {
                    via_comp.insert(s);
                    break;
                }
        }
        std::set<SieveMask> via_gro;
        for (SieveMask s : gro.covering_sieves(u)) via_gro.insert(s);
        if (via_comp != via_gro)
            throw ValidationError("saturation routes disagree on " + c.object_name(u));
    }
    Coverage out = interior(gro.as_coverage(), cap_bits);
    out.saturated_flag = TriState::yes;
    out.refinement_closed_flag = TriState::yes;
    out.composition_closed_flag = TriState::yes;
    return out;
}

/// Sieve-level saturation test: the stored covering sieves coincide
/// with the Grothendieck closure's.
inline bool is_saturated(const Coverage& j) {
    const FinCategory& c = *j.cat;
    auto gro = grothendieck_closure(j);
    for (int u = 0; u < c.objects(); ++u) {
        std::set<SieveMask> own;
        for (const Family& r : j.covers[u]) own.insert(generated_sieve_mask(c, r));
        std::set<SieveMask> gros;
        for (SieveMask s : gro.covering_sieves(u)) gros.insert(s);
        if (own != gros) return false;
    }
    return true;
}

inline Sieve min_covering_sieve(const GroCoverage& gro, int u) {
    SieveMask m = gro.min_covering_mask(u);
    if (!gro.is_covering(u, m))
        throw ValidationError("internal: minimal sieve not covering");
    return Sieve::from_mask(*gro.cat, u, m);
}

/// Meet of two covers in a saturated coverage: the intersection of
/// their generated sieves.
inline Family meet(const Coverage& j, const Family& r, const Family& rp) {
    if (j.saturated_flag != TriState::yes && !is_saturated(j))
        throw NotSaturated("meet requires a saturated coverage");
    if (r.target != rp.target) throw TargetMismatch("meet across targets");
    const FinCategory& c = *j.cat;
    return mask_family(c, r.target, generated_sieve_mask(c, r) & generated_sieve_mask(c, rp));
}

struct CoverageComparison {
    bool contains = false;   // j ⊆ j'
    bool refines = false;    // j ≤ j'
    bool equivalent = false; // mutual refinement
};

inline CoverageComparison compare(const Coverage& j, const Coverage& jp) {
    if (j.cat->objects() != jp.cat->objects() || j.cat->morphisms() != jp.cat->morphisms())
        throw BaseMismatch("coverage comparison across categories");
    const FinCategory& c = *j.cat;
    CoverageComparison out;
    out.contains = true;
    for (int u = 0; u < c.objects() && out.contains; ++u)
        for (const Family& r : j.covers[u])
            if (!jp.contains(r)) {
                out.contains = false;
                break;
            }
    auto le = [&](const Coverage& a, const Coverage& b) {
        for (int u = 0; u < c.objects(); ++u)
            for (const Family& rp : b.covers[u]) {
                SieveMask rpbar = generated_sieve_mask(c, rp);
                bool found = false;
                for (const Family& r : a.covers[u])
                    if ((generated_sieve_mask(c, r) & ~rpbar) == 0) {
                        found = true;
                        break;
                    }
                if (!found) return false;
            }
        return true;
    };
    out.refines = le(j, jp);
    out.equivalent = out.refines && le(jp, j);
    return out;
}

// ---------------------------------------------------------------------------
// Trees of covering families.

/// Paths are stored root-first: {f1, f2, ..., fm} with cod(f1) = target
/// and cod(f_{i+1}) = dom(f_i).  The composite of a path is
/// f1∘f2∘...∘fm.
struct JTree {
    int target = -1;
    std::vector<std::vector<int>> paths; // must include the empty path

    int node_of(const FinCategory& c, const std::vector<int>& path) const {
        return path.empty() ? target : c.dom(path.back());
    }
};

inline void validate_jtree(const FinCategory& c, const Coverage& j, const JTree& t) {
    bool has_empty = false;
    for (const auto& p : t.paths)
        if (p.empty()) has_empty = true;
    if (!has_empty) throw InvalidTree("missing empty path");
    auto present = [&](const std::vector<int>& p) {
        return std::find(t.paths.begin(), t.paths.end(), p) != t.paths.end();
    };
    for (const auto& p : t.paths) {
        if (!p.empty()) {
            std::vector<int> prefix(p.begin(), p.end() - 1);
            if (!present(prefix)) throw InvalidTree("paths are not prefix closed");
        }
        int node = t.target;
        for (int f : p) {
            if (c.cod(f) != node) throw InvalidTree("path does not chain at " + c.morphism_name(f));
            node = c.dom(f);
        }
    }
    for (const auto& p : t.paths) {
        std::vector<int> branches;
        for (const auto& q : t.paths)
            if (q.size() == p.size() + 1 && std::equal(p.begin(), p.end(), q.begin()))
                branches.push_back(q.back());
        if (branches.empty()) continue;
        Family fam = Family::make(c, t.node_of(c, p), branches);
        if (!j.contains(fam)) {
            std::string names;
            for (int f : fam.members) names += c.morphism_name(f) + " ";
            throw InvalidTree("branch set {" + names + "} is not a covering family");
        }
    }
}

/// Composite family of the maximal paths; a height-zero tree composes
/// to the identity family.
inline Family compose_tree(const FinCategory& c, const Coverage& j, const JTree& t) {
    validate_jtree(c, j, t);
    std::vector<int> members;
    for (const auto& p : t.paths) {
        bool maximal = true;
        for (const auto& q : t.paths)
            if (q.size() == p.size() + 1 && std::equal(p.begin(), p.end(), q.begin())) maximal = false;
        if (!maximal) continue;
        if (p.empty()) {
            members.push_back(c.identity(t.target));
            continue;
        }
        int comp = p.front();
        for (std::size_t i = 1; i < p.size(); ++i) comp = c.compose(comp, p[i]);
        members.push_back(comp);
    }
    return Family::make(c, t.target, std::move(members));
}

} // namespace toposcope

#endif
