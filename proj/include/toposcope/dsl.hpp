#ifndef TOPOSCOPE_DSL_HPP
#define TOPOSCOPE_DSL_HPP

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "toposcope/siteforge.hpp"

namespace toposcope::dsl {

struct Span {
    int line = 0;
    int col = 0;
};

struct SyntaxError : ToposError {
    Span span;
    SyntaxError(Span s, const std::string& msg)
        : ToposError("line " + std::to_string(s.line) + ":" + std::to_string(s.col) + ": " + msg),
          span(s) {}
};

struct UnresolvedReference : ToposError {
    Span span;
    UnresolvedReference(Span s, const std::string& msg)
        : ToposError("line " + std::to_string(s.line) + ":" + std::to_string(s.col) +
                     ": unresolved reference: " + msg),
          span(s) {}
};

struct Token {
    enum Kind { Ident, Symbol, End } kind = End;
    std::string text;
    Span span;
};

inline std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto bump = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') {
                bump(text[i]);
                ++i;
            }
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            bump(c);
            ++i;
            continue;
        }
        Span here{line, col};
        if (isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::string ident;
            while (i < text.size() &&
                   (isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                ident += text[i];
                bump(text[i]);
                ++i;
            }
            out.push_back({Token::Ident, ident, here});
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            out.push_back({Token::Symbol, "->", here});
            bump('-');
            bump('>');
            i += 2;
            continue;
        }
        std::string sym(1, c);
        if (std::string("{};:=,[]").find(c) == std::string::npos)
            throw SyntaxError(here, "unexpected character '" + sym + "'");
        out.push_back({Token::Symbol, sym, here});
        bump(c);
        ++i;
    }
    out.push_back({Token::End, "", {line, col}});
    return out;
}

struct NamedSite {
    std::string name;
    Coverage coverage;
};
struct NamedPresheaf {
    std::string name;
    std::string site;
    Presheaf value;
};
struct NamedMap {
    std::string name;
    std::string site;
    std::string src, dst;
    NatTrans value;
};
struct NamedFunctor {
    std::string name;
    std::string src_site, dst_site;
    FinFunctor value;
};
struct NamedPoint {
    std::string name;
    std::string site;
    SetDiagram value;
};

struct SiteDocument {
    std::vector<NamedSite> sites;
    std::vector<NamedPresheaf> presheaves;
    std::vector<NamedMap> maps;
    std::vector<NamedFunctor> functors;
    std::vector<NamedPoint> points;

    const NamedSite& site(const std::string& name) const {
        for (const auto& s : sites)
            if (s.name == name) return s;
        throw UnresolvedReference({}, "site " + name);
    }
    const NamedPresheaf& presheaf(const std::string& name) const {
        for (const auto& p : presheaves)
            if (p.name == name) return p;
        throw UnresolvedReference({}, "presheaf " + name);
    }
    const NamedMap& map(const std::string& name) const {
        for (const auto& m : maps)
            if (m.name == name) return m;
        throw UnresolvedReference({}, "map " + name);
    }
    const NamedFunctor& functor(const std::string& name) const {
        for (const auto& f : functors)
            if (f.name == name) return f;
        throw UnresolvedReference({}, "functor " + name);
    }
    const NamedPoint& point(const std::string& name) const {
        for (const auto& p : points)
            if (p.name == name) return p;
        throw UnresolvedReference({}, "point " + name);
    }
};

class Parser {
public:
    Parser(std::vector<Token> toks, SizeLimits limits) : toks_(std::move(toks)), limits_(limits) {}

    SiteDocument parse() {
        SiteDocument doc;
        while (!at_end()) {
            const Token& t = peek();
            if (t.kind != Token::Ident)
                throw SyntaxError(t.span, "expected 'site', 'presheaf', 'map', 'functor' or 'point'");
            if (t.text == "site")
                parse_site(doc);
            else if (t.text == "presheaf")
                parse_valued(doc, /*covariant=*/false);
            else if (t.text == "point")
                parse_valued(doc, /*covariant=*/true);
            else if (t.text == "map")
                parse_map(doc);
            else if (t.text == "functor")
                parse_functor(doc);
            else
                throw SyntaxError(t.span, "expected 'site', 'presheaf', 'map', 'functor' or 'point'");
        }
        if (doc.sites.empty()) throw SyntaxError(peek().span, "expected 'site'");
        return doc;
    }

private:
    std::vector<Token> toks_;
    SizeLimits limits_;
    std::size_t pos_ = 0;

    bool at_end() const { return toks_[pos_].kind == Token::End; }
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }
    Token expect_ident(const std::string& what) {
        Token t = take();
        if (t.kind != Token::Ident) throw SyntaxError(t.span, "expected " + what);
        return t;
    }
    void expect_symbol(const std::string& sym) {
        Token t = take();
        if (t.kind != Token::Symbol || t.text != sym) throw SyntaxError(t.span, "expected '" + sym + "'");
    }
    void expect_keyword(const std::string& kw) {
        Token t = take();
        if (t.kind != Token::Ident || t.text != kw) throw SyntaxError(t.span, "expected '" + kw + "'");
    }
    bool peek_symbol(const std::string& sym) const {
        return peek().kind == Token::Symbol && peek().text == sym;
    }

    void parse_site(SiteDocument& doc) {
        expect_keyword("site");
        Token name = expect_ident("site name");
        expect_symbol("{");
        std::vector<std::string> objects;
        std::vector<MorDecl> mors;
        std::vector<CompDecl> comps;
        struct RawCover {
            std::string target;
            std::vector<std::string> members;
            Span span;
        };
        std::vector<RawCover> covers;
        while (!peek_symbol("}")) {
            Token kw = expect_ident("'objects', 'mor', 'comp' or 'cover'");
            if (kw.text == "objects") {
                while (!peek_symbol(";")) objects.push_back(expect_ident("object name").text);
                expect_symbol(";");
            } else if (kw.text == "mor") {
                std::vector<Token> names;
                names.push_back(expect_ident("morphism name"));
                while (peek_symbol(",")) {
                    expect_symbol(",");
                    names.push_back(expect_ident("morphism name"));
                }
                expect_symbol(":");
                Token dom = expect_ident("domain object");
                expect_symbol("->");
                Token cod = expect_ident("codomain object");
                expect_symbol(";");
                for (const Token& n : names) {
                    int d = find_object(objects, dom);
                    int c0 = find_object(objects, cod);
                    mors.push_back({n.text, d, c0});
                }
            } else if (kw.text == "comp") {
                Token g = expect_ident("morphism name");
                Token f = expect_ident("morphism name");
                expect_symbol("=");
                Token h = expect_ident("morphism name");
                expect_symbol(";");
                comps.push_back({g.text, f.text, h.text});
            } else if (kw.text == "cover") {
                Token target = expect_ident("object name");
                expect_symbol("=");
                expect_symbol("[");
                RawCover rc{target.text, {}, target.span};
                while (!peek_symbol("]")) rc.members.push_back(expect_ident("morphism name").text);
                expect_symbol("]");
                expect_symbol(";");
                covers.push_back(std::move(rc));
            } else {
                throw SyntaxError(kw.span, "expected 'objects', 'mor', 'comp' or 'cover'");
            }
        }
        expect_symbol("}");
        FinCategory cat;
        try {
            cat = validate_category(objects, mors, comps, limits_);
        } catch (const ToposError& e) {
            throw SyntaxError(name.span, "site " + name.text + ": " + e.what());
        }
        auto catp = std::make_shared<FinCategory>(std::move(cat));
        std::vector<std::vector<Family>> families(catp->objects());
        for (const RawCover& rc : covers) {
            int target;
            try {
                target = catp->object_index(rc.target);
            } catch (const ToposError&) {
                throw UnresolvedReference(rc.span, "object " + rc.target);
            }
            std::vector<int> members;
            for (const std::string& m : rc.members) {
                try {
                    members.push_back(catp->morphism_index(m));
                } catch (const ToposError&) {
                    throw UnresolvedReference(rc.span, "morphism " + m);
                }
            }
            try {
                families[target].push_back(Family::make(*catp, target, std::move(members)));
            } catch (const ToposError& e) {
                throw SyntaxError(rc.span, e.what());
            }
        }
        doc.sites.push_back({name.text, make_coverage(catp, std::move(families))});
    }

    static int find_object(const std::vector<std::string>& objects, const Token& t) {
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (objects[i] == t.text) return static_cast<int>(i);
        throw UnresolvedReference(t.span, "object " + t.text);
    }

    /// Shared grammar for presheaves (contravariant) and points
    /// (covariant): values per object, then per-morphism element maps.
    void parse_valued(SiteDocument& doc, bool covariant) {
        Token kw = take(); // presheaf | point
        Token name = expect_ident("name");
        expect_keyword("on");
        Token site_name = expect_ident("site name");
        const NamedSite* site = nullptr;
        for (const auto& s : doc.sites)
            if (s.name == site_name.text) site = &s;
        if (!site) throw UnresolvedReference(site_name.span, "site " + site_name.text);
        const FinCategory& c = *site->coverage.cat;
        expect_symbol("{");
        std::vector<std::optional<FinSetObj>> values(c.objects());
        struct RawAction {
            int mor;
            std::vector<std::pair<std::string, std::string>> pairs;
            Span span;
        };
        std::vector<RawAction> actions;
        while (!peek_symbol("}")) {
            Token head = expect_ident("object or morphism name");
            if (peek_symbol("=")) {
                expect_symbol("=");
                expect_symbol("{");
                FinSetObj s;
                while (!peek_symbol("}")) s.elements.push_back(expect_ident("element name").text);
                expect_symbol("}");
                expect_symbol(";");
                int obj;
                try {
                    obj = c.object_index(head.text);
                } catch (const ToposError&) {
                    throw UnresolvedReference(head.span, "object " + head.text);
                }
                s.check_distinct();
                values[obj] = std::move(s);
            } else {
                expect_symbol(":");
                RawAction ra;
                ra.span = head.span;
                try {
                    ra.mor = c.morphism_index(head.text);
                } catch (const ToposError&) {
                    throw UnresolvedReference(head.span, "morphism " + head.text);
                }
                while (true) {
                    Token from = expect_ident("element name");
                    expect_symbol("->");
                    Token to = expect_ident("element name");
                    ra.pairs.emplace_back(from.text, to.text);
                    if (peek_symbol(",")) {
                        expect_symbol(",");
                        continue;
                    }
                    break;
                }
                expect_symbol(";");
                actions.push_back(std::move(ra));
            }
        }
        expect_symbol("}");
        for (int u = 0; u < c.objects(); ++u)
            if (!values[u]) values[u] = FinSetObj{};
        auto element_index = [&](int obj, const std::string& el, Span sp) {
            for (int e = 0; e < values[obj]->size(); ++e)
                if (values[obj]->elements[e] == el) return e;
            throw UnresolvedReference(sp, "element " + el + " of " + c.object_name(obj));
        };
        std::vector<FinFunction> act(c.morphisms());
        std::vector<char> assigned(c.morphisms(), 0);
        for (int u = 0; u < c.objects(); ++u) {
            act[c.identity(u)] = FinFunction::identity(*values[u]);
            assigned[c.identity(u)] = 1;
        }
        for (const RawAction& ra : actions) {
            int from_obj = covariant ? c.dom(ra.mor) : c.cod(ra.mor);
            int to_obj = covariant ? c.cod(ra.mor) : c.dom(ra.mor);
            FinFunction f{*values[from_obj], *values[to_obj],
                          std::vector<int>(values[from_obj]->size(), -1)};
            for (const auto& [a, b] : ra.pairs)
                f.map[element_index(from_obj, a, ra.span)] = element_index(to_obj, b, ra.span);
            for (int e = 0; e < values[from_obj]->size(); ++e)
                if (f.map[e] < 0)
                    throw SyntaxError(ra.span, "morphism " + c.morphism_name(ra.mor) +
                                                   " misses element " +
                                                   values[from_obj]->elements[e]);
            act[ra.mor] = std::move(f);
            assigned[ra.mor] = 1;
        }
        for (int m = 0; m < c.morphisms(); ++m)
            if (!assigned[m]) {
                if ((covariant ? c.dom(m) : c.cod(m)) >= 0 &&
                    values[covariant ? c.dom(m) : c.cod(m)]->size() == 0) {
                    int from_obj = covariant ? c.dom(m) : c.cod(m);
                    int to_obj = covariant ? c.cod(m) : c.dom(m);
                    act[m] = FinFunction{*values[from_obj], *values[to_obj], {}};
                    continue;
                }
                throw SyntaxError(name.span,
                                  "missing action for morphism " + c.morphism_name(m));
            }
        if (covariant) {
            SetDiagram a{site->coverage.cat, {}, act};
            for (int u = 0; u < c.objects(); ++u) a.at.push_back(*values[u]);
            try {
                a.validate();
            } catch (const ToposError& e) {
                throw SyntaxError(name.span, std::string("point ") + name.text + ": " + e.what());
            }
            doc.points.push_back({name.text, site_name.text, std::move(a)});
        } else {
            Presheaf x{site->coverage.cat, {}, act};
            for (int u = 0; u < c.objects(); ++u) x.at.push_back(*values[u]);
            try {
                x.validate();
            } catch (const ToposError& e) {
                throw SyntaxError(name.span, std::string("presheaf ") + name.text + ": " + e.what());
            }
            doc.presheaves.push_back({name.text, site_name.text, std::move(x)});
        }
    }

    void parse_map(SiteDocument& doc) {
        expect_keyword("map");
        Token name = expect_ident("map name");
        expect_symbol(":");
        Token src = expect_ident("presheaf name");
        expect_symbol("->");
        Token dst = expect_ident("presheaf name");
        expect_symbol("{");
        const NamedPresheaf* ps = nullptr;
        const NamedPresheaf* pd = nullptr;
        for (const auto& p : doc.presheaves) {
            if (p.name == src.text) ps = &p;
            if (p.name == dst.text) pd = &p;
        }
        if (!ps) throw UnresolvedReference(src.span, "presheaf " + src.text);
        if (!pd) throw UnresolvedReference(dst.span, "presheaf " + dst.text);
        if (ps->site != pd->site) throw SyntaxError(name.span, "map across different sites");
        const FinCategory& c = *ps->value.base;
        NatTrans n{ps->value, pd->value, {}};
        n.component.resize(c.objects());
        for (int u = 0; u < c.objects(); ++u) n.component[u].assign(ps->value.at[u].size(), -1);
        while (!peek_symbol("}")) {
            Token obj = expect_ident("object name");
            int u;
            try {
                u = c.object_index(obj.text);
            } catch (const ToposError&) {
                throw UnresolvedReference(obj.span, "object " + obj.text);
            }
            expect_symbol(":");
            while (true) {
                Token from = expect_ident("element name");
                expect_symbol("->");
                Token to = expect_ident("element name");
                int e = -1, d = -1;
                for (int k = 0; k < ps->value.at[u].size(); ++k)
                    if (ps->value.at[u].elements[k] == from.text) e = k;
                for (int k = 0; k < pd->value.at[u].size(); ++k)
                    if (pd->value.at[u].elements[k] == to.text) d = k;
                if (e < 0) throw UnresolvedReference(from.span, "element " + from.text);
                if (d < 0) throw UnresolvedReference(to.span, "element " + to.text);
                n.component[u][e] = d;
                if (peek_symbol(",")) {
                    expect_symbol(",");
                    continue;
                }
                break;
            }
            expect_symbol(";");
        }
        expect_symbol("}");
        for (int u = 0; u < c.objects(); ++u)
            for (int e = 0; e < ps->value.at[u].size(); ++e)
                if (n.component[u][e] < 0)
                    throw SyntaxError(name.span, "map misses element " + ps->value.at[u].elements[e]);
        try {
            n.validate();
        } catch (const ToposError& e) {
            throw SyntaxError(name.span, std::string("map ") + name.text + ": " + e.what());
        }
        doc.maps.push_back({name.text, ps->site, src.text, dst.text, std::move(n)});
    }

    void parse_functor(SiteDocument& doc) {
        expect_keyword("functor");
        Token name = expect_ident("functor name");
        expect_symbol(":");
        Token src = expect_ident("site name");
        expect_symbol("->");
        Token dst = expect_ident("site name");
        expect_symbol("{");
        const NamedSite* ss = nullptr;
        const NamedSite* sd = nullptr;
        for (const auto& s : doc.sites) {
            if (s.name == src.text) ss = &s;
            if (s.name == dst.text) sd = &s;
        }
        if (!ss) throw UnresolvedReference(src.span, "site " + src.text);
        if (!sd) throw UnresolvedReference(dst.span, "site " + dst.text);
        const FinCategory& cs = *ss->coverage.cat;
        const FinCategory& cd = *sd->coverage.cat;
        FinFunctor f{ss->coverage.cat, sd->coverage.cat, {}, {}};
        f.obj_map.assign(cs.objects(), -1);
        f.mor_map.assign(cs.morphisms(), -1);
        while (!peek_symbol("}")) {
            Token kw = expect_ident("'obj' or 'mor'");
            Token from = expect_ident("name");
            expect_symbol("->");
            Token to = expect_ident("name");
            expect_symbol(";");
            try {
                if (kw.text == "obj")
                    f.obj_map[cs.object_index(from.text)] = cd.object_index(to.text);
                else if (kw.text == "mor")
                    f.mor_map[cs.morphism_index(from.text)] = cd.morphism_index(to.text);
                else
                    throw SyntaxError(kw.span, "expected 'obj' or 'mor'");
            } catch (const SyntaxError&) {
                throw;
            } catch (const ToposError& e) {
                throw UnresolvedReference(from.span, e.what());
            }
        }
        expect_symbol("}");
        for (int u = 0; u < cs.objects(); ++u)
            if (f.obj_map[u] < 0) throw SyntaxError(name.span, "functor misses object " + cs.object_name(u));
        for (int m = 0; m < cs.morphisms(); ++m)
            if (f.mor_map[m] < 0) {
                if (cs.is_identity(m)) {
                    f.mor_map[m] = cd.identity(f.obj_map[cs.dom(m)]);
                    continue;
                }
                throw SyntaxError(name.span, "functor misses morphism " + cs.morphism_name(m));
            }
        try {
            f.validate();
        } catch (const ToposError& e) {
            throw SyntaxError(name.span, std::string("functor ") + name.text + ": " + e.what());
        }
        doc.functors.push_back({name.text, src.text, dst.text, std::move(f)});
    }
};

inline SiteDocument parse(const std::string& text, const SizeLimits& limits = SizeLimits{}) {
    return Parser(lex(text), limits).parse();
}

// ---------------------------------------------------------------------------
// Canonical printing.

inline void print_valued(std::ostringstream& out, const std::string& kind, const std::string& name,
                         const std::string& site, const FinCategory& c,
                         const std::vector<FinSetObj>& at, const std::vector<FinFunction>& act,
                         bool covariant) {
    out << kind << " " << name << " on " << site << " {\n";
    for (int u = 0; u < c.objects(); ++u) {
        out << "  " << c.object_name(u) << " = {";
        for (int e = 0; e < at[u].size(); ++e) out << (e ? " " : "") << at[u].elements[e];
        out << "};\n";
    }
    for (int m = 0; m < c.morphisms(); ++m) {
        if (c.is_identity(m)) continue;
        int from_obj = covariant ? c.dom(m) : c.cod(m);
        int to_obj = covariant ? c.cod(m) : c.dom(m);
        if (at[from_obj].size() == 0) continue;
        out << "  " << c.morphism_name(m) << " : ";
        for (int e = 0; e < at[from_obj].size(); ++e) {
            if (e) out << ", ";
            out << at[from_obj].elements[e] << " -> " << at[to_obj].elements[act[m].map[e]];
        }
        out << ";\n";
    }
    out << "}\n";
}

inline std::string print(const SiteDocument& doc) {
    std::ostringstream out;
    for (const auto& s : doc.sites) {
        const FinCategory& c = *s.coverage.cat;
        out << "site " << s.name << " {\n";
        out << "  objects";
        for (int u = 0; u < c.objects(); ++u) out << " " << c.object_name(u);
        out << ";\n";
        for (int m = 0; m < c.morphisms(); ++m) {
            if (c.is_identity(m)) continue;
            out << "  mor " << c.morphism_name(m) << " : " << c.object_name(c.dom(m)) << " -> "
                << c.object_name(c.cod(m)) << ";\n";
        }
        for (int g = 0; g < c.morphisms(); ++g)
            for (int f = 0; f < c.morphisms(); ++f) {
                if (!c.composable(g, f) || c.is_identity(g) || c.is_identity(f)) continue;
                out << "  comp " << c.morphism_name(g) << " " << c.morphism_name(f) << " = "
                    << c.morphism_name(c.compose(g, f)) << ";\n";
            }
        for (int u = 0; u < c.objects(); ++u)
            for (const Family& r : s.coverage.covers[u]) {
                if (r.members.size() == 1 && c.is_identity(r.members[0])) continue;
                out << "  cover " << c.object_name(u) << " = [";
                for (std::size_t i = 0; i < r.members.size(); ++i)
                    out << (i ? " " : "") << c.morphism_name(r.members[i]);
                out << "];\n";
            }
        out << "}\n";
    }
    for (const auto& p : doc.presheaves)
        print_valued(out, "presheaf", p.name, p.site, *p.value.base, p.value.at, p.value.action, false);
    for (const auto& p : doc.points)
        print_valued(out, "point", p.name, p.site, *p.value.shape, p.value.at, p.value.act, true);
    for (const auto& m : doc.maps) {
        out << "map " << m.name << " : " << m.src << " -> " << m.dst << " {\n";
        const FinCategory& c = *m.value.src.base;
        for (int u = 0; u < c.objects(); ++u) {
            if (m.value.src.at[u].size() == 0) continue;
            out << "  " << c.object_name(u) << " : ";
            for (int e = 0; e < m.value.src.at[u].size(); ++e) {
                if (e) out << ", ";
                out << m.value.src.at[u].elements[e] << " -> "
                    << m.value.dst.at[u].elements[m.value.component[u][e]];
            }
            out << ";\n";
        }
        out << "}\n";
    }
    for (const auto& f : doc.functors) {
        out << "functor " << f.name << " : " << f.src_site << " -> " << f.dst_site << " {\n";
        const FinCategory& cs = *f.value.src;
        const FinCategory& cd = *f.value.dst;
        for (int u = 0; u < cs.objects(); ++u)
            out << "  obj " << cs.object_name(u) << " -> " << cd.object_name(f.value.obj_map[u]) << ";\n";
        for (int m = 0; m < cs.morphisms(); ++m) {
            if (cs.is_identity(m)) continue;
            out << "  mor " << cs.morphism_name(m) << " -> " << cd.morphism_name(f.value.mor_map[m])
                << ";\n";
        }
        out << "}\n";
    }
    return out.str();
}

inline SiteDocument fixture_document(const Fixture& fx) {
    SiteDocument doc;
    for (const auto& [name, cov] : fx.sites) doc.sites.push_back({name, cov});
    for (const auto& [name, site, value] : fx.presheaves) doc.presheaves.push_back({name, site, value});
    for (const auto& [name, site, value] : fx.maps) doc.maps.push_back({name, site, "", "", value});
    for (const auto& [name, src, dst, value] : fx.functors) doc.functors.push_back({name, src, dst, value});
    for (const auto& [name, site, value] : fx.points) doc.points.push_back({name, site, value});
    // map src/dst presheaf names resolve by value identity
    for (auto& m : doc.maps)
        for (const auto& p : doc.presheaves) {
            if (p.value.signature() == m.value.src.signature() && p.value.at == m.value.src.at)
                m.src = p.name;
            if (p.value.signature() == m.value.dst.signature() && p.value.at == m.value.dst.at)
                m.dst = p.name;
        }
    return doc;
}

} // namespace toposcope::dsl

#endif
