// Command-line front end: parses .site documents and runs the
// site-theoretic toolbox over them.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "toposcope/dsl.hpp"
#include "toposcope/sheafify.hpp"
#include "toposcope/sitemorph.hpp"

using json = nlohmann::json;
using namespace toposcope;

namespace {

struct Options {
    std::string path;
    std::string site;
    bool as_json = false;
    SizeLimits limits;
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

dsl::SiteDocument load(const Options& opt) { return dsl::parse(read_input(opt.path), opt.limits); }

const dsl::NamedSite& pick_site(const dsl::SiteDocument& doc, const Options& opt) {
    if (opt.site.empty()) return doc.sites.front();
    return doc.site(opt.site);
}

json family_json(const FinCategory& c, const Family& r) {
    json arr = json::array();
    for (int f : r.members) arr.push_back(c.morphism_name(f));
    return arr;
}

json coverage_json(const Coverage& cov) {
    const FinCategory& c = *cov.cat;
    json out = json::object();
    for (int u = 0; u < c.objects(); ++u) {
        json families = json::array();
        for (const Family& r : cov.covers[u]) families.push_back(family_json(c, r));
        out[c.object_name(u)] = families;
    }
    return out;
}

json presheaf_json(const Presheaf& x) {
    const FinCategory& c = *x.base;
    json values = json::object();
    for (int u = 0; u < c.objects(); ++u) {
        json elems = json::array();
        for (const auto& e : x.at[u].elements) elems.push_back(e);
        values[c.object_name(u)] = elems;
    }
    json actions = json::object();
    for (int m = 0; m < c.morphisms(); ++m) {
        if (c.is_identity(m)) continue;
        json entries = json::object();
        for (int e = 0; e < x.at[c.cod(m)].size(); ++e)
            entries[x.at[c.cod(m)].elements[e]] = x.at[c.dom(m)].elements[x.action[m].map[e]];
        actions[c.morphism_name(m)] = entries;
    }
    return json{{"values", values}, {"restrictions", actions}};
}

void emit(const Options& opt, const std::string& site, const json& result, const std::string& text) {
    if (opt.as_json) {
        json out{{"schema_version", 1}, {"site", site}, {"result", result}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

std::string coverage_text(const Coverage& cov) {
    const FinCategory& c = *cov.cat;
    std::ostringstream out;
    for (int u = 0; u < c.objects(); ++u) {
        out << c.object_name(u) << ":";
        for (const Family& r : cov.covers[u]) {
            out << " [";
            for (std::size_t i = 0; i < r.members.size(); ++i)
                out << (i ? " " : "") << c.morphism_name(r.members[i]);
            out << "]";
        }
        out << "\n";
    }
    return out.str();
}

std::string presheaf_text(const Presheaf& x, const std::string& name) {
    std::ostringstream out;
    dsl::print_valued(out, "presheaf", name, "-", *x.base, x.at, x.action, false);
    return out.str();
}

int run(const Options& opt, const std::string& command, const std::string& mode,
        const std::string& presheaf_name, const std::string& map_name, const std::string& functor_name,
        const std::string& point_name, int bound, bool sheaf_omega, bool verbose,
        const std::string& fixture_name) {
    if (command == "fixture") {
        std::cout << dsl::print(dsl::fixture_document(build_fixture(fixture_name)));
        return 0;
    }

    auto doc = load(opt);
    const auto& site = pick_site(doc, opt);
    const Coverage& cov = site.coverage;
    const FinCategory& c = *cov.cat;

    if (command == "validate") {
        auto viol = coverage_violation(cov);
        json result{{"objects", c.objects()},
                    {"morphisms", c.morphisms()},
                    {"is_coverage", !viol.has_value()},
                    {"presheaves", doc.presheaves.size()},
                    {"maps", doc.maps.size()},
                    {"functors", doc.functors.size()},
                    {"points", doc.points.size()}};
        std::ostringstream text;
        text << "site " << site.name << ": " << c.objects() << " objects, " << c.morphisms()
             << " morphisms\n";
        if (viol)
            text << "coverage axiom fails at object " << c.object_name(viol->object) << "\n";
        else
            text << "coverage axiom holds\n";
        emit(opt, site.name, result, text.str());
        return viol ? 1 : 0;
    }
    if (command == "closure") {
        Coverage closed = cov;
        if (mode == "ref")
            closed = ref_closure(cov);
        else if (mode == "comp")
            closed = comp_closure(cov);
        else if (mode == "sifted")
            closed = sifted_closure(cov);
        else if (mode == "sat")
            closed = saturation(cov);
        else if (mode == "gro")
            closed = grothendieck_closure(cov).as_coverage();
        else
            throw ValidationError("unknown closure mode " + mode);
        emit(opt, site.name, coverage_json(closed), coverage_text(closed));
        return 0;
    }
    if (command == "is-sheaf") {
        const auto& x = doc.presheaf(presheaf_name);
        bool ok = is_sheaf(cov, x.value);
        emit(opt, site.name, json{{"presheaf", presheaf_name}, {"is_sheaf", ok}},
             presheaf_name + (ok ? " is a sheaf\n" : " is not a sheaf\n"));
        return 0;
    }
    if (command == "sheafify") {
        const auto& x = doc.presheaf(presheaf_name);
        auto gro = grothendieck_closure(cov);
        Presheaf result;
        if (mode == "plus2")
            result = sheafify(gro, x.value).sheaf;
        else if (mode == "dagger")
            result = dagger(gro, cov, x.value).output;
        else
            throw ValidationError("unknown sheafify method " + mode);
        std::ostringstream text;
        text << presheaf_text(result, presheaf_name + "_sheafified");
        if (verbose) {
            auto other =
                mode == "plus2" ? dagger(gro, cov, x.value).output : sheafify(gro, x.value).sheaf;
            auto iso = find_iso(result, other);
            text << "# agreement of plus2 and dagger: " << (iso ? "isomorphic" : "NOT isomorphic")
                 << "\n";
            if (iso)
                for (int u = 0; u < c.objects(); ++u) {
                    text << "#   " << c.object_name(u) << ":";
                    for (int e = 0; e < result.at[u].size(); ++e)
                        text << " " << result.at[u].elements[e] << "->"
                             << other.at[u].elements[iso->component[u][e]];
                    text << "\n";
                }
        }
        emit(opt, site.name, presheaf_json(result), text.str());
        return 0;
    }
    if (command == "local") {
        const auto& m = doc.map(map_name);
        auto gro = grothendieck_closure(cov);
        bool ok;
        if (mode == "epi")
            ok = is_local_epi(gro, m.value);
        else if (mode == "mono")
            ok = is_local_mono(gro, m.value);
        else if (mode == "iso")
            ok = is_local_iso(gro, m.value);
        else if (mode == "strong-epi")
            ok = is_strong_local_epi(cov, m.value);
        else
            throw ValidationError("unknown local check " + mode);
        emit(opt, site.name, json{{"map", map_name}, {"check", mode}, {"holds", ok}},
             map_name + ": local " + mode + " = " + (ok ? "true" : "false") + "\n");
        return 0;
    }
    if (command == "classify-functor") {
        const auto& f = doc.functor(functor_name);
        const auto& src = doc.site(f.src_site).coverage;
        const auto& dst = doc.site(f.dst_site).coverage;
        auto src_gro = grothendieck_closure(src);
        auto dst_gro = grothendieck_closure(dst);
        bool rep = is_representably_flat(f.value);
        bool covflat = is_covering_flat(f.value, dst_gro);
        bool morph = covflat && preserves_saturating_families(f.value, src_gro, dst_gro);
        bool comorph = is_comorphism(f.value, src_gro, dst_gro);
        auto dense = check_dense(f.value, src_gro, dst_gro);
        json result{{"representably_flat", rep},
                    {"covering_flat", covflat},
                    {"morphism", morph},
                    {"comorphism", comorph},
                    {"dense", dense.ok()}};
        std::ostringstream text;
        text << functor_name << ": representably_flat=" << rep << " covering_flat=" << covflat
             << " morphism=" << morph << " comorphism=" << comorph << " dense=" << dense.ok() << "\n";
        emit(opt, site.name, result, text.str());
        return 0;
    }
    if (command == "morita") {
        const auto& f = doc.functor(functor_name);
        const auto& src = doc.site(f.src_site).coverage;
        const auto& dst = doc.site(f.dst_site).coverage;
        auto src_gro = grothendieck_closure(src);
        auto dst_gro = grothendieck_closure(dst);
        auto rep = check_morita(f.value, src, dst, src_gro, dst_gro, all_sheaves(src, bound),
                                all_sheaves(dst, bound));
        emit(opt, site.name,
             json{{"functor", functor_name}, {"bound", bound}, {"morita", rep.ok}, {"witness", rep.witness}},
             functor_name + ": morita(bound " + std::to_string(bound) + ") = " +
                 (rep.ok ? "true" : "false") + (rep.ok ? "" : " (" + rep.witness + ")") + "\n");
        return 0;
    }
    if (command == "stalk") {
        const auto& p = doc.point(point_name);
        const auto& x = doc.presheaf(presheaf_name);
        auto s = stalk(x.value, p.value);
        json elems = json::array();
        for (const auto& e : s.elements) elems.push_back(e);
        std::ostringstream text;
        text << "stalk of " << presheaf_name << " at " << point_name << ": " << s.size()
             << " germ(s)\n";
        for (const auto& e : s.elements) text << "  " << e << "\n";
        emit(opt, site.name, json{{"point", point_name}, {"presheaf", presheaf_name}, {"stalk", elems}},
             text.str());
        return 0;
    }
    if (command == "omega") {
        Presheaf omega = sheaf_omega ? omega_sheaf(grothendieck_closure(cov)) : omega_presheaf(cov.cat);
        emit(opt, site.name, presheaf_json(omega),
             presheaf_text(omega, sheaf_omega ? "omega_sheaf" : "omega"));
        return 0;
    }
    if (command == "export") {
        json sites = json::object();
        for (const auto& s : doc.sites) sites[s.name] = coverage_json(s.coverage);
        json presheaves = json::object();
        for (const auto& p : doc.presheaves) presheaves[p.name] = presheaf_json(p.value);
        emit(opt, site.name, json{{"sites", sites}, {"presheaves", presheaves}}, dsl::print(doc));
        return 0;
    }
    throw ValidationError("unknown command " + command);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"toposcope: sites, sheaves and sheafification over finite categories"};
    app.require_subcommand(1);

    Options opt;
    if (const char* env = std::getenv("TOPOSCOPE_MAX_ELEMENTS")) opt.limits.max_elements = std::atoi(env);

    std::string mode, presheaf_name, map_name, functor_name, point_name, fixture_name;
    int bound = 2;
    bool sheaf_omega = false, verbose = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", opt.path, "input .site file, or - for stdin")->required();
        cmd->add_option("--site", opt.site, "site to operate on (default: first)");
        cmd->add_flag("--json", opt.as_json, "machine-readable output");
        cmd->add_option("--max-objects", opt.limits.max_objects, "object cap");
        cmd->add_option("--max-morphisms", opt.limits.max_morphisms, "morphism cap");
        cmd->add_option("--max-elements", opt.limits.max_elements, "element cap");
    };

    auto* validate = app.add_subcommand("validate", "check the document and the coverage axiom");
    add_common(validate);
    auto* closure = app.add_subcommand("closure", "compute a closure of the coverage");
    closure->add_option("--mode", mode, "ref|comp|sifted|sat|gro")->required();
    add_common(closure);
    auto* issheaf = app.add_subcommand("is-sheaf", "test the sheaf condition");
    issheaf->add_option("--presheaf", presheaf_name)->required();
    add_common(issheaf);
    auto* sheafifyc = app.add_subcommand("sheafify", "sheafify a presheaf");
    sheafifyc->add_option("--presheaf", presheaf_name)->required();
    sheafifyc->add_option("--method", mode, "plus2|dagger")->default_val("plus2");
    sheafifyc->add_flag("--verbose", verbose, "print the plus2/dagger agreement witness");
    add_common(sheafifyc);
    auto* local = app.add_subcommand("local", "local epi/mono/iso tests for a map");
    local->add_option("--check", mode, "epi|mono|iso|strong-epi")->required();
    local->add_option("--map", map_name)->required();
    add_common(local);
    auto* classify = app.add_subcommand("classify-functor", "flatness and morphism classification");
    classify->add_option("--functor", functor_name)->required();
    add_common(classify);
    auto* morita = app.add_subcommand("morita", "bounded Morita-equivalence check");
    morita->add_option("--functor", functor_name)->required();
    morita->add_option("--bound", bound, "value-size bound")->default_val(2);
    add_common(morita);
    auto* stalkc = app.add_subcommand("stalk", "stalk of a presheaf at a point");
    stalkc->add_option("--point", point_name)->required();
    stalkc->add_option("--presheaf", presheaf_name)->required();
    add_common(stalkc);
    auto* omega = app.add_subcommand("omega", "subobject classifier");
    omega->add_flag("--sheaf", sheaf_omega, "classifier of the sheaf topos");
    add_common(omega);
    auto* fixture = app.add_subcommand("fixture", "emit a built-in site document");
    fixture
        ->add_option("name", fixture_name,
                     "remark|sierpinski|sierpinski_basis|alexandrov|finset2|finset3")
        ->required();
    auto* exportc = app.add_subcommand("export", "canonical print or JSON of the document");
    add_common(exportc);

    CLI11_PARSE(app, argc, argv);

    std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(opt, command, mode, presheaf_name, map_name, functor_name, point_name, bound,
                   sheaf_omega, verbose, fixture_name);
    } catch (const dsl::SyntaxError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const dsl::UnresolvedReference& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ToposError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
