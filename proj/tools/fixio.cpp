#include "fixio.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace tc::io {

namespace {

template <class T>
T field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw ParseError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("field '") + key + "': " + e.what());
    }
}

void expect_schema(const json& j, const std::string& name)
{
    auto s = field<std::string>(j, "schema");
    if (s != name)
        throw ParseError("expected schema '" + name + "', got '" + s + "'");
    auto v = field<int>(j, "version");
    if (v != schema_version)
        throw ParseError("unsupported " + name + " version " + std::to_string(v));
}

json header(const char* schema)
{
    return {{"schema", schema}, {"version", schema_version}};
}

int lookup(const std::map<std::string, int>& m, const std::string& key, const char* what)
{
    auto it = m.find(key);
    if (it == m.end())
        throw ParseError(std::string("unknown ") + what + " '" + key + "'");
    return it->second;
}

std::map<std::string, int> index_of(const std::vector<std::string>& labels, const char* what)
{
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!m.emplace(labels[i], int(i)).second)
            throw ParseError(std::string("duplicate ") + what + " '" + labels[i] + "'");
    return m;
}

void check_range(const std::vector<int>& v, std::size_t bound, const std::string& what)
{
    for (int x : v)
        if (x < 0 || std::size_t(x) >= bound)
            throw ParseError(what + ": index " + std::to_string(x) + " out of range");
}

json category_body(const FinCat& c)
{
    json j;
    j["objects"] = c.objects.labels;
    json mors = json::array();
    for (std::size_t f = 0; f < c.nmor(); ++f)
        mors.push_back({{"name", c.names[f]}, {"src", c.objects.labels[c.src[f]]}, {"tgt", c.objects.labels[c.tgt[f]]}});
    j["morphisms"] = mors;
    json ids = json::array();
    for (int f : c.ident)
        ids.push_back(c.names[f]);
    j["identities"] = ids;
    std::vector<std::tuple<int, int, int>> rows;
    for (auto& [key, gf] : c.comp)
        rows.emplace_back(int(key >> 32), int(key & 0xffffffffu), gf);
    std::sort(rows.begin(), rows.end());
    json comp = json::array();
    for (auto& [g, f, gf] : rows)
        comp.push_back({c.names[g], c.names[f], c.names[gf]});
    j["composition"] = comp;
    return j;
}

FinCat category_body_from(const json& j)
{
    FinCat c;
    c.objects.labels = field<std::vector<std::string>>(j, "objects");
    auto obj = index_of(c.objects.labels, "object");
    std::map<std::string, int> mor;
    for (auto& m : field<json>(j, "morphisms")) {
        auto name = field<std::string>(m, "name");
        int f = c.add_morphism(name, lookup(obj, field<std::string>(m, "src"), "object"),
                               lookup(obj, field<std::string>(m, "tgt"), "object"));
        if (!mor.emplace(name, f).second)
            throw ParseError("duplicate morphism '" + name + "'");
    }
    auto ids = field<std::vector<std::string>>(j, "identities");
    if (ids.size() != c.objects.size())
        throw ParseError("one identity per object expected");
    for (auto& id : ids)
        c.ident.push_back(lookup(mor, id, "morphism"));
    for (auto& row : field<json>(j, "composition")) {
        auto r = row.get<std::vector<std::string>>();
        if (r.size() != 3)
            throw ParseError("composition rows are [g, f, g o f]");
        c.set_comp(lookup(mor, r[0], "morphism"), lookup(mor, r[1], "morphism"), lookup(mor, r[2], "morphism"));
    }
    return c;
}

json nfold_body(const NFoldCat& x)
{
    json j;
    j["n"] = x.n;
    j["cells"] = x.cells;
    j["faces"] = x.fmaps;
    j["degeneracies"] = x.smaps;
    if (x.imaps.empty())
        j["inverses"] = nullptr;
    else
        j["inverses"] = x.imaps;
    return j;
}

NFoldCat nfold_body_from(const json& j)
{
    int n = field<int>(j, "n");
    if (n < 0 || n > 4)
        throw ParseError("dimension out of range");
    NFoldCat x(n);
    x.cells = field<std::vector<std::vector<std::string>>>(j, "cells");
    x.fmaps = field<std::vector<std::vector<int>>>(j, "faces");
    x.smaps = field<std::vector<std::vector<int>>>(j, "degeneracies");
    if (!j.contains("inverses") || j["inverses"].is_null())
        x.imaps.clear();
    else
        x.imaps = field<std::vector<std::vector<int>>>(j, "inverses");
    std::size_t codes = std::size_t(pow3(n));
    if (x.cells.size() != codes || x.fmaps.size() != codes * n * 3 || x.smaps.size() != codes * n * 2 ||
        (!x.imaps.empty() && x.imaps.size() != codes * n))
        throw ParseError("table counts do not match dimension " + std::to_string(n));
    return x;
}

}  // namespace

std::string schema_of(const Document& d)
{
    static const char* names[] = {"graph", "category", "groupoid", "nfold", "track", "module"};
    return names[d.index()];
}

// ---- writers --------------------------------------------------------------

json to_json(const FinGraph& g)
{
    json j = header("graph");
    j["objects"] = g.objects.labels;
    json edges = json::array();
    for (auto& e : g.edges)
        edges.push_back({{"id", e.id}, {"src", g.objects.labels[e.src]}, {"tgt", g.objects.labels[e.tgt]}});
    j["edges"] = edges;
    return j;
}

json to_json(const FinCat& c)
{
    json j = category_body(c);
    j.update(header("category"));
    return j;
}

json to_json(const FinGroupoid& g)
{
    json j = category_body(g.cat);
    j.update(header("groupoid"));
    json inv = json::array();
    for (std::size_t f = 0; f < g.inv.size(); ++f)
        inv.push_back({g.cat.names[f], g.inv[f] < 0 ? std::string() : g.cat.names[g.inv[f]]});
    j["inverses"] = inv;
    return j;
}

json to_json(const NFoldCat& x, bool expect_hd, bool expect_wg)
{
    json j = nfold_body(x);
    j.update(header("nfold"));
    j["expect"] = {{"hd", expect_hd}, {"wg", expect_wg}};
    return j;
}

json to_json(const TrackCat& x)
{
    json j = header("track");
    j["n"] = x.n;
    j["objects"] = x.objects;
    std::size_t no = x.nobj();
    json homs = json::array();
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            homs.push_back({{"src", x.objects[a]}, {"tgt", x.objects[b]}, {"nfold", nfold_body(x.homs[a * no + b])}});
    j["homs"] = homs;
    j["units"] = x.unit;
    json comp = json::array();
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t c = 0; c < no; ++c) {
                auto& t = x.comp_table(int(a), int(b), int(c));
                for (std::size_t code = 0; code < t.size(); ++code) {
                    if (t[code].empty())
                        continue;
                    std::vector<std::array<int, 3>> rows;
                    for (auto& [key, gf] : t[code])
                        rows.push_back({int(key >> 32), int(key & 0xffffffffu), gf});
                    std::sort(rows.begin(), rows.end());
                    comp.push_back({{"a", x.objects[a]},
                                    {"b", x.objects[b]},
                                    {"c", x.objects[c]},
                                    {"code", code},
                                    {"table", rows}});
                }
            }
    j["composition"] = comp;
    return j;
}

json to_json(const ModuleDoc& m)
{
    json j = header("module");
    j["constant"] = m.factors;
    return j;
}

// ---- readers --------------------------------------------------------------

FinGraph graph_from_json(const json& j)
{
    expect_schema(j, "graph");
    FinGraph g;
    g.objects.labels = field<std::vector<std::string>>(j, "objects");
    auto obj = index_of(g.objects.labels, "object");
    for (auto& e : field<json>(j, "edges"))
        g.edges.push_back({field<std::string>(e, "id"), lookup(obj, field<std::string>(e, "src"), "object"),
                           lookup(obj, field<std::string>(e, "tgt"), "object")});
    return g;
}

FinCat category_from_json(const json& j)
{
    expect_schema(j, "category");
    return category_body_from(j);
}

FinGroupoid groupoid_from_json(const json& j)
{
    expect_schema(j, "groupoid");
    FinGroupoid g;
    g.cat = category_body_from(j);
    auto mor = index_of(g.cat.names, "morphism");
    g.inv.assign(g.cat.nmor(), -1);
    for (auto& row : field<json>(j, "inverses")) {
        auto r = row.get<std::vector<std::string>>();
        if (r.size() != 2)
            throw ParseError("inverse rows are [f, f^-1]");
        g.inv[lookup(mor, r[0], "morphism")] = r[1].empty() ? -1 : lookup(mor, r[1], "morphism");
    }
    return g;
}

NFoldDoc nfold_from_json(const json& j)
{
    expect_schema(j, "nfold");
    NFoldDoc d;
    d.x = nfold_body_from(j);
    if (j.contains("expect")) {
        auto& e = j["expect"];
        d.expect_hd = e.value("hd", false);
        d.expect_wg = e.value("wg", false);
    }
    return d;
}

TrackCat track_from_json(const json& j)
{
    expect_schema(j, "track");
    TrackCat x;
    x.n = field<int>(j, "n");
    if (x.n < 0 || x.n > 3)
        throw ParseError("track dimension out of range");
    x.objects = field<std::vector<std::string>>(j, "objects");
    auto obj = index_of(x.objects, "object");
    std::size_t no = x.nobj();
    auto homs = field<json>(j, "homs");
    if (homs.size() != no * no)
        throw ParseError("one hom per ordered pair of objects expected");
    x.homs.resize(no * no);
    for (auto& h : homs) {
        int a = lookup(obj, field<std::string>(h, "src"), "object");
        int b = lookup(obj, field<std::string>(h, "tgt"), "object");
        x.homs[a * no + b] = nfold_body_from(field<json>(h, "nfold"));
        if (x.homs[a * no + b].n != x.n)
            throw ParseError("hom dimension differs from the track dimension");
    }
    x.unit = field<std::vector<std::vector<int>>>(j, "units");
    if (x.unit.size() != no)
        throw ParseError("one unit row per object expected");
    for (std::size_t a = 0; a < no; ++a) {
        if (x.unit[a].size() != std::size_t(x.ncodes()))
            throw ParseError("unit rows need one entry per index");
        for (int code = 0; code < x.ncodes(); ++code)
            check_range({x.unit[a][code]}, x.homs[a * no + a].count(code), "unit");
    }
    x.comp.assign(no * no * no, std::vector<std::unordered_map<std::uint64_t, int>>(std::size_t(x.ncodes())));
    for (auto& t : field<json>(j, "composition")) {
        int a = lookup(obj, field<std::string>(t, "a"), "object");
        int b = lookup(obj, field<std::string>(t, "b"), "object");
        int c = lookup(obj, field<std::string>(t, "c"), "object");
        int code = field<int>(t, "code");
        if (code < 0 || code >= x.ncodes())
            throw ParseError("composition index out of range");
        auto& tab = x.comp_table(a, b, c)[code];
        for (auto& row : field<std::vector<std::array<int, 3>>>(t, "table")) {
            check_range({row[0]}, x.hom(b, c).count(code), "composition");
            check_range({row[1]}, x.hom(a, b).count(code), "composition");
            check_range({row[2]}, x.hom(a, c).count(code), "composition");
            tab[pair_key(row[0], row[1])] = row[2];
        }
    }
    return x;
}

ModuleDoc module_from_json(const json& j)
{
    expect_schema(j, "module");
    ModuleDoc m;
    m.factors = field<std::vector<long>>(j, "constant");
    for (long k : m.factors)
        if (k < 0)
            throw ParseError("cyclic orders are non-negative (0 stands for Z)");
    return m;
}

Document parse_document(const json& j)
{
    auto s = field<std::string>(j, "schema");
    if (s == "graph")
        return graph_from_json(j);
    if (s == "category")
        return category_from_json(j);
    if (s == "groupoid")
        return groupoid_from_json(j);
    if (s == "nfold")
        return nfold_from_json(j);
    if (s == "track")
        return track_from_json(j);
    if (s == "module")
        return module_from_json(j);
    throw ParseError("unknown schema '" + s + "'");
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Document load(const std::string& ref)
{
    if (ref.rfind("fixture:", 0) == 0)
        return fixture(ref.substr(8));
    return parse_document(read_json_file(ref));
}

std::string dump(const json& j)
{
    return j.dump(1) + "\n";
}

// ---- fixtures -------------------------------------------------------------

namespace {

FinGraph graph_of(std::vector<std::string> objects, std::vector<Edge> edges)
{
    FinGraph g;
    g.objects.labels = std::move(objects);
    g.edges = std::move(edges);
    return g;
}

FinGroupoid cyclic_group(int order)
{
    FinGroupoid g;
    g.cat.objects.labels = {"*"};
    for (int i = 0; i < order; ++i)
        g.cat.add_morphism(i == 0 ? "1" : "g" + std::to_string(i), 0, 0);
    g.cat.ident = {0};
    for (int i = 0; i < order; ++i)
        for (int k = 0; k < order; ++k)
            g.cat.set_comp(i, k, (i + k) % order);
    for (int i = 0; i < order; ++i)
        g.inv.push_back((order - i) % order);
    return g;
}

FinCat arrow_category()
{
    return free_category(graph_of({"a", "b"}, {{"u", 0, 1}}), 1).cat;
}

}  // namespace

std::vector<std::string> fixture_names()
{
    return {"DISC", "ARROW", "PAIR", "LOOPE", "EQ2", "T1", "FAT2"};
}

Document fixture(const std::string& name)
{
    if (name == "DISC")
        return discrete_cat({"a", "b", "c"});
    if (name == "ARROW")
        return graph_of({"a", "b"}, {{"u", 0, 1}});
    if (name == "PAIR")
        return graph_of({"a", "b"}, {{"u", 0, 1}, {"v", 0, 1}});
    if (name == "LOOPE")
        return graph_of({"a"}, {{"e", 0, 0}});
    if (name == "EQ2")
        return indiscrete_groupoid({"x", "y"});
    if (name == "T1")
        return track_T1();
    if (name == "FAT2")
        return track_FAT2();
    throw ParseError("no fixture named '" + name + "'");
}

std::vector<std::pair<std::string, json>> corruption_corpus()
{
    std::vector<std::pair<std::string, json>> out;
    NFoldCat arrow = nfold_from_category(arrow_category());
    NFoldCat z2 = nfold_from_groupoid(cyclic_group(2));
    NFoldCat eq2 = nfold_from_groupoid(indiscrete_groupoid({"x", "y"}));
    NFoldCat point = discrete_nfold({"p"}, 1);

    // well-formed objects claiming a property they lack
    out.emplace_back("arrow_claims_hd", to_json(arrow, true, false));
    out.emplace_back("arrow_claims_wg", to_json(arrow, false, true));
    out.emplace_back("cyclic_group_claims_hd", to_json(z2, true, false));
    out.emplace_back("last_direction_not_groupoid", to_json(external_product(eq2, arrow), false, true));
    out.emplace_back("object_level_not_discrete", to_json(external_product(point, z2), true, true));

    // broken tables
    {
        NFoldCat x = eq2;
        int id = x.degen(0, 0, 0)[0];
        x.face(0, 1, 0)[id] = 1;
        out.emplace_back("identity_with_wrong_source", to_json(x, true, true));
    }
    {
        NFoldCat x = eq2;
        auto& inv = x.inverse(0, 1);
        for (std::size_t f = 0; f < inv.size(); ++f)
            if (inv[f] != int(f)) {
                inv[f] = int(f);
                break;
            }
        out.emplace_back("wrong_inverse", to_json(x, true, true));
    }
    {
        NFoldCat x = eq2;
        auto& s = x.degen(0, 0, 0);
        std::swap(s[0], s[1]);
        out.emplace_back("swapped_units", to_json(x, true, true));
    }
    {
        TrackCat t = track_T1();
        NFoldCat x = t.hom(0, 1);
        int code = 1;   // arrows in direction 0
        auto& f = x.face(0, code, 1);
        if (x.count(0) > 1 && !f.empty())
            f[0] = (f[0] + 1) % int(x.count(0));
        out.emplace_back("track_hom_bad_target", to_json(x, true, true));
    }
    {
        TrackCat t = track_FAT2();
        NFoldCat x = t.hom(0, 1);
        // a composite in the last direction pointing at the wrong cell
        int code = 2 * pow3(1);
        auto& f = x.face(1, code, 1);
        if (!f.empty())
            f[0] = (f[0] + 1) % int(x.count(1 * pow3(1)));
        out.emplace_back("fattened_hom_bad_composite", to_json(x, false, true));
    }
    {
        TrackCat t = track_T1();
        for (auto& tabs : t.comp) {
            auto it = std::find_if(tabs.begin(), tabs.end(), [](auto& tab) { return !tab.empty(); });
            if (it == tabs.end())
                continue;
            std::uint64_t low = it->begin()->first;
            for (auto& [k, v] : *it)
                low = std::min(low, k);
            it->erase(low);
            break;
        }
        out.emplace_back("track_missing_composite", to_json(t));
    }
    {
        TrackCat t = track_T1();
        bool done = false;
        for (std::size_t i = 0; i < t.comp.size() && !done; ++i)
            for (auto& tab : t.comp[i])
                if (!tab.empty()) {
                    std::vector<std::uint64_t> keys;
                    for (auto& [k, v] : tab)
                        keys.push_back(k);
                    std::sort(keys.begin(), keys.end());
                    if (keys.size() < 2)
                        continue;
                    std::swap(tab[keys[0]], tab[keys[1]]);
                    done = tab[keys[0]] != tab[keys[1]];
                    if (done)
                        break;
                }
        out.emplace_back("track_scrambled_composition", to_json(t));
    }
    {
        json j = to_json(arrow_category());
        j["composition"].erase(j["composition"].begin());
        out.emplace_back("category_missing_composite", j);
    }
    {
        FinGroupoid g = indiscrete_groupoid({"x", "y"});
        for (std::size_t f = 0; f < g.inv.size(); ++f)
            if (!g.cat.is_identity(int(f))) {
                g.inv[f] = int(f);
                break;
            }
        out.emplace_back("groupoid_wrong_inverse", to_json(g));
    }
    return out;
}

// ---- validation ------------------------------------------------------------

namespace {

void check_nfold(Ledger& l, const NFoldCat& x, const std::string& where, bool need_hd, bool need_wg, bool need_groupoid)
{
    auto bad = x.audit();
    l.add(where + "n-fold structure", bad);
    if (bad)
        return;
    std::string why;
    l.add(where + "Segal maps", when(segal_check(x, &why), why));
    auto wg = is_weakly_globular(x);
    l.add(where + "weakly globular", when(wg.ok, wg.witness), need_wg);
    if (need_groupoid)
        l.add(where + "groupoid", when(x.has_inverses(), "no inverse tables"));
    auto hd = is_homotopically_discrete(x);
    l.add(where + "homotopically discrete", when(hd.ok, hd.witness), need_hd);
}

}  // namespace

json validate(const Document& doc, Ledger& l)
{
    json res = {{"schema", schema_of(doc)}};
    if (auto* g = std::get_if<FinGraph>(&doc)) {
        l.add("graph endpoints", g->audit());
        res["objects"] = g->objects.size();
        res["edges"] = g->edges.size();
    } else if (auto* c = std::get_if<FinCat>(&doc)) {
        auto bad = c->audit();
        l.add("category laws", bad);
        if (!bad)
            check_nfold(l, nfold_from_category(*c), "as 1-fold: ", false, false, false);
        res["objects"] = c->objects.size();
        res["morphisms"] = c->nmor();
    } else if (auto* g = std::get_if<FinGroupoid>(&doc)) {
        auto bad = g->audit();
        l.add("groupoid laws", bad);
        if (!bad)
            check_nfold(l, nfold_from_groupoid(*g), "as 1-fold: ", false, true, true);
        res["objects"] = g->cat.objects.size();
        res["morphisms"] = g->cat.nmor();
    } else if (auto* d = std::get_if<NFoldDoc>(&doc)) {
        check_nfold(l, d->x, "", d->expect_hd, d->expect_wg, false);
        res["n"] = d->x.n;
        json counts = json::array();
        for (int c = 0; c < d->x.ncodes(); ++c)
            counts.push_back(d->x.count(c));
        res["cells"] = counts;
    } else if (auto* t = std::get_if<TrackCat>(&doc)) {
        auto bad = t->audit(false);
        l.add("enrichment laws", bad);
        if (!bad)
            for (std::size_t a = 0; a < t->nobj(); ++a)
                for (std::size_t b = 0; b < t->nobj(); ++b)
                    check_nfold(l, t->hom(int(a), int(b)), "hom(" + t->objects[a] + "," + t->objects[b] + "): ",
                                false, true, false);
        res["n"] = t->n;
        res["objects"] = t->nobj();
    } else {
        l.add("module orders", std::nullopt);
    }
    return res;
}

ModuleDoc parse_coeffs(const std::string& spec)
{
    if (spec == "const:Z")
        return {{0}};
    if (spec == "const:0")
        return {{}};
    if (spec.rfind("const:Z/", 0) == 0) {
        try {
            std::size_t used = 0;
            long k = std::stol(spec.substr(8), &used);
            if (used != spec.size() - 8 || k < 1)
                throw ParseError("bad modulus");
            return k == 1 ? ModuleDoc{} : ModuleDoc{{k}};
        } catch (const std::logic_error&) {
            throw ParseError("bad coefficient spec '" + spec + "'");
        }
    }
    auto d = parse_document(read_json_file(spec));
    if (!std::holds_alternative<ModuleDoc>(d))
        throw ParseError(spec + " is not a module document");
    return std::get<ModuleDoc>(d);
}

TrackCat as_track(const Document& doc, int bound)
{
    if (auto* t = std::get_if<TrackCat>(&doc))
        return *t;
    if (auto* c = std::get_if<FinCat>(&doc))
        return track_from_category(*c);
    if (auto* g = std::get_if<FinGroupoid>(&doc))
        return track_from_category(g->cat);
    if (auto* g = std::get_if<FinGraph>(&doc)) {
        auto f = free_category(*g, bound);
        if (f.truncated)
            throw TruncationOverflow("free category on the graph has paths longer than bound " + std::to_string(bound));
        return track_from_category(f.cat);
    }
    throw ParseError("expected a track, category, groupoid or graph document, got " + schema_of(doc));
}

}  // namespace tc::io
