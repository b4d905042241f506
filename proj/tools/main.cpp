#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fixio.hpp"

using namespace tc;
using io::json;

using io::Ledger;
using io::when;

namespace {

enum Exit { ok = 0, validation = 1, parse = 2, overflow = 3, guard = 4 };

struct Job {
    std::string verb, input, coeffs = "const:Z/2", kind = "alg", out, fault = "none";
    int depth = -1, bound = 1, degree = 1;
    std::size_t max_elements = 2000000;
};

json command_echo(const Job& j)
{
    json c = {{"verb", j.verb}, {"input", j.input}};
    if (j.verb != "validate") {
        c["depth"] = j.depth;
        c["bound"] = j.bound;
    }
    if (j.verb == "cohomology" || j.verb == "les")
        c["coeffs"] = j.coeffs;
    if (j.verb == "cohomology") {
        c["kind"] = j.kind;
        c["degree"] = j.degree;
    }
    if (j.verb == "les" && j.fault != "none")
        c["fault"] = j.fault;
    return c;
}

// ---- track inputs -----------------------------------------------------------

// ---- resolve ----------------------------------------------------------------

json resolve(const Job& job, const TrackCat& x, Ledger& l, json& tower_doc)
{
    l.add("enrichment laws", x.audit(false));
    check_composition_closure(x, job.bound);
    l.add("composites of generators fit the bound", std::nullopt);
    Tower t(x, job.bound);
    json counts = json::array();
    counts.push_back(t.count(0));
    for (int m = 1; m <= job.depth + 1; ++m) {
        if (t.count(m - 1) * std::size_t(t.nwords) > job.max_elements)
            throw TruncationOverflow("level " + std::to_string(m) + " would exceed the element cap " +
                                     std::to_string(job.max_elements) + " (level " + std::to_string(m - 1) +
                                     " has " + std::to_string(t.count(m - 1)) + " elements)");
        t.enumerate(m);
        counts.push_back(t.count(m));
    }
    l.add("simplicial identities", simplicial_identities(t, job.depth));
    for (int m = 1; m <= job.depth + 1; ++m)
        l.add("free level " + std::to_string(m), freeness_audit(t, m));
    l.add("comonad laws", comonad_laws(t, t.count(1) <= 100000));

    tower_doc = {{"schema", "tower"}, {"version", io::schema_version}, {"input", job.input},
                 {"bound", job.bound}, {"depth", job.depth}, {"n", t.n}};
    json levels = json::array();
    for (int m = 0; m <= job.depth + 1; ++m) {
        json elems = json::array();
        for (std::size_t e = 0; e < t.count(m); ++e) {
            json kids = json::array();
            if (m > 0)
                for (auto& [y, w] : t.children(m, int(e)))
                    kids.push_back({y, w});
            elems.push_back({{"src", t.src(m, int(e))},
                             {"tgt", t.tgt(m, int(e))},
                             {"path", kids},
                             {"degenerate", m > 0 && t.degenerate(m, int(e))},
                             {"label", m == 0 ? t.describe(0, int(e)) : std::string()}});
        }
        levels.push_back({{"level", m}, {"provenance", m == 0 ? "cells of X" : "K^" + std::to_string(m) + " X"},
                          {"elements", elems}});
    }
    tower_doc["levels"] = levels;
    tower_doc["audits"] = l.items;
    return {{"level_sizes", counts}, {"objects", x.objects}};
}

// ---- cohomology -------------------------------------------------------------

json cohomology(const Job& job, const TrackCat& x, const std::vector<long>& factors, Ledger& l)
{
    if (job.depth < job.degree + 1)
        throw DegreeGuard("degree " + std::to_string(job.degree) + " needs resolution depth at least " +
                          std::to_string(job.degree + 1) + ", got " + std::to_string(job.depth));
    l.add("enrichment laws", x.audit(false));
    check_composition_closure(x, job.bound);
    Tower t(x, job.bound);
    CochainKind kind = job.kind == "aq" ? CochainKind::AQ : CochainKind::Alg;
    CochainModel cm(t, kind, job.degree + 1);
    auto c = normalize(cm);
    l.add("d d = 0", audit_dd(c));
    l.add("coboundary vanishes on degenerate elements", degenerate_rows_vanish(cm));
    l.add("cosimplicial identities", cosimplicial_identities(cm));
    auto hs = cohomology_all(c, factors, job.degree);
    auto h0 = H0_oracle(cm, factors);
    l.add("degree 0 against the equalizer oracle",
          when(h0 == hs[0], "normalized " + hs[0].str() + " vs equalizer " + h0.str()));
    if (job.degree >= 1) {
        auto sym = symbolic_complex(cm, 2);
        auto hsym = cohomology_all(sym, factors, 1);
        l.add("degree 1 against the unnormalized complex",
              when(hsym[1] == hs[1], "normalized " + hs[1].str() + " vs unnormalized " + hsym[1].str()));
    }
    json groups = json::array();
    for (int s = 0; s <= job.degree; ++s)
        groups.push_back({{"degree", s}, {"group", hs[s].str()}, {"rank", c.dims[s]}});
    return {{"kind", kind_name(kind)}, {"groups", groups}};
}

// ---- les --------------------------------------------------------------------

json les_report(const Job& job, const TrackCat& x, const std::vector<long>& factors, Ledger& l)
{
    if (job.depth < 1)
        throw DegreeGuard("the long exact sequence needs depth at least 1");
    l.add("enrichment laws", x.audit(false));
    check_composition_closure(x, job.bound);
    json res;
    json rows = json::array();
    json slots = json::array();
    if (factors.empty()) {
        for (int s = 0; s < job.depth; ++s) {
            rows.push_back({{"degree", s}, {"left", "0"}, {"mid", "0"}, {"right", "0"}});
            for (const char* col : {"left", "mid", "right"}) {
                std::string name = "H^" + std::to_string(s) + "(" + col + ")";
                slots.push_back({{"slot", name}, {"exact", true}});
                l.add("exact at " + name, std::nullopt);
            }
        }
        res["sequence"] = rows;
        res["slots"] = slots;
        return res;
    }
    if (factors.size() != 1)
        throw std::invalid_argument("the long exact sequence takes a single cyclic coefficient group");
    LesFault fault = LesFault::None;
    if (job.fault == "zero-connecting")
        fault = LesFault::ZeroConnecting;
    else if (job.fault == "perturb-connecting")
        fault = LesFault::PerturbConnecting;
    else if (job.fault == "zero-projection")
        fault = LesFault::ZeroProjection;
    Tower t(x, job.bound);
    auto r = les(t, factors[0], job.depth, fault);
    l.add(r.audits);
    for (int s = 0; s < r.top; ++s)
        rows.push_back({{"degree", s}, {"left", r.left[s].str()}, {"mid", r.mid[s].str()}, {"right", r.right[s].str()}});
    for (auto& sl : r.slots) {
        json it = {{"slot", sl.name}, {"exact", sl.exact}};
        if (!sl.exact)
            it["witness"] = sl.witness;
        slots.push_back(it);
        l.add("exact at " + sl.name, when(sl.exact, sl.witness));
    }
    res["sequence"] = rows;
    res["slots"] = slots;
    return res;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    Job job;
    CLI::App app{"n-track categories: validation, resolutions and cohomology"};
    app.require_subcommand(1);
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", job.input, "document path or fixture:NAME")->required();
        sub->add_option("--out", job.out, "report path");
    };
    auto add_tower = [&](CLI::App* sub) {
        sub->add_option("--depth", job.depth, "resolution depth S");
        sub->add_option("--bound", job.bound, "size bound L")->check(CLI::Range(1, 64));
    };
    auto* v = app.add_subcommand("validate", "schema and structure checks");
    add_common(v);
    auto* r = app.add_subcommand("resolve", "build and audit the comonad resolution");
    add_common(r);
    add_tower(r);
    r->add_option("--max-elements", job.max_elements, "refuse levels larger than this");
    auto* c = app.add_subcommand("cohomology", "algebraic or Andre-Quillen cohomology");
    add_common(c);
    add_tower(c);
    c->add_option("--degree", job.degree, "top degree s")->check(CLI::Range(0, 8));
    c->add_option("--coeffs", job.coeffs, "const:Z, const:Z/k or a module file");
    c->add_option("--kind", job.kind, "alg or aq")->check(CLI::IsMember({"alg", "aq"}));
    auto* le = app.add_subcommand("les", "long exact sequence with exactness per slot");
    add_common(le);
    add_tower(le);
    le->add_option("--coeffs", job.coeffs, "const:Z, const:Z/p or a module file");
    le->add_option("--fault", job.fault, "test hook")
        ->check(CLI::IsMember({"none", "zero-connecting", "perturb-connecting", "zero-projection"}))
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? Exit::ok : Exit::parse;
    }
    job.verb = app.get_subcommands()[0]->get_name();
    if (job.depth < 0)
        job.depth = job.verb == "cohomology" ? job.degree + 1 : job.verb == "les" ? 3 : 2;

    auto t0 = std::chrono::steady_clock::now();
    Ledger ledger;
    json report = {{"command", command_echo(job)}};
    if (job.verb != "validate")
        report["truncation"] = {{"bound", job.bound}, {"depth", job.depth}};
    int code = Exit::ok;
    std::string error;
    json tower_doc;
    try {
        auto doc = io::load(job.input);
        if (job.verb == "validate") {
            report["results"] = io::validate(doc, ledger);
        } else {
            std::vector<long> factors;
            if (job.verb != "resolve") {
                auto m = io::parse_coeffs(job.coeffs);
                for (long k : m.factors)
                    if (k != 1)
                        factors.push_back(k);
            }
            TrackCat x = io::as_track(doc, job.bound);
            if (job.verb == "resolve")
                report["results"] = resolve(job, x, ledger, tower_doc);
            else if (job.verb == "cohomology")
                report["results"] = cohomology(job, x, factors, ledger);
            else
                report["results"] = les_report(job, x, factors, ledger);
        }
        if (ledger.failed)
            code = Exit::validation;
    } catch (const io::ParseError& e) {
        code = Exit::parse;
        error = std::string("parse error: ") + e.what();
    } catch (const TruncationOverflow& e) {
        code = Exit::overflow;
        error = e.what();
        report["truncation"]["overflow"] = e.offending;
    } catch (const DegreeGuard& e) {
        code = Exit::guard;
        error = std::string("degree guard: ") + e.what();
    } catch (const std::exception& e) {
        code = Exit::validation;
        error = e.what();
    }
    report["audits"] = ledger.items;
    report["status"] = code;
    if (!error.empty())
        report["error"] = error;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try {
        if (!job.out.empty()) {
            if (job.verb == "resolve" && code == Exit::ok) {
                report["tower"] = job.out + ".tower.json";
                write_file(job.out + ".tower.json", io::dump(tower_doc));
            }
            write_file(job.out, io::dump(report));
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return Exit::validation;
    }

    // human-readable summary
    std::cout << job.verb << " " << job.input << "\n";
    for (auto& it : ledger.items)
        std::cout << "  [" << (it["pass"].get<bool>() ? "pass" : (it["required"].get<bool>() ? "FAIL" : "no  "))
                  << "] " << it["check"].get<std::string>()
                  << (it.contains("witness") ? ": " + it["witness"].get<std::string>() : "") << "\n";
    if (report.contains("results")) {
        auto& res = report["results"];
        if (res.contains("groups"))
            for (auto& g : res["groups"])
                std::cout << "  H^" << g["degree"] << " = " << g["group"].get<std::string>() << "\n";
        if (res.contains("sequence"))
            for (auto& row : res["sequence"])
                std::cout << "  H^" << row["degree"] << ": " << row["left"].get<std::string>() << " -> "
                          << row["mid"].get<std::string>() << " -> " << row["right"].get<std::string>() << "\n";
        if (res.contains("level_sizes"))
            std::cout << "  level sizes " << res["level_sizes"].dump() << "\n";
    }
    if (!error.empty())
        std::cerr << error << "\n";
    std::cout << "exit " << code << " (" << secs << " s)\n";
    return code;
}
