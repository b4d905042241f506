#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "trackcoh/cohomology.hpp"

namespace tc::io {

using nlohmann::json;

constexpr int schema_version = 1;

// malformed text or a document that does not fit its schema
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// properties an n-fold document claims for itself; validation checks them
struct NFoldDoc {
    NFoldCat x;
    bool expect_hd = false;
    bool expect_wg = false;
};

struct ModuleDoc {
    std::vector<long> factors;   // constant coefficients, 0 = Z; empty is the zero module
};

using Document = std::variant<FinGraph, FinCat, FinGroupoid, NFoldDoc, TrackCat, ModuleDoc>;
std::string schema_of(const Document& d);

json to_json(const FinGraph& g);
json to_json(const FinCat& c);
json to_json(const FinGroupoid& g);
json to_json(const NFoldCat& x, bool expect_hd = false, bool expect_wg = false);
json to_json(const TrackCat& x);
json to_json(const ModuleDoc& m);
inline json to_json(const NFoldDoc& d) { return to_json(d.x, d.expect_hd, d.expect_wg); }

FinGraph graph_from_json(const json& j);
FinCat category_from_json(const json& j);
FinGroupoid groupoid_from_json(const json& j);
NFoldDoc nfold_from_json(const json& j);
TrackCat track_from_json(const json& j);
ModuleDoc module_from_json(const json& j);

Document parse_document(const json& j);
// a path, or fixture:NAME for the built-in library
Document load(const std::string& ref);
json read_json_file(const std::string& path);
// canonical text: two-space indent, sorted keys, trailing newline
std::string dump(const json& j);

// built-in fixture library
std::vector<std::string> fixture_names();
Document fixture(const std::string& name);
// the corruption corpus: name -> document, every one must be rejected
std::vector<std::pair<std::string, json>> corruption_corpus();

// audit ledger: every check with pass/fail; optional checks are reported but do not fail
struct Ledger {
    json items = json::array();
    bool failed = false;

    void add(const std::string& name, const std::optional<std::string>& failure, bool required = true)
    {
        json it = {{"check", name}, {"pass", !failure}, {"required", required}};
        if (failure)
            it["witness"] = *failure;
        items.push_back(it);
        if (failure && required)
            failed = true;
    }
    void add(const std::string& name, const LawReport& r)
    {
        add(name + " (" + std::to_string(r.checked) + " checked)", r.ok ? std::nullopt : std::optional(r.witness));
    }
    void add(const AxiomReport& r, const std::string& prefix = "")
    {
        for (auto& it : r.items)
            add(prefix + it.name, it.ok ? std::nullopt : std::optional(it.witness));
    }
};

inline std::optional<std::string> when(bool good, const std::string& why)
{
    return good ? std::nullopt : std::optional(why);
}

// schema-specific structure checks plus the weak globularity, discreteness and Segal checkers
json validate(const Document& doc, Ledger& l);

// promote a graph, category or groupoid to a 1-track category with discrete homs;
// a graph whose free category is cut off by the bound overflows
TrackCat as_track(const Document& doc, int bound);

// --coeffs const:Z, const:Z/k or a module file
ModuleDoc parse_coeffs(const std::string& spec);

}  // namespace tc::io
