#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "fixio.hpp"

using namespace tc;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

io::json export_json(const io::Document& d)
{
    return std::visit([](const auto& x) { return io::to_json(x); }, d);
}

}  // namespace

TEST_SUITE("io")
{
    TEST_CASE("every fixture round-trips")
    {
        for (auto& name : io::fixture_names()) {
            auto j = export_json(io::fixture(name));
            auto back = io::parse_document(j);
            CHECK_MESSAGE(export_json(back) == j, name);
        }
    }

    TEST_CASE("shipped files match the library")
    {
        std::filesystem::path dir = FIXTURE_DIR;
        for (auto& name : io::fixture_names())
            CHECK_MESSAGE(slurp(dir / (name + ".json")) == io::dump(export_json(io::fixture(name))), name);
        auto corpus = io::corruption_corpus();
        CHECK(corpus.size() >= 10);
        std::size_t files = 0;
        for (auto& e : std::filesystem::directory_iterator(dir / "corrupt"))
            files += e.path().extension() == ".json";
        CHECK(files == corpus.size());
        for (auto& [name, j] : corpus)
            CHECK_MESSAGE(slurp(dir / "corrupt" / (name + ".json")) == io::dump(j), name);
    }

    TEST_CASE("fixtures validate and corruptions do not")
    {
        for (auto& name : io::fixture_names()) {
            io::Ledger l;
            io::validate(io::fixture(name), l);
            CHECK_MESSAGE(!l.failed, name);
        }
        for (auto& [name, j] : io::corruption_corpus()) {
            io::Ledger l;
            io::validate(io::parse_document(j), l);
            CHECK_MESSAGE(l.failed, name);
        }
    }

    TEST_CASE("parse errors")
    {
        CHECK_THROWS_AS(io::parse_document(io::json::parse(R"({"schema": "category"})")), io::ParseError);
        CHECK_THROWS_AS(io::parse_document(io::json::parse(R"({"schema": "mystery", "version": 1})")), io::ParseError);
        CHECK_THROWS_AS(io::parse_document(io::json::parse(
                            R"({"schema": "graph", "version": 1, "objects": ["a"], "edges": [{"id": "e", "src": "a", "tgt": "z"}]})")),
                        io::ParseError);
        CHECK_THROWS_AS(io::parse_document(io::json::parse(
                            R"({"schema": "graph", "version": 2, "objects": [], "edges": []})")),
                        io::ParseError);
        CHECK_THROWS_AS(io::load("fixture:NOPE"), io::ParseError);
    }

    TEST_CASE("coefficient specs")
    {
        CHECK(io::parse_coeffs("const:Z").factors == std::vector<long>{0});
        CHECK(io::parse_coeffs("const:Z/2").factors == std::vector<long>{2});
        CHECK(io::parse_coeffs("const:Z/1").factors.empty());
        CHECK(io::parse_coeffs(std::string(FIXTURE_DIR) + "/modules/const_Z2.json").factors == std::vector<long>{2});
        CHECK_THROWS_AS(io::parse_coeffs("const:Z/x"), io::ParseError);
        CHECK_THROWS_AS(io::parse_coeffs("const:Q"), io::ParseError);
    }
}
