#include <filesystem>
#include <fstream>
#include <iostream>

#include "fixio.hpp"

namespace fs = std::filesystem;
using namespace tc;

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: export_fixtures <fixtures dir>\n";
        return 2;
    }
    fs::path dir = argv[1];
    fs::create_directories(dir / "corrupt");
    fs::create_directories(dir / "modules");
    auto write = [](const fs::path& p, const io::json& j) { std::ofstream(p, std::ios::binary) << io::dump(j); };
    for (auto& name : io::fixture_names())
        write(dir / (name + ".json"), std::visit([](const auto& d) { return io::to_json(d); }, io::fixture(name)));
    for (auto& [name, j] : io::corruption_corpus())
        write(dir / "corrupt" / (name + ".json"), j);
    write(dir / "modules" / "const_Z2.json", io::to_json(io::ModuleDoc{{2}}));
    write(dir / "modules" / "const_Z.json", io::to_json(io::ModuleDoc{{0}}));
    write(dir / "modules" / "zero.json", io::to_json(io::ModuleDoc{}));
    return 0;
}
