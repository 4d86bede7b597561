#include "rlseg/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace rlseg {

namespace fs = std::filesystem;

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    const fs::path dir = fs::path(path).parent_path();
    DatasetManifest manifest;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '\t')) cols.push_back(col);
        if (cols.size() >= 2 && cols[0] == "#split") {
            if (cols[1] != "train" && cols[1] != "test")
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": split must be train or test");
            manifest.split = cols[1];
            continue;
        }
        if (cols.size() != 3)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected id<TAB>image<TAB>gt");
        if (!seen.insert(cols[0]).second)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate case id " + cols[0]);
        ManifestEntry e;
        e.id = cols[0];
        e.image_path = (dir / cols[1]).string();
        e.gt_path = (dir / cols[2]).string();
        if (!fs::exists(e.image_path))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": missing image file " +
                              e.image_path);
        if (!fs::exists(e.gt_path))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": missing ground-truth file " +
                              e.gt_path);
        manifest.entries.push_back(std::move(e));
    }
    if (manifest.split.empty()) throw ConfigError(path + ": missing #split header");
    return manifest;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
    if (manifest.split != "train" && manifest.split != "test")
        throw ConfigError("manifest split must be train or test");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "#split\t" << manifest.split << "\n";
    for (const auto& e : manifest.entries)
        out << e.id << '\t' << e.image_path << '\t' << e.gt_path << "\n";
    if (!out) throw IoError("short write to " + path);
}

} // namespace rlseg
