#pragma once

#include <string>
#include <vector>

#include "rlseg/error.hpp"

// Line-oriented dataset manifest:
//   #split<TAB>train
//   case_000<TAB>case_000.lsf<TAB>case_000_gt.pgm
// Paths are stored relative to the manifest file and resolved on load.
// Case ids must be unique; referenced files must exist at load time.

namespace rlseg {

struct ManifestEntry {
    std::string id;
    std::string image_path; // absolute after loading
    std::string gt_path;
};

struct DatasetManifest {
    std::string split; // "train" or "test"
    std::vector<ManifestEntry> entries;
};

DatasetManifest load_manifest(const std::string& path);

// Paths in `entries` are written as given (keep them relative to `path`).
void save_manifest(const std::string& path, const DatasetManifest& manifest);

} // namespace rlseg
