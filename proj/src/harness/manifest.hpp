#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "core/embedding.hpp"

namespace madp {

// CSV with header id,path,label,subset[,x0,y0,x1,y1]. Relative paths resolve
// against the manifest's directory. All bona-fide rows form one subset that
// every attack subset is evaluated against.
struct DatasetManifest {
  std::vector<SampleRef> samples;
  std::string bona_fide_subset;
  std::vector<std::string> attack_subsets;  // first-appearance order

  std::vector<SampleRef> subset(std::string_view name) const;
};

enum class PathCheck { Require, Skip };

// Throws Data on malformed rows, duplicate ids, mixed-label subsets, a
// bona-fide pool that is missing or split, or (with Require) missing files.
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                               PathCheck check);
DatasetManifest load_manifest(const std::filesystem::path& path, PathCheck check);

}  // namespace madp
