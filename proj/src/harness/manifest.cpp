#include "harness/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "core/errors.hpp"
#include "harness/csv.hpp"

namespace madp {

std::vector<SampleRef> DatasetManifest::subset(std::string_view name) const {
  std::vector<SampleRef> out;
  for (const SampleRef& s : samples) {
    if (s.subset == name) out.push_back(s);
  }
  return out;
}

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                               PathCheck check) {
  csv::Reader reader(in);
  const auto& header = reader.header();
  const std::vector<std::string> required{"id", "path", "label", "subset"};
  const std::vector<std::string> box_cols{"x0", "y0", "x1", "y1"};
  if (header.size() < 4 || !std::equal(required.begin(), required.end(), header.begin())) {
    fail(ErrorCode::Data, "manifest header must start with id,path,label,subset");
  }
  const bool has_box = header.size() == 8;
  if (has_box && !std::equal(box_cols.begin(), box_cols.end(), header.begin() + 4)) {
    fail(ErrorCode::Data, "manifest box columns must be x0,y0,x1,y1");
  }
  if (header.size() != 4 && !has_box) {
    fail(ErrorCode::Data, "manifest must have 4 or 8 columns");
  }

  DatasetManifest m;
  std::set<std::string> ids;
  std::map<std::string, Label> subset_label;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::string where = "manifest line " + std::to_string(reader.line());
    if (row.size() != header.size()) {
      fail(ErrorCode::Data, where + ": expected " + std::to_string(header.size()) + " fields");
    }
    SampleRef s;
    s.id = row[0];
    s.path = row[1];
    if (s.path.is_relative()) s.path = base_dir / s.path;
    const int label = csv::parse_int(row[2], reader.line());
    if (label != 0 && label != 1) fail(ErrorCode::Data, where + ": label must be 0 or 1");
    s.label = label_from_int(label);
    s.subset = row[3];
    if (s.id.empty()) fail(ErrorCode::Data, where + ": empty id");
    if (s.subset.empty()) fail(ErrorCode::Data, where + ": empty subset");
    if (!ids.insert(s.id).second) fail(ErrorCode::Data, where + ": duplicate id '" + s.id + "'");
    if (has_box) {
      const bool any = std::any_of(row.begin() + 4, row.end(),
                                   [](const std::string& f) { return !f.empty(); });
      if (any) {
        s.box = BoundingBox{csv::parse_int(row[4], reader.line()),
                            csv::parse_int(row[5], reader.line()),
                            csv::parse_int(row[6], reader.line()),
                            csv::parse_int(row[7], reader.line())};
        if (s.box->x0 < 0 || s.box->y0 < 0 || s.box->width() <= 0 || s.box->height() <= 0) {
          fail(ErrorCode::Data, where + ": empty or negative bounding box");
        }
      }
    }
    if (check == PathCheck::Require && !std::filesystem::exists(s.path)) {
      fail(ErrorCode::Data, where + ": file '" + s.path.string() + "' does not exist");
    }
    const auto [it, inserted] = subset_label.emplace(s.subset, s.label);
    if (!inserted && it->second != s.label) {
      fail(ErrorCode::Data, where + ": subset '" + s.subset + "' mixes bona-fide and attack rows");
    }
    if (inserted) {
      if (s.label == Label::BonaFide) {
        if (!m.bona_fide_subset.empty()) {
          fail(ErrorCode::Data, where + ": bona-fide rows span subsets '" + m.bona_fide_subset +
                                    "' and '" + s.subset + "'");
        }
        m.bona_fide_subset = s.subset;
      } else {
        m.attack_subsets.push_back(s.subset);
      }
    }
    m.samples.push_back(std::move(s));
  }
  if (!m.samples.empty() && m.bona_fide_subset.empty()) {
    fail(ErrorCode::Data, "manifest has no bona-fide subset");
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path, PathCheck check) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.parent_path(), check);
}

}  // namespace madp
