#ifndef UNIPOS_TAG_MAPPING_H_
#define UNIPOS_TAG_MAPPING_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "unipos/universal_tag.h"

namespace unipos {

// Version of the `<fine-tag>\t<universal-tag>` mapping-file format.
inline constexpr int kMappingFormatVersion = 1;

// Immutable fine-tag -> universal-tag table for one treebank. Keys are
// compared byte-exactly.
class TagMapping {
 public:
  using Entries = std::map<std::string, UniversalTag, std::less<>>;

  // Throws Error(kEmptyMapping) when `entries` is empty.
  TagMapping(std::string treebank_id, Entries entries);

  const std::string &treebank_id() const { return treebank_id_; }
  const Entries &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool Contains(std::string_view fine) const;

  // Throws Error(kUnknownFineTag) for an absent key.
  UniversalTag Map(std::string_view fine) const;

  // Like Map, but unknown tags become X when `fallback_x` is set.
  UniversalTag Map(std::string_view fine, bool fallback_x) const;

  // Mapping-file text, one entry per line, sorted by fine tag.
  std::string Serialize() const;

  friend bool operator==(const TagMapping &, const TagMapping &) = default;

 private:
  std::string treebank_id_;
  Entries entries_;
};

// Parses a mapping document. Blank lines and lines starting with '#' are
// skipped, except "#\t..." which maps the fine tag "#"; every other line
// must be `<fine>\t<universal>`.
TagMapping ParseMapping(std::string_view text, std::string treebank_id = "");

// Reads a `<lang>-<treebank>.map` file; the treebank id is the file stem.
TagMapping LoadMappingFile(const std::filesystem::path &path);

struct ValidationReport {
  std::vector<std::string> unknown_tags;  // observed, absent from the mapping
  std::vector<std::string> unused_tags;   // in the mapping, never observed
  std::array<std::size_t, kNumUniversalTags> tag_histogram{};
};

ValidationReport ValidateMapping(
    const TagMapping &mapping,
    const std::map<std::string, std::size_t, std::less<>> &observed_counts);

}  // namespace unipos

#endif  // UNIPOS_TAG_MAPPING_H_
