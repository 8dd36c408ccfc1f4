#include "unipos/tag_mapping.h"

#include <fstream>
#include <sstream>

#include "unipos/error.h"

namespace unipos {

namespace {

constexpr std::array<std::string_view, kNumUniversalTags> kRenderings = {
    "NOUN", "VERB", "ADJ", "ADV",  "PRON", "DET",
    "ADP",  "NUM",  "CONJ", "PRT", ".",    "X",
};

}  // namespace

std::string_view ToString(UniversalTag tag) {
  return kRenderings[static_cast<std::size_t>(ToIndex(tag))];
}

std::optional<UniversalTag> ParseUniversalTag(std::string_view text) {
  for (UniversalTag tag : kAllUniversalTags) {
    if (ToString(tag) == text) return tag;
  }
  return std::nullopt;
}

UniversalTag ParseUniversalTagOrThrow(std::string_view text, int line) {
  if (auto tag = ParseUniversalTag(text)) return *tag;
  throw Error(ErrorKind::kInvalidUniversalTag,
              "'" + std::string(text) + "' is not a universal tag", line);
}

TagMapping::TagMapping(std::string treebank_id, Entries entries)
    : treebank_id_(std::move(treebank_id)), entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw Error(ErrorKind::kEmptyMapping,
                "mapping '" + treebank_id_ + "' has no entries");
  }
}

bool TagMapping::Contains(std::string_view fine) const {
  return entries_.find(fine) != entries_.end();
}

UniversalTag TagMapping::Map(std::string_view fine) const {
  auto it = entries_.find(fine);
  if (it == entries_.end()) {
    std::string where = treebank_id_.empty() ? "mapping" : treebank_id_;
    throw Error(ErrorKind::kUnknownFineTag,
                "fine tag '" + std::string(fine) + "' is not in " + where);
  }
  return it->second;
}

UniversalTag TagMapping::Map(std::string_view fine, bool fallback_x) const {
  if (fallback_x && !Contains(fine)) return UniversalTag::kX;
  return Map(fine);
}

std::string TagMapping::Serialize() const {
  std::string out;
  for (const auto &[fine, tag] : entries_) {
    out += fine;
    out += '\t';
    out += ToString(tag);
    out += '\n';
  }
  return out;
}

TagMapping ParseMapping(std::string_view text, std::string treebank_id) {
  TagMapping::Entries entries;
  std::map<std::string, int, std::less<>> first_seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    // PTB has a fine tag "#", so "#<TAB>..." is an entry, not a comment.
    if (line.empty() || (line.front() == '#' && !line.starts_with("#\t"))) continue;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos ||
        line.find('\t', tab + 1) != std::string_view::npos) {
      throw Error(ErrorKind::kParse,
                  "expected '<fine-tag>\\t<universal-tag>', got '" +
                      std::string(line) + "'",
                  line_no);
    }
    std::string_view fine = line.substr(0, tab);
    std::string_view universal = line.substr(tab + 1);
    if (fine.empty()) {
      throw Error(ErrorKind::kParse, "empty fine tag", line_no);
    }
    UniversalTag tag = ParseUniversalTagOrThrow(universal, line_no);
    auto [it, inserted] = first_seen.emplace(std::string(fine), line_no);
    if (!inserted) {
      throw Error(ErrorKind::kDuplicateKey,
                  "fine tag '" + std::string(fine) +
                      "' already defined at line " +
                      std::to_string(it->second),
                  line_no);
    }
    entries.emplace(std::string(fine), tag);
  }
  if (entries.empty()) {
    throw Error(ErrorKind::kEmptyMapping, "mapping document has no entries");
  }
  return TagMapping(std::move(treebank_id), std::move(entries));
}

TagMapping LoadMappingFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseMapping(buffer.str(), path.stem().string());
}

ValidationReport ValidateMapping(
    const TagMapping &mapping,
    const std::map<std::string, std::size_t, std::less<>> &observed_counts) {
  ValidationReport report;
  for (const auto &[fine, count] : observed_counts) {
    if (count == 0) continue;
    auto it = mapping.entries().find(fine);
    if (it == mapping.entries().end()) {
      report.unknown_tags.push_back(fine);
    } else {
      report.tag_histogram[static_cast<std::size_t>(ToIndex(it->second))] +=
          count;
    }
  }
  for (const auto &[fine, tag] : mapping.entries()) {
    auto it = observed_counts.find(fine);
    if (it == observed_counts.end() || it->second == 0) {
      report.unused_tags.push_back(fine);
    }
  }
  return report;
}

}  // namespace unipos
