#ifndef UNIPOS_UNIVERSAL_TAG_H_
#define UNIPOS_UNIVERSAL_TAG_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace unipos {

// The twelve universal part-of-speech categories. kPunct renders as ".".
enum class UniversalTag : std::uint8_t {
  kNoun = 0,
  kVerb,
  kAdj,
  kAdv,
  kPron,
  kDet,
  kAdp,
  kNum,
  kConj,
  kPrt,
  kPunct,
  kX,
};

inline constexpr int kNumUniversalTags = 12;

inline constexpr std::array<UniversalTag, kNumUniversalTags> kAllUniversalTags = {
    UniversalTag::kNoun, UniversalTag::kVerb, UniversalTag::kAdj,
    UniversalTag::kAdv,  UniversalTag::kPron, UniversalTag::kDet,
    UniversalTag::kAdp,  UniversalTag::kNum,  UniversalTag::kConj,
    UniversalTag::kPrt,  UniversalTag::kPunct, UniversalTag::kX,
};

constexpr int ToIndex(UniversalTag tag) { return static_cast<int>(tag); }

std::string_view ToString(UniversalTag tag);

// Inverse of ToString; nullopt for anything but the twelve renderings.
std::optional<UniversalTag> ParseUniversalTag(std::string_view text);

// Throws Error(kInvalidUniversalTag) on failure.
UniversalTag ParseUniversalTagOrThrow(std::string_view text, int line = 0);

}  // namespace unipos

#endif  // UNIPOS_UNIVERSAL_TAG_H_
