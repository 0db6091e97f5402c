#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace streamfm {

// Maps (field, value) pairs to feature indices. Indices are handed out in
// first-encounter order and never reused or remapped, so the feature space
// only ever grows.
class FeatureRegistry {
 public:
  // Index for a categorical value, assigning the next index when new.
  std::size_t intern(std::string_view field, std::string_view value);
  // Index for a numeric field (one fixed dimension per field name).
  std::size_t intern_numeric(std::string_view field);

  std::optional<std::size_t> find(std::string_view field,
                                  std::string_view value) const;
  std::size_t size() const { return indices_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> indices_;
};

}  // namespace streamfm
