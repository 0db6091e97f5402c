#include "streamfm/feature_registry.hpp"

namespace streamfm {

namespace {

// Unit separator keeps composite keys unambiguous for any field/value text.
std::string make_key(std::string_view field, std::string_view value) {
  std::string key;
  key.reserve(field.size() + 1 + value.size());
  key.append(field);
  key.push_back('\x1f');
  key.append(value);
  return key;
}

}  // namespace

std::size_t FeatureRegistry::intern(std::string_view field, std::string_view value) {
  std::string key = make_key(field, value);
  auto it = indices_.find(key);
  if (it != indices_.end()) return it->second;
  const std::size_t idx = indices_.size();
  indices_.emplace(std::move(key), idx);
  return idx;
}

std::size_t FeatureRegistry::intern_numeric(std::string_view field) {
  return intern(field, "");
}

std::optional<std::size_t> FeatureRegistry::find(std::string_view field,
                                                 std::string_view value) const {
  auto it = indices_.find(make_key(field, value));
  if (it == indices_.end()) return std::nullopt;
  return it->second;
}

}  // namespace streamfm
