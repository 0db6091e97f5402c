#include "streamfm/sparse_vector.hpp"

#include <algorithm>
#include <stdexcept>

namespace streamfm {

namespace {

void validate_sorted(std::size_t dim, const std::vector<SparseEntry>& entries) {
  for (std::size_t a = 0; a < entries.size(); ++a) {
    if (entries[a].index >= dim) {
      throw std::invalid_argument("SparseVector: index out of range");
    }
    if (a > 0 && entries[a].index <= entries[a - 1].index) {
      throw std::invalid_argument("SparseVector: indices must be strictly increasing");
    }
  }
}

void drop_zeros(std::vector<SparseEntry>& entries) {
  std::erase_if(entries, [](const SparseEntry& e) { return e.value == 0.0; });
}

}  // namespace

SparseVector::SparseVector(std::size_t dim, std::vector<SparseEntry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  drop_zeros(entries_);
  validate_sorted(dim_, entries_);
}

SparseVector SparseVector::from_unsorted(std::size_t dim,
                                         std::vector<SparseEntry> entries) {
  drop_zeros(entries);
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  SparseVector out;
  out.dim_ = dim;
  out.entries_ = std::move(entries);
  validate_sorted(out.dim_, out.entries_);
  return out;
}

}  // namespace streamfm
