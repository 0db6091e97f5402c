#pragma once

#include <cstddef>
#include <vector>

namespace streamfm {

struct SparseEntry {
  std::size_t index;
  double value;

  bool operator==(const SparseEntry&) const = default;
};

// Sparse input vector over a growable feature space. Stored entries are
// sorted by index, indices are unique and < dim(), and exact zeros are
// omitted. nnz() is the Nz(x) that prediction/update costs scale with.
class SparseVector {
 public:
  SparseVector() = default;

  // Entries must already be sorted by strictly increasing index.
  SparseVector(std::size_t dim, std::vector<SparseEntry> entries);

  // Sorts, drops exact zeros, rejects duplicates and out-of-range indices.
  static SparseVector from_unsorted(std::size_t dim,
                                    std::vector<SparseEntry> entries);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  bool operator==(const SparseVector&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<SparseEntry> entries_;
};

}  // namespace streamfm
