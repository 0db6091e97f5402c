#pragma once

#include <cstddef>
#include <string_view>

#include "streamfm/event.hpp"
#include "streamfm/recommender.hpp"
#include "streamfm/sparse_vector.hpp"

namespace streamfm {

// Binds a stream to its feature space: registers what each event introduces,
// encodes (event context, candidate item) pairs, and tracks any per-user
// history. Feature indices and catalog positions grow monotonically.
class DatasetAdapter {
 public:
  virtual ~DatasetAdapter() = default;

  // Register the event's features and its item before any scoring, growing
  // the registry and catalog as needed.
  virtual void observe(const Event& e) = 0;

  // Feature vector for the event's context combined with a candidate item.
  // The candidate must already be registered.
  virtual SparseVector encode(const Event& e, std::string_view candidateKey) const = 0;

  // Advance per-user history once the event has been consumed.
  virtual void consume(const Event& e) = 0;

  virtual const Catalog& catalog() const = 0;
  virtual std::size_t feature_dim() const = 0;
};

}  // namespace streamfm
