#include <doctest.h>

#include <stdexcept>

#include "streamfm/sparse_vector.hpp"

using namespace streamfm;

TEST_SUITE("sparse-vector") {

TEST_CASE("stores sorted entries and reports dim and nnz") {
  const SparseVector x(10, {{1, 0.5}, {4, -2.0}, {9, 1.0}});
  CHECK(x.dim() == 10);
  CHECK(x.nnz() == 3);
  CHECK(x.entries()[0].index == 1);
  CHECK(x.entries()[0].value == 0.5);
  CHECK(x.entries()[2].index == 9);
}

TEST_CASE("empty vector is valid") {
  const SparseVector x(5, {});
  CHECK(x.dim() == 5);
  CHECK(x.nnz() == 0);

  const SparseVector zero(0, {});
  CHECK(zero.dim() == 0);
}

TEST_CASE("zero-valued entries are dropped") {
  const SparseVector x(4, {{0, 0.0}, {2, 3.0}});
  CHECK(x.nnz() == 1);
  CHECK(x.entries()[0].index == 2);
}

TEST_CASE("rejects out-of-range indices") {
  CHECK_THROWS_AS(SparseVector(3, {{3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(0, {{0, 1.0}}), std::invalid_argument);
}

TEST_CASE("rejects unsorted or duplicate indices") {
  CHECK_THROWS_AS(SparseVector(5, {{2, 1.0}, {1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(5, {{2, 1.0}, {2, 1.0}}), std::invalid_argument);
}

TEST_CASE("from_unsorted sorts and rejects duplicates") {
  const SparseVector x = SparseVector::from_unsorted(6, {{4, 1.0}, {0, 2.0}});
  CHECK(x.entries()[0].index == 0);
  CHECK(x.entries()[1].index == 4);
  CHECK_THROWS_AS(SparseVector::from_unsorted(6, {{4, 1.0}, {4, 2.0}}),
                  std::invalid_argument);
}

TEST_CASE("equality compares dim and entries") {
  const SparseVector a(4, {{1, 1.0}});
  const SparseVector b(4, {{1, 1.0}});
  const SparseVector c(5, {{1, 1.0}});
  CHECK(a == b);
  CHECK(a != c);
}

}  // TEST_SUITE
