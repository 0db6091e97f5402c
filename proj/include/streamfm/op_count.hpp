#pragma once

#include <cstdint>

namespace streamfm {

// Multiply-add counter for complexity checks. Incremented inside the actual
// inner loops of prediction/update code when a counter is supplied.
struct OpCount {
  std::uint64_t mul_adds = 0;
};

}  // namespace streamfm
