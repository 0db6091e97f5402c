#pragma once

#include <string>

namespace streamfm {

// One positive-feedback event in a time-ordered stream. The movie stream
// fills userKey/itemKey/timestamp; the ad stream additionally carries the
// per-impression user attributes and the ad's category (its timestamp is the
// impression index).
struct Event {
  std::string userKey;
  std::string itemKey;
  long long timestamp = 0;
  int age = 0;
  int sex = 0;
  int state = 0;
  int category = 0;
};

}  // namespace streamfm
