#include "streamfm/movielens.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace streamfm {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

long long parse_int(std::string_view text, const std::string& file, std::size_t lineNo) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::runtime_error(file + " line " + std::to_string(lineNo) +
                             ": expected an integer, got \"" + std::string(text) + "\"");
  }
  return value;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

// Strips a trailing carriage return so CRLF files parse like LF files.
std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

Ml100kData load_movielens(const std::string& dataPath,
                          const std::string& userPath,
                          const std::string& itemPath) {
  Ml100kData data;

  std::unordered_map<std::string, Ml100kUser> allUsers;
  {
    std::ifstream in = open_or_throw(userPath);
    std::string raw;
    for (std::size_t lineNo = 1; std::getline(in, raw); ++lineNo) {
      const std::string_view line = trim_cr(raw);
      if (line.empty()) continue;
      const auto fields = split(line, '|');
      if (fields.size() != 5) {
        throw std::runtime_error(userPath + " line " + std::to_string(lineNo) +
                                 ": expected 5 pipe-separated fields");
      }
      Ml100kUser user;
      user.age = static_cast<int>(parse_int(fields[1], userPath, lineNo));
      if (fields[2] != "M" && fields[2] != "F") {
        throw std::runtime_error(userPath + " line " + std::to_string(lineNo) +
                                 ": gender must be M or F");
      }
      user.male = fields[2] == "M";
      user.occupation = std::string(fields[3]);
      allUsers.emplace(std::string(fields[0]), std::move(user));
    }
  }

  std::unordered_map<std::string, Ml100kItem> allItems;
  {
    std::ifstream in = open_or_throw(itemPath);
    std::string raw;
    for (std::size_t lineNo = 1; std::getline(in, raw); ++lineNo) {
      const std::string_view line = trim_cr(raw);
      if (line.empty()) continue;
      const auto fields = split(line, '|');
      // id|title|release|video|url|19 genre flags; anchor the flags at the
      // end so stray pipes in a title cannot shift them.
      if (fields.size() < 20) {
        throw std::runtime_error(itemPath + " line " + std::to_string(lineNo) +
                                 ": expected at least 20 pipe-separated fields");
      }
      Ml100kItem item;
      const std::size_t flagsStart = fields.size() - 19;
      for (std::size_t g = 1; g < 19; ++g) {  // skip the "unknown" flag
        const long long flag = parse_int(fields[flagsStart + g], itemPath, lineNo);
        if (flag != 0 && flag != 1) {
          throw std::runtime_error(itemPath + " line " + std::to_string(lineNo) +
                                   ": genre flags must be 0 or 1");
        }
        if (flag == 1) item.genres.push_back(static_cast<int>(g - 1));
      }
      allItems.emplace(std::string(fields[0]), std::move(item));
    }
  }

  {
    std::ifstream in = open_or_throw(dataPath);
    std::string raw;
    for (std::size_t lineNo = 1; std::getline(in, raw); ++lineNo) {
      const std::string_view line = trim_cr(raw);
      if (line.empty()) continue;
      const auto fields = split(line, '\t');
      if (fields.size() != 4) {
        throw std::runtime_error(dataPath + " line " + std::to_string(lineNo) +
                                 ": expected 4 tab-separated fields");
      }
      const long long rating = parse_int(fields[2], dataPath, lineNo);
      if (rating < 1 || rating > 5) {
        throw std::runtime_error(dataPath + " line " + std::to_string(lineNo) +
                                 ": rating out of range");
      }
      if (rating != 5) continue;

      Event e;
      e.userKey = std::string(fields[0]);
      e.itemKey = std::string(fields[1]);
      e.timestamp = parse_int(fields[3], dataPath, lineNo);
      if (!allUsers.count(e.userKey)) {
        throw std::runtime_error(dataPath + " line " + std::to_string(lineNo) +
                                 ": unknown user " + e.userKey);
      }
      if (!allItems.count(e.itemKey)) {
        throw std::runtime_error(dataPath + " line " + std::to_string(lineNo) +
                                 ": unknown item " + e.itemKey);
      }
      data.events.push_back(std::move(e));
    }
  }

  std::stable_sort(data.events.begin(), data.events.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });

  // Keep only users and items that actually occur in a five-star event.
  for (const Event& e : data.events) {
    data.users.emplace(e.userKey, allUsers.at(e.userKey));
    data.items.emplace(e.itemKey, allItems.at(e.itemKey));
  }
  return data;
}

int day_of_week_utc(long long timestamp) {
  long long days = timestamp / 86400;
  if (timestamp % 86400 < 0) --days;  // floor for pre-epoch timestamps
  const long long dow = (days + 4) % 7;
  return static_cast<int>(dow < 0 ? dow + 7 : dow);
}

Ml100kEncoder::Ml100kEncoder(const Ml100kData& data) : data_(&data) {}

void Ml100kEncoder::observe(const Event& e) {
  ++stamp_;
  const auto userIt = data_->users.find(e.userKey);
  if (userIt == data_->users.end()) {
    throw std::invalid_argument("ml100k encoder: unknown user " + e.userKey);
  }
  const Ml100kUser& user = userIt->second;

  registry_.intern("u", e.userKey);
  registry_.intern("occ", user.occupation);
  if (user.male) registry_.intern_numeric("sex");
  registry_.intern_numeric("age");
  registry_.intern("day", std::to_string(day_of_week_utc(e.timestamp)));

  const auto hist = history_.find(e.userKey);
  if (hist != history_.end()) {
    if (hist->second.lastItem) {
      for (int g : hist->second.lastItem->genres) {
        registry_.intern("lg", std::to_string(g));
      }
    }
    if (hist->second.hasDay) {
      registry_.intern("lday", std::to_string(hist->second.lastDow));
    }
  }

  if (!itemBlocks_.count(e.itemKey)) {
    const auto itemIt = data_->items.find(e.itemKey);
    if (itemIt == data_->items.end()) {
      throw std::invalid_argument("ml100k encoder: unknown item " + e.itemKey);
    }
    std::vector<SparseEntry> block;
    block.push_back({registry_.intern("i", e.itemKey), 1.0});
    for (int g : itemIt->second.genres) {
      block.push_back({registry_.intern("g", std::to_string(g)), 1.0});
    }
    std::sort(block.begin(), block.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
    itemBlocks_.emplace(e.itemKey, std::move(block));
    catalog_.add(e.itemKey);
  }
}

SparseVector Ml100kEncoder::encode(const Event& e, std::string_view candidateKey) const {
  const auto blockIt = itemBlocks_.find(std::string(candidateKey));
  if (blockIt == itemBlocks_.end()) {
    throw std::invalid_argument("ml100k encoder: unregistered candidate item");
  }

  if (contextStamp_ != stamp_ || contextUser_ != e.userKey ||
      contextTimestamp_ != e.timestamp) {
    const Ml100kUser& user = data_->users.at(e.userKey);
    std::vector<SparseEntry>& context = contextBlock_;
    context.clear();
    context.push_back({registry_.find("u", e.userKey).value(), 1.0});
    context.push_back({registry_.find("occ", user.occupation).value(), 1.0});
    if (user.male) context.push_back({registry_.find("sex", "").value(), 1.0});
    context.push_back({registry_.find("age", "").value(), user.age / 100.0});
    context.push_back(
        {registry_.find("day", std::to_string(day_of_week_utc(e.timestamp))).value(), 1.0});

    const auto hist = history_.find(e.userKey);
    if (hist != history_.end()) {
      if (hist->second.lastItem) {
        for (int g : hist->second.lastItem->genres) {
          context.push_back({registry_.find("lg", std::to_string(g)).value(), 1.0});
        }
      }
      if (hist->second.hasDay) {
        context.push_back(
            {registry_.find("lday", std::to_string(hist->second.lastDow)).value(), 1.0});
      }
    }
    std::sort(context.begin(), context.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
    contextStamp_ = stamp_;
    contextUser_ = e.userKey;
    contextTimestamp_ = e.timestamp;
  }

  const std::vector<SparseEntry>& block = blockIt->second;
  std::vector<SparseEntry> merged(contextBlock_.size() + block.size());
  std::merge(contextBlock_.begin(), contextBlock_.end(), block.begin(), block.end(),
             merged.begin(),
             [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  return SparseVector(registry_.size(), std::move(merged));
}

void Ml100kEncoder::consume(const Event& e) {
  ++stamp_;
  History& hist = history_[e.userKey];
  hist.lastItem = &data_->items.at(e.itemKey);
  hist.hasDay = true;
  hist.lastDow = day_of_week_utc(e.timestamp);
}

}  // namespace streamfm
