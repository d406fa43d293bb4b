#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace sfcapm {

using ordered_json = nlohmann::ordered_json;

// Incremental FNV-1a 64-bit hash over raw bytes.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string hex64(std::uint64_t value);

// Serializes with keys in insertion order and doubles at 17 significant
// digits, so parsing returns the identical value and re-serializing the
// identical bytes.
std::string dump_json(const ordered_json& value);

// Fixed six-decimal rendering used by report display blocks.
std::string format_fixed6(double value);

std::string utc_timestamp();

// Envelope shared by every JSON report. serialize/parse round-trip to an
// equal value, and to identical bytes when the timestamp is absent.
struct ReportDocument {
  std::string tool;
  std::string version;
  std::string command;
  std::string input_digest;
  std::optional<std::string> timestamp;
  std::string payload_kind;  // moments | calibration | pricing |
                             // classification | simulation
  ordered_json payload;

  std::string serialize() const;
  static ReportDocument parse(std::string_view text);
  bool operator==(const ReportDocument&) const = default;
};

}  // namespace sfcapm
