#include "sfcapm/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "sfcapm/errors.hpp"

namespace sfcapm {

Fnv1a& Fnv1a::update(std::string_view bytes) {
  for (unsigned char byte : bytes) {
    state_ ^= byte;
    state_ *= 1099511628211ull;
  }
  return *this;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::string format_fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  return buffer;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

namespace {

void write_value(std::string& out, const ordered_json& value) {
  switch (value.type()) {
    case nlohmann::detail::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ordered_json(it.key()).dump();
        out += ':';
        write_value(out, it.value());
      }
      out += '}';
      break;
    }
    case nlohmann::detail::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& element : value) {
        if (!first) out += ',';
        first = false;
        write_value(out, element);
      }
      out += ']';
      break;
    }
    case nlohmann::detail::value_t::number_float: {
      const double d = value.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        break;
      }
      char buffer[40];
      std::snprintf(buffer, sizeof buffer, "%.17g", d);
      out += buffer;
      break;
    }
    default:
      // Strings (escaped), integers, booleans and null already serialize
      // deterministically.
      out += value.dump();
      break;
  }
}

}  // namespace

std::string dump_json(const ordered_json& value) {
  std::string out;
  write_value(out, value);
  return out;
}

std::string ReportDocument::serialize() const {
  ordered_json root;
  root["tool"] = tool;
  root["version"] = version;
  root["command"] = command;
  root["input_digest"] = input_digest;
  if (timestamp) root["timestamp"] = *timestamp;
  root["payload_kind"] = payload_kind;
  root["payload"] = payload;
  return dump_json(root) + "\n";
}

ReportDocument ReportDocument::parse(std::string_view text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("report parse failure: ") + e.what());
  }
  try {
    ReportDocument doc;
    doc.tool = root.at("tool").get<std::string>();
    doc.version = root.at("version").get<std::string>();
    doc.command = root.at("command").get<std::string>();
    doc.input_digest = root.at("input_digest").get<std::string>();
    if (root.contains("timestamp"))
      doc.timestamp = root.at("timestamp").get<std::string>();
    doc.payload_kind = root.at("payload_kind").get<std::string>();
    doc.payload = root.at("payload");
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("report schema violation: ") + e.what());
  }
}

}  // namespace sfcapm
