#pragma once

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hopcirc::harness {

using nlohmann::json;

inline constexpr const char* tool_version = "0.1.0";

/// Default thresholds for the experiments; every report carries a copy.
struct Tolerances {
  double retrieval_radius = 0.1;        // query distance from its pattern
  double retrieval_distance = 1e-2;     // one-step success threshold
  double retrieval_success_rate = 0.99;
  double energy_step = 1e-6;            // allowed increase per step before the flag drops
};

inline json to_json(const Tolerances& t) {
  return {{"retrieval_radius", t.retrieval_radius},
          {"retrieval_distance", t.retrieval_distance},
          {"retrieval_success_rate", t.retrieval_success_rate},
          {"energy_step", t.energy_step}};
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Common report preamble. The hash is over the compact dump of `config`
/// (nlohmann objects keep keys sorted, so equal configs hash equally).
inline json report_header(const std::string& command, const json& config, const std::vector<std::uint64_t>& seeds,
                          const Tolerances& tol = {}) {
  return {{"tool", "hopcirc"},
          {"version", tool_version},
          {"command", command},
          {"config", config},
          {"config_hash", hex64(fnv1a(config.dump()))},
          {"seeds", seeds},
          {"tolerances", to_json(tol)}};
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const Table& t) {
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    os << "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

/// Shortest text that reads back as the same double.
inline std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace hopcirc::harness
