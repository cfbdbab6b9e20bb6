#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mapek/error.hpp"

namespace mapek::simnet {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view log_format = "mapek-log/1";

/// One line of the event log: {"tick","seq","kind","source","payload"}.
struct LogRecord {
    Tick tick = 0;
    std::uint64_t seq = 0;
    std::string kind;
    std::string source;
    Json payload = Json::object();
};

/// Compact JSON; floating-point numbers with exactly six decimals.
std::string render_json(const Json& value);

/// The record as one log line, without the trailing LF.
std::string render_record(const LogRecord& record);

/// Throws corrupt-log with `where()` = "line N".
std::vector<LogRecord> parse_log(std::string_view text);

/// Structural re-check of a log: header first, tick monotonicity, strictly
/// increasing seq, link arrival arithmetic and FIFO, and the adaptation
/// causality chain. Each violation is "line N: message".
std::vector<std::string> replay_check(const std::vector<LogRecord>& records);

}  // namespace mapek::simnet
