// Serialisation: 17-digit locale-free numbers, RFC-4180 CSV, JSON with
// sorted keys, and converters for problems, distributions and processes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "persuade/consistency.hpp"
#include "persuade/model.hpp"

namespace persuade::io {

using json = nlohmann::json;

/// Shortest form is not used: always 17 significant digits, '.' decimal
/// point, "nan"/"inf"/"-inf" for non-finite values.
std::string fmt(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(const std::vector<double>& row);
};

std::string to_csv(const Table& t);
/// Throws std::runtime_error on I/O failure.
void emit_csv(const Table& t, const std::string& path);

/// Keys sorted, numbers through fmt(), non-finite numbers as null.
std::string dump_json(const json& j, int indent = 2);
void emit_json(const json& j, const std::string& path);
json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

/// CSV with a header row; quoted fields allowed.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Problem file: {states, actions, times, prior, u, v}; u/v indexed
/// [state][action][time]. Errors name the offending key.
Primitives primitives_from_json(const json& j);
json to_json(const Primitives& p);

/// [{belief: [...], time: t, weight: w}, ...] with time as a value.
json to_json(const BeliefTimeDistribution& f);
/// Times are matched to `times` within 1e-12.
BeliefTimeDistribution distribution_from_json(const json& j, const std::vector<double>& times);

json to_json(const FiniteBeliefProcess& p);
FiniteBeliefProcess process_from_json(const json& j);

/// 64-bit FNV-1a, hex.
std::string hash_hex(const std::string& bytes);

}  // namespace persuade::io
