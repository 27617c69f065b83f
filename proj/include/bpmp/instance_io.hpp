#pragma once

// Instance JSON interchange format:
//   {"n": 4,
//    "dist": [[0, 1, ...], ...],            n x n, miles
//    "requests": [{"from": 1, "to": 2, "weight": 0.4}, ...],
//    "params": {"p": 1.2, "c": 1.0, "v": 0.1, "Q": 1.0, "D": 10}}
// Request ids are assigned 1, 2, ... in array order.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "bpmp/core.hpp"

namespace bpmp {

nlohmann::json instance_to_json(const Instance& inst);

// Parses the document and rejects it (InvalidInstanceError, listing every
// validation error) unless validate_instance reports no errors.
Instance instance_from_json(const nlohmann::json& doc);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

// Canonical serialization used for digests and byte-identical output.
std::string instance_to_string(const Instance& inst);

// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string instance_digest(const Instance& inst);

}  // namespace bpmp
