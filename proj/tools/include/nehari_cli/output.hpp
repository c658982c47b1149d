#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "nehari/extended.hpp"

namespace nehari::cli {

using Json = nlohmann::ordered_json;

/// Pretty JSON with every float printed at 17 significant digits.
std::string dump_json(const Json& j);

/// Finite value as a number; sentinel as {"tag", "reason"}.
Json to_json(const Extended& x);
Json to_json(const std::optional<double>& x);

/// 9 significant digits; empty for nullopt.
std::string csv_number(std::optional<double> x);
std::string csv_number(const Extended& x);
/// Quotes fields that contain separators or quotes.
std::string csv_field(const std::string& s);

/// Writes the whole file; throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

/// "%.9g" with '-' kept and no locale; used in file names.
std::string lambda_tag(double lambda);

}  // namespace nehari::cli
