#pragma once

#include "eslab/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace eslab {

/// Parses T rows of N comma-separated returns. A single leading header row is
/// skipped when its first field is not numeric; blank lines and lines starting
/// with '#' are ignored. Throws ParseError with the
/// offending line number on malformed input.
ReturnSample read_sample_csv(std::istream& in);

/// {"n_assets": N, "n_periods": T, "returns": [[...], ...]}
ReturnSample read_sample_json(std::string_view text);

/// Dispatches on extension: ".json" is JSON, anything else CSV.
ReturnSample load_sample(const std::filesystem::path& path);

/// Writes every entry in shortest round-trip form, so reading the output back
/// reproduces the matrix bit-for-bit.
void write_sample_csv(std::ostream& out, const ReturnSample& sample);
std::string sample_to_json(const ReturnSample& sample);

/// Shortest decimal representation that parses back to the same double.
std::string format_roundtrip(double value);
/// Fixed number of significant digits (default 12) for result tables.
std::string format_significant(double value, int digits = 12);

}  // namespace eslab
