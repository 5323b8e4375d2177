#pragma once

#include <filesystem>

#include "passconn/streamline.hpp"

namespace passconn::tck {

// MRtrix .tck reader. Accepts Float32LE and Float32BE payloads; Float64
// variants raise UnsupportedFormat. Header keys other than datatype, count,
// total_count and file are kept in Tractogram::metadata (repeated keys are
// joined with '\n').
Tractogram read(const std::filesystem::path& path);

// Writes a Float32LE .tck file. Metadata values containing '\n' are written as
// repeated keys.
void write(const Tractogram& tractogram, const std::filesystem::path& path);

}  // namespace passconn::tck
