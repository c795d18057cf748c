#pragma once

// NPY array files (C-order, little-endian float32/float64) and CSV export
// of spectrum reports.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "convspectra/types.hpp"

namespace convspectra::io {

enum class Dtype { Float32, Float64 };

/// Array as stored on disk; values are widened to double on read.
struct ArrayFile {
  Dtype dtype = Dtype::Float64;
  std::vector<std::size_t> shape;
  std::vector<double> values;  // C-order
};

/// Parses NPY format 1.0 or 2.0. Throws BadHeader, UnsupportedDtype,
/// UnsupportedOrder or IoFailure.
ArrayFile read_array(const std::filesystem::path& path);

/// Writes NPY 1.0, float64, C-order. Truncates an existing file.
void write_array(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
                 const std::vector<double>& values);

/// Reads a 4D [h, w, out, in] kernel. Throws WrongRank for other ranks.
Kernel4D read_kernel(const std::filesystem::path& path);
void write_kernel(const Kernel4D& kernel, const std::filesystem::path& path);

enum class ExportMode { Values, Ratios, Normalized };

ExportMode parse_export_mode(std::string_view name);
const char* to_string(ExportMode mode) noexcept;

/// Shortest-safe text form: 17 significant digits.
std::string format_double(double x);

/// CSV text for a report. Header `index,value`, `index,ratio` or
/// `normalized_rank,ratio`; rows in descending value order; LF endings.
std::string format_spectrum_csv(const SpectrumReport& report, ExportMode mode);
void write_spectrum_csv(const SpectrumReport& report, const std::filesystem::path& path, ExportMode mode);

}  // namespace convspectra::io
