#pragma once

#include "retrodiff/field.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace retrodiff {

/// Textual field format, one file per field:
///
///   retrodiff-field v1
///   d <dim>
///   ell <edge length, %.17g>
///   n <points per axis>
///   <re> <im>            (n^d lines, row-major mode order, %.17g each)
///
/// %.17g round-trips IEEE doubles exactly, so write/read is lossless and a
/// fixed field always produces identical bytes.
void write_field(std::ostream& out, const SpectralField& v);
void write_field(const std::filesystem::path& path, const SpectralField& v);

SpectralField read_field(std::istream& in);
SpectralField read_field(const std::filesystem::path& path);

/// %.17g rendering shared by every text artifact the library emits.
std::string format_double(double x);

} // namespace retrodiff
