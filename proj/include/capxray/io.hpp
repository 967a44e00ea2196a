#pragma once

/// \file
/// Persistence of sinograms (CSV plus JSON sidecar), gridded field pairs
/// (CSV) and complex planar fields (JSON header line plus binary body).
/// Numbers are written with 17 significant digits so files round-trip.

#include <filesystem>
#include <string>

#include "capxray/dbar.hpp"
#include "capxray/fields.hpp"
#include "capxray/xray.hpp"

namespace capxray {

/// "%.17g" formatting.
std::string format_double(double x);

/// Path of the JSON sidecar that accompanies a sinogram CSV.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

void write_sinogram(const std::filesystem::path& csv, const Sinogram& s,
                    const TransformOptions& opt = {});
Sinogram read_sinogram(const std::filesystem::path& csv);

void write_field_pair(const std::filesystem::path& csv, const FieldPair& p);
FieldPair read_field_pair(const std::filesystem::path& csv);

void write_complex_field(const std::filesystem::path& file, const ComplexField& g);
ComplexField read_complex_field(const std::filesystem::path& file);

}  // namespace capxray
