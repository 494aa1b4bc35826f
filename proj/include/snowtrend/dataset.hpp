#pragma once

#include <string>

#include "snowtrend/field.hpp"
#include "snowtrend/grid.hpp"

namespace snowtrend {

// On-disk dataset layout: a directory holding
//   header.json  - grid geometry, ISO-8601 time stamps, units, variable name
//   data.f32     - little-endian binary32, row-major [time][lat][lon]
// Surface masks use data.u8 (0 = ocean, 1 = land) plus optional regions.u8 /
// regions.json for named labels.

GridField read_dataset(const std::string& dir);
void write_dataset(const GridField& field, const std::string& dir);

SurfaceMask read_surface_mask(const std::string& dir);
void write_surface_mask(const SurfaceMask& mask, const std::string& dir);

// Write-to-temp-then-rename, so readers never observe partial files.
void atomic_write_bytes(const std::string& path, const void* data,
                        std::size_t size);
void atomic_write_text(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace snowtrend
