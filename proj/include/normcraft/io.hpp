#pragma once

#include <string>

#include "normcraft/normal_map.hpp"

namespace normcraft {

// .nrm interchange format (little-endian):
//   bytes 0..3   magic "NRM1"
//   bytes 4..7   width  (u32)
//   bytes 8..11  height (u32)
//   bytes 12..15 layout (u32, must be 1 = float32 row-major interleaved xyz)
//   payload      height*width*3 float32
// An all-zero pixel marks an invalid mask entry. Non-zero pixels are
// renormalized on load; deviations beyond 1e-3 are counted as quantization
// warnings.
//
// .png files use 16-bit RGB with v = round((component+1)/2 * 65535) per
// channel and (0,0,0) reserved for invalid pixels.

struct LoadStats {
    int quantization_warnings = 0;  // pixels off unit norm by more than 1e-3
};

// Extension selects the codec (.nrm or .png).
NormalMap load_normal_map(const std::string& path, LoadStats* stats = nullptr);
void save_normal_map(const NormalMap& n, const std::string& path);

NormalMap load_nrm(const std::string& path, LoadStats* stats = nullptr);
void save_nrm(const NormalMap& n, const std::string& path);

NormalMap load_png(const std::string& path, LoadStats* stats = nullptr);
void save_png(const NormalMap& n, const std::string& path);

// Depth raster ("DEP1" header, float32 payload, NaN = invalid); used by the
// CLI integrate subcommand.
struct DepthMap;
void save_depth(const DepthMap& d, const std::string& path);

}  // namespace normcraft
