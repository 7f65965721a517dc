#pragma once

#include "gmcflow/grid.hpp"

#include <cstdint>
#include <string>

namespace gmcflow {

// TGF1 container: header {magic "TGF1", u8 dim, u32 n_per_axis (LE),
// u8 kind (real=0 / complex=1)}, then row-major little-endian 64-bit floats,
// re/im interleaved for complex. Complex payloads use the same row-major
// node-lattice order as real ones (FFT frequency order per axis).

void write_field(const std::string& path, const GridField& f);
void write_field(const std::string& path, const SpectralField& F);

GridField read_grid_field(const std::string& path);
SpectralField read_spectral_field(const std::string& path, bool hermitian);

// FNV-1a over the file bytes; used for artifact manifests.
std::uint64_t file_checksum(const std::string& path);

}  // namespace gmcflow
