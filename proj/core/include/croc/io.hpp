#ifndef CROC_IO_HPP_
#define CROC_IO_HPP_

#include <filesystem>

#include "croc/features.hpp"
#include "croc/segeval.hpp"

namespace croc {

// CROCFEAT: 8-byte magic, u32 version, u32 n_tokens, u32 dim (all
// little-endian), then n_tokens*dim IEEE-754 binary32 values, row-major.
// CROCMASK: 8-byte magic, u32 version, u32 height, u32 width, then
// height*width u16 labels, row-major. Writes are write-temp-then-rename.

inline constexpr std::uint32_t kFeatureFormatVersion = 1;
inline constexpr std::uint32_t kMaskFormatVersion = 1;

FeatureMatrix read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const Matrix& m);

// Length-n vector stored as an n x 1 CROCFEAT file.
Vector read_vector(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, const Vector& v);

LabelMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const LabelMask& mask);

// Six whitespace-separated fields: x0 y0 width height grid_n hflip.
CropGeometry read_geometry(const std::filesystem::path& path);
void write_geometry(const std::filesystem::path& path,
                    const CropGeometry& geom);

}  // namespace croc

#endif  // CROC_IO_HPP_
