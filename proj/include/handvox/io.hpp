#pragma once

#include "handvox/heatmap.hpp"
#include "handvox/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace handvox::io {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr int kMaxGridDim = 512;

// VGRD: "VGRD" u16 version, u32 Dx Dy Dz, f32 origin xyz, f32 voxel_size,
// u8 kind, then u8 (occupancy) or f32 (probability) values. Little-endian.
Bytes write_grid(const VoxelGrid& grid);
VoxelGrid read_grid(std::span<const std::uint8_t> bytes);

// VDSP: VGRD-style header with kind 2, then 3 x f32 per voxel.
Bytes write_field(const DisplacementField& field);
DisplacementField read_field(std::span<const std::uint8_t> bytes);

// u32 N, f32 sigma, then N VGRD blocks.
Bytes write_heatmaps(const HeatmapStack& stack);
HeatmapStack read_heatmaps(std::span<const std::uint8_t> bytes);

// Wavefront OBJ, v/f records only; indices are 1-based on disk.
std::string write_mesh(const Mesh& mesh);
Mesh read_mesh(const std::string& text);

// Binary PGM (P5); 16-bit samples are big-endian, values in millimeters.
Bytes write_depth(const DepthMap& depth);
DepthMap read_depth(std::span<const std::uint8_t> bytes);

// JSON array of [x, y, z].
std::string write_points(const std::vector<Vec3>& points);
std::vector<Vec3> read_points(const std::string& text);

inline std::string write_joints(const JointSet& j) { return write_points(j.joints); }
inline JointSet read_joints(const std::string& text) { return {read_points(text)}; }

Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace handvox::io
