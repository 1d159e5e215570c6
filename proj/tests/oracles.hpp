#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the code it checks.

#include "handvox/types.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using handvox::Vec3;

std::mt19937_64& rng();
double uniform(std::mt19937_64& g, double lo, double hi);

// Voxel containing p, found by scanning slab boundaries per axis.
std::array<int, 3> scan_voxel(const handvox::CubeFrame& frame, int dim, const Vec3& p);

// Occupancy by looping over points and scanning slabs; row-major x fastest.
std::vector<float> voxelize_points(const std::vector<Vec3>& pts, const handvox::CubeFrame& frame, int dim);

// Same rule as the surface voxelizer, checked at every voxel center against
// every face with a projection-based distance.
std::vector<float> voxelize_mesh(const handvox::Mesh& mesh, const handvox::CubeFrame& frame, int dim);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Rotation written out entry by entry from the three elementary matrices.
std::array<std::array<double, 3>, 3> rotation_xyz(double ax_deg, double ay_deg, double az_deg);

// Scalar-loop losses.
double bce(const std::vector<float>& pred, const std::vector<float>& gt);
double half_sum_squares(const std::vector<Vec3>& a, const std::vector<Vec3>& b);
double mean_squared_norm(const std::vector<handvox::Vec3f>& a, const std::vector<handvox::Vec3f>& b);
double mean_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Random data.
handvox::Mesh random_mesh(std::mt19937_64& g, int vertices, int faces);
handvox::Mesh icosphere(int subdivisions, double radius);
handvox::Mesh noisy(const handvox::Mesh& m, std::mt19937_64& g, double amplitude);

std::string temp_dir(const std::string& tag);

}  // namespace oracle
