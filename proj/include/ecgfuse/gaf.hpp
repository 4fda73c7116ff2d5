#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecgfuse::gaf {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadResolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PolarSeries {
  std::vector<double> angles;  // arccos of the normalized samples
  std::vector<double> radii;   // i / t, kept for plotting; not part of the Gramian
};

// Domain of the normalized samples fed to arccos. Unit ([0,1], angles in
// [0, pi/2]) is the default; Symmetric rescales to [-1,1] first.
enum class Range { Unit, Symmetric };
Range range_from_name(const std::string& name);

using GafMatrix = Eigen::MatrixXd;

// arccos of each sample plus the i/t radius. Inputs must lie in [0,1];
// values within 1e-12 of the bounds are clamped, anything further rejected.
PolarSeries to_polar(const std::vector<double>& normalized, Range range = Range::Unit);

// Gramian angular field: G(i,j) = cos(phi_i + phi_j). Symmetric, entries in
// [-1, 1], diagonal 2 x_i^2 - 1 (in the arccos domain).
GafMatrix gaf_encode(const std::vector<double>& normalized, Range range = Range::Unit);

// Resize to res x res. Downscaling uses exact area-weighted averaging (rows
// sum to one, so a constant matrix stays constant and symmetry is kept);
// upscaling is bilinear.
GafMatrix resize(const GafMatrix& g, int res);

// Binary P5 PGM; pixel = round((v + 1)/2 * 255).
void export_pgm(const GafMatrix& g, const std::string& path);

// CSV dump, row-major, 9 significant digits.
void export_csv(const GafMatrix& g, const std::string& path);

}  // namespace ecgfuse::gaf
