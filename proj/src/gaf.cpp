#include "ecgfuse/gaf.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace ecgfuse::gaf {

namespace {

constexpr double kClampTol = 1e-12;

double checked_sample(double x, std::size_t i) {
  if (x < -kClampTol || x > 1.0 + kClampTol)
    throw DomainError("normalized sample " + std::to_string(i) + " = " + std::to_string(x) +
                      " outside [0, 1]");
  return std::min(1.0, std::max(0.0, x));
}

// Row-stochastic resampling matrix mapping n source cells to `res` output
// cells. Downscale rows are exact area averages; upscale rows are bilinear.
Eigen::MatrixXd resample_matrix(int n, int res) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(res, n);
  if (res <= n) {
    const double scale = static_cast<double>(n) / res;
    for (int i = 0; i < res; ++i) {
      const double lo = i * scale, hi = (i + 1) * scale;
      for (int j = static_cast<int>(std::floor(lo)); j < n && j < hi; ++j) {
        const double cover = std::min(hi, static_cast<double>(j + 1)) -
                             std::max(lo, static_cast<double>(j));
        if (cover > 0) w(i, j) = cover / scale;
      }
    }
  } else {
    for (int i = 0; i < res; ++i) {
      const double pos = res == 1 ? 0.0 : static_cast<double>(i) * (n - 1) / (res - 1);
      const int lo = std::min(static_cast<int>(pos), n - 2 < 0 ? 0 : n - 2);
      const double frac = pos - lo;
      w(i, lo) = 1.0 - frac;
      if (lo + 1 < n) w(i, lo + 1) = frac;
      else w(i, lo) = 1.0;
    }
  }
  return w;
}

}  // namespace

Range range_from_name(const std::string& name) {
  if (name == "unit") return Range::Unit;
  if (name == "symmetric") return Range::Symmetric;
  throw std::invalid_argument("unknown gaf range: " + name);
}

PolarSeries to_polar(const std::vector<double>& normalized, Range range) {
  if (normalized.empty()) throw DomainError("empty input");
  PolarSeries p;
  const double t = static_cast<double>(normalized.size());
  p.angles.resize(normalized.size());
  p.radii.resize(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    double x = checked_sample(normalized[i], i);
    if (range == Range::Symmetric) x = 2.0 * x - 1.0;
    p.angles[i] = std::acos(x);
    p.radii[i] = static_cast<double>(i + 1) / t;
  }
  return p;
}

GafMatrix gaf_encode(const std::vector<double>& normalized, Range range) {
  const auto n = static_cast<Eigen::Index>(normalized.size());
  if (n == 0) throw DomainError("empty input");
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = checked_sample(normalized[static_cast<std::size_t>(i)], static_cast<std::size_t>(i));
    if (range == Range::Symmetric) x[i] = 2.0 * x[i] - 1.0;
  }
  // cos(phi_i + phi_j) = x_i x_j - sqrt(1-x_i^2) sqrt(1-x_j^2)
  Eigen::VectorXd s = (1.0 - x.array().square()).cwiseMax(0.0).sqrt();
  GafMatrix g = x * x.transpose() - s * s.transpose();
  return g;
}

GafMatrix resize(const GafMatrix& g, int res) {
  const int n = static_cast<int>(g.rows());
  if (res < 1) throw BadResolution("resolution must be >= 1, got " + std::to_string(res));
  if (res == n) return g;
  const Eigen::MatrixXd w = resample_matrix(n, res);
  return w * g * w.transpose();
}

void export_pgm(const GafMatrix& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P5\n" << g.cols() << " " << g.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      const double v = std::min(1.0, std::max(-1.0, g(r, c)));
      const auto pix = static_cast<std::uint8_t>(std::lround((v + 1.0) / 2.0 * 255.0));
      out.put(static_cast<char>(pix));
    }
  if (!out) throw IoError("write failed: " + path);
}

void export_csv(const GafMatrix& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.precision(9);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      if (c) out << ',';
      out << g(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace ecgfuse::gaf
