#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ecgfuse/gaf.hpp"
#include "ecgfuse/rng.hpp"

using namespace ecgfuse;
using namespace ecgfuse::gaf;

namespace {
std::vector<double> random_unit_vector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return v;
}

// Independent route: cos(phi_i + phi_j) evaluated through the angles.
GafMatrix cos_form(const std::vector<double>& x) {
  const auto p = to_polar(x);
  const auto n = static_cast<Eigen::Index>(x.size());
  GafMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = std::cos(p.angles[static_cast<std::size_t>(i)] +
                         p.angles[static_cast<std::size_t>(j)]);
  return g;
}
}  // namespace

TEST_CASE("to_polar angles and radii") {
  const auto p = to_polar({1.0, 0.0, 0.5});
  CHECK(p.angles[0] == doctest::Approx(0.0));
  CHECK(p.angles[1] == doctest::Approx(M_PI / 2));
  CHECK(p.angles[2] == doctest::Approx(M_PI / 3));
  CHECK(p.radii[2] == doctest::Approx(1.0));  // i/t spans (0, 1]

  SUBCASE("clamping near the boundary, rejection beyond") {
    CHECK(to_polar({1.0 + 1e-13}).angles[0] == doctest::Approx(0.0));
    CHECK_THROWS_AS(to_polar({1.1}), DomainError);
    CHECK_THROWS_AS(to_polar({-0.2}), DomainError);
    CHECK_THROWS_AS(to_polar({}), DomainError);
  }
  SUBCASE("symmetric range maps 0 to pi") {
    const auto ps = to_polar({0.0, 0.5, 1.0}, Range::Symmetric);
    CHECK(ps.angles[0] == doctest::Approx(M_PI));
    CHECK(ps.angles[1] == doctest::Approx(M_PI / 2));
    CHECK(ps.angles[2] == doctest::Approx(0.0));
  }
}

TEST_CASE("gaf_encode closed forms") {
  SUBCASE("two-point example") {
    const auto g = gaf_encode({1.0, 0.0});
    CHECK(g(0, 0) == doctest::Approx(1.0));
    CHECK(g(0, 1) == doctest::Approx(0.0));
    CHECK(g(1, 0) == doctest::Approx(0.0));
    CHECK(g(1, 1) == doctest::Approx(-1.0));
  }
  SUBCASE("constant input gives 2c^2 - 1 everywhere") {
    const auto g = gaf_encode(std::vector<double>(10, 0.5));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j)
        CHECK(g(i, j) == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("product form equals cos form on random length-187 beats") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
      const auto x = random_unit_vector(187, rng);
      const auto g = gaf_encode(x);
      const auto ref = cos_form(x);
      CHECK((g - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("gaf invariants: symmetry, range, diagonal") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_unit_vector(64, rng);
    const auto g = gaf_encode(x);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);  // exact by construction
    CHECK(g.maxCoeff() <= 1.0 + 1e-12);
    CHECK(g.minCoeff() >= -1.0 - 1e-12);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      CHECK(std::abs(g(i, i) - (2 * xi * xi - 1)) < 1e-12);
    }
  }
}

TEST_CASE("resize") {
  Rng rng(8);
  const auto x = random_unit_vector(32, rng);
  const auto g = gaf_encode(x);

  SUBCASE("identity at full resolution") {
    CHECK((resize(g, 32) - g).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("res = 1 yields the matrix mean") {
    const auto r = resize(g, 1);
    CHECK(r(0, 0) == doctest::Approx(g.mean()).epsilon(1e-12));
  }
  SUBCASE("constant matrix stays constant") {
    const auto c = gaf_encode(std::vector<double>(32, 0.3));
    const auto r = resize(c, 7);
    for (Eigen::Index i = 0; i < 7; ++i)
      for (Eigen::Index j = 0; j < 7; ++j) CHECK(r(i, j) == doctest::Approx(c(0, 0)));
  }
  SUBCASE("downsample keeps symmetry, range, and the mean when res divides n") {
    const auto r = resize(g, 16);
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.maxCoeff() <= 1.0 + 1e-12);
    CHECK(r.minCoeff() >= -1.0 - 1e-12);
    CHECK(r.mean() == doctest::Approx(g.mean()).epsilon(1e-12));
  }
  SUBCASE("upscale is bilinear and stays in range") {
    const auto r = resize(g, 48);
    CHECK(r.rows() == 48);
    CHECK(r.maxCoeff() <= 1.0 + 1e-12);
    CHECK(r.minCoeff() >= -1.0 - 1e-12);
  }
  SUBCASE("bad resolution") {
    CHECK_THROWS_AS(resize(g, 0), BadResolution);
  }
}

TEST_CASE("pgm export pixel mapping") {
  GafMatrix g(1, 3);
  g << -1.0, 0.0, 1.0;
  const auto dir = std::filesystem::temp_directory_path() / "ecgfuse_gaf_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "g.pgm").string();
  export_pgm(g, path);

  std::ifstream in(path, std::ios::binary);
  std::string magic, dims1, dims2, maxval;
  in >> magic >> dims1 >> dims2 >> maxval;
  CHECK(magic == "P5");
  CHECK(dims1 == "3");
  CHECK(dims2 == "1");
  CHECK(maxval == "255");
  in.get();  // single whitespace after maxval
  CHECK(in.get() == 0);
  CHECK(in.get() == 128);
  CHECK(in.get() == 255);
}

TEST_CASE("csv export round-trips values at 9 significant digits") {
  GafMatrix g(2, 2);
  g << 0.123456789, -0.5, 1.0, 0.0;
  const auto dir = std::filesystem::temp_directory_path() / "ecgfuse_gaf_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "g.csv").string();
  export_csv(g, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "0.123456789,-0.5");
  std::getline(in, line);
  CHECK(line == "1,0");
}
