#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nystrom/errors.hpp"
#include "nystrom/mesh.hpp"

using namespace nystrom;

TEST_CASE("round trip is bit identical") {
  const auto mesh = generate_sphere_mesh(0.092, 0.03, 2);
  std::stringstream s;
  write_mesh(mesh, s);
  const auto back = read_mesh(s);
  REQUIRE(back.num_nodes() == mesh.num_nodes());
  REQUIRE(back.num_patches() == mesh.num_patches());
  CHECK(back.interface_index() == 2);
  for (int i = 0; i < mesh.num_nodes(); ++i) CHECK(back.nodes()[i] == mesh.nodes()[i]);
  for (int p = 0; p < mesh.num_patches(); ++p) {
    CHECK(back.patches()[p].nodes == mesh.patches()[p].nodes);
  }
}

TEST_CASE("save and load through a file") {
  const auto path = std::filesystem::temp_directory_path() / "nystrom_io_test.msh";
  const auto mesh = generate_sphere_mesh(0.1, 0.035);
  save_mesh(mesh, path);
  const auto back = load_mesh(path);
  CHECK(back.num_patches() == mesh.num_patches());
  CHECK(back.mean_edge_length() == mesh.mean_edge_length());
  std::filesystem::remove(path);
}

TEST_CASE("parse errors carry the line number") {
  {
    std::istringstream s("bogus header\n");
    CHECK_THROWS_AS(read_mesh(s), ParseError);
  }
  {
    std::istringstream s("nystrom-mesh v1 3 1 1\n0 0 0\n1 0 x\n");
    try {
      read_mesh(s);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  {
    std::istringstream s("nystrom-mesh v1 1 1 1\n0 0 0\n0 0 0 0 0\n");
    CHECK_THROWS_AS(read_mesh(s), ParseError);
  }
  {
    std::istringstream s("nystrom-mesh v1 1 1 1\n0 0 0\n0 0 0 0 0 7\n");
    CHECK_THROWS_AS(read_mesh(s), ValidationError);
  }
}

TEST_CASE("loading validates the mesh") {
  const auto mesh = generate_sphere_mesh(0.1, 0.035);
  auto patches = mesh.patches();
  patches.push_back(patches.front());
  const auto path = std::filesystem::temp_directory_path() / "nystrom_io_bad.msh";
  {
    std::ofstream out(path);
    write_mesh(SurfaceMesh(mesh.nodes(), patches, 1), out);
  }
  CHECK_THROWS_WITH_AS(load_mesh(path), "non-manifold edge", ValidationError);
  std::filesystem::remove(path);
}
