#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nystrom/errors.hpp"
#include "nystrom/mesh.hpp"

namespace nystrom {
namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line, tokenized.
  std::istringstream next(const char* what) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      if (text.find_first_not_of(" \t\r") != std::string::npos) {
        return std::istringstream(text);
      }
    }
    throw ParseError(line_ + 1, std::string("unexpected end of file, expected ") + what);
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

void expect_end(std::istringstream& fields, const LineReader& reader) {
  std::string extra;
  if (fields >> extra) throw ParseError(reader.line(), "trailing token '" + extra + "'");
}

}  // namespace

SurfaceMesh read_mesh(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next("header");
  std::string magic, version;
  long long n_nodes = -1, n_patches = -1;
  int iface = 0;
  if (!(header >> magic >> version >> n_nodes >> n_patches >> iface) ||
      magic != "nystrom-mesh" || version != "v1" || n_nodes < 0 || n_patches < 0) {
    throw ParseError(reader.line(),
                     "expected 'nystrom-mesh v1 <n_nodes> <n_patches> <interface_index>'");
  }
  expect_end(header, reader);

  std::vector<Point3> nodes;
  nodes.reserve(static_cast<std::size_t>(n_nodes));
  for (long long k = 0; k < n_nodes; ++k) {
    auto fields = reader.next("node coordinates");
    Point3 p;
    if (!(fields >> p.x() >> p.y() >> p.z())) {
      throw ParseError(reader.line(), "expected three coordinates");
    }
    expect_end(fields, reader);
    if (!p.allFinite()) throw ValidationError("non-finite node coordinate");
    nodes.push_back(p);
  }

  std::vector<QuadraticPatch> patches;
  patches.reserve(static_cast<std::size_t>(n_patches));
  for (long long k = 0; k < n_patches; ++k) {
    auto fields = reader.next("patch connectivity");
    QuadraticPatch patch;
    for (int& id : patch.nodes) {
      long long v;
      if (!(fields >> v)) throw ParseError(reader.line(), "expected six node indices");
      if (v < 0 || v >= n_nodes) {
        throw ValidationError("node index " + std::to_string(v) + " out of range");
      }
      id = static_cast<int>(v);
    }
    expect_end(fields, reader);
    patches.push_back(patch);
  }
  return SurfaceMesh(std::move(nodes), std::move(patches), iface);
}

void write_mesh(const SurfaceMesh& mesh, std::ostream& out) {
  out << "nystrom-mesh v1 " << mesh.num_nodes() << ' ' << mesh.num_patches() << ' '
      << mesh.interface_index() << '\n';
  char buf[96];
  for (const auto& p : mesh.nodes()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  for (const auto& patch : mesh.patches()) {
    for (int m = 0; m < 6; ++m) out << (m ? " " : "") << patch.nodes[m];
    out << '\n';
  }
}

SurfaceMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  SurfaceMesh mesh = read_mesh(in);
  validate_mesh(mesh);
  return mesh;
}

void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_mesh(mesh, out);
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace nystrom
