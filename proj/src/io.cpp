#include "quatro/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace quatro {

namespace {

PointCloud load_kitti_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open cloud file: " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  if (size == 0) throw EmptyCloud("empty cloud file: " + path);
  if (size % 16 != 0) {
    throw ParseError("truncated kitti_bin record in " + path + " at byte offset " +
                     std::to_string((size / 16) * 16));
  }
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(size / 16));
  float rec[4];
  while (in.read(reinterpret_cast<char*>(rec), sizeof(rec))) {
    cloud.points.emplace_back(rec[0], rec[1], rec[2]);
  }
  return cloud;
}

PointCloud load_ply_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open cloud file: " + path);

  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError(what + " in " + path + " at line " + std::to_string(lineno));
  };

  if (!std::getline(in, line)) throw EmptyCloud("empty cloud file: " + path);
  ++lineno;
  if (line.substr(0, 3) != "ply") fail("missing ply magic");

  long vertex_count = -1;
  int ix = -1, iy = -1, iz = -1;
  int prop_index = 0;
  bool in_vertex_element = false;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment" || tok == "format" || tok.empty()) {
      continue;
    } else if (tok == "element") {
      std::string name;
      long count;
      if (!(ss >> name >> count)) fail("malformed element line");
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
    } else if (tok == "property") {
      if (!in_vertex_element) continue;
      std::string type, name;
      if (!(ss >> type >> name)) fail("malformed property line");
      if (name == "x") ix = prop_index;
      if (name == "y") iy = prop_index;
      if (name == "z") iz = prop_index;
      ++prop_index;
    } else if (tok == "end_header") {
      header_done = true;
      break;
    } else {
      fail("unexpected header token '" + tok + "'");
    }
  }
  if (!header_done) fail("missing end_header");
  if (vertex_count < 0) fail("missing vertex element");
  if (ix < 0 || iy < 0 || iz < 0) fail("vertex element lacks x/y/z properties");
  if (vertex_count == 0) throw EmptyCloud("ply with zero vertices: " + path);

  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(vertex_count));
  for (long v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line)) fail("unexpected end of vertex data");
    ++lineno;
    std::istringstream ss(line);
    std::vector<double> vals;
    double d;
    while (ss >> d) vals.push_back(d);
    if (static_cast<int>(vals.size()) < prop_index) fail("short vertex row");
    cloud.points.emplace_back(vals[ix], vals[iy], vals[iz]);
  }
  return cloud;
}

}  // namespace

PointCloud load_cloud(const std::string& path, CloudFormat format) {
  PointCloud cloud = format == CloudFormat::kKittiBin ? load_kitti_bin(path)
                                                      : load_ply_ascii(path);
  for (const auto& p : cloud.points) {
    if (!p.allFinite()) throw ParseError("non-finite coordinate in " + path);
  }
  return cloud;
}

PointCloud load_cloud_auto(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".ply") return load_cloud(path, CloudFormat::kPlyAscii);
  return load_cloud(path, CloudFormat::kKittiBin);
}

void save_cloud(const std::string& path, const PointCloud& cloud, CloudFormat format) {
  if (format == CloudFormat::kKittiBin) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    for (const auto& p : cloud.points) {
      float rec[4] = {static_cast<float>(p.x()), static_cast<float>(p.y()),
                      static_cast<float>(p.z()), 0.0f};
      out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    }
  } else {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    out.precision(17);
    for (const auto& p : cloud.points) {
      out << p.x() << " " << p.y() << " " << p.z() << "\n";
    }
  }
}

std::vector<RigidTransform> load_poses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pose file: " + path);
  std::vector<RigidTransform> poses;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double m[12];
    for (int i = 0; i < 12; ++i) {
      if (!(ss >> m[i])) {
        throw ParseError("malformed pose at " + path + ":" + std::to_string(lineno));
      }
    }
    RigidTransform t;
    t.rotation << m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10];
    t.translation << m[3], m[7], m[11];
    poses.push_back(t);
  }
  return poses;
}

void save_poses(const std::string& path, const std::vector<RigidTransform>& poses) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out.precision(17);
  for (const auto& t : poses) {
    const auto& r = t.rotation;
    out << r(0, 0) << " " << r(0, 1) << " " << r(0, 2) << " " << t.translation(0) << " "
        << r(1, 0) << " " << r(1, 1) << " " << r(1, 2) << " " << t.translation(1) << " "
        << r(2, 0) << " " << r(2, 1) << " " << r(2, 2) << " " << t.translation(2)
        << "\n";
  }
}

}  // namespace quatro
