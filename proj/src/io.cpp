#include "slip/io.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slip {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

std::string sha256_hex(const void* data, std::size_t n) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, n, md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

std::string sha256_hex(const std::string& data) { return sha256_hex(data.data(), data.size()); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

namespace {

void write_raw(const std::filesystem::path& file, const std::string& kind, const Grid& g, double t,
               const std::vector<const Eigen::MatrixXd*>& blocks) {
  nlohmann::ordered_json h;
  h["kind"] = kind;
  h["nx"] = g.nx;
  h["ny"] = g.ny;
  h["Lx"] = g.Lx;
  h["Ly"] = g.Ly;
  h["t"] = t;
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << h.dump() << '\n';
  for (const auto* m : blocks)
    os.write(reinterpret_cast<const char*>(m->data()), static_cast<std::streamsize>(m->size() * sizeof(double)));
}

}  // namespace

void write_snapshot(const std::filesystem::path& file, const Grid& g, const VelocityField& y, double t) {
  write_raw(file, "velocity", g, t, {&y.u, &y.v});
}

void write_snapshot(const std::filesystem::path& file, const Grid& g, const PressureField& p, double t) {
  write_raw(file, "pressure", g, t, {&p.q});
}

Snapshot read_snapshot(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  std::string line;
  std::getline(is, line);
  const auto h = nlohmann::json::parse(line);
  Snapshot s;
  s.kind = h.at("kind");
  s.nx = h.at("nx");
  s.ny = h.at("ny");
  s.Lx = h.at("Lx");
  s.Ly = h.at("Ly");
  s.t = h.at("t");
  std::stringstream rest;
  rest << is.rdbuf();
  const std::string bytes = rest.str();
  if (bytes.size() % sizeof(double)) throw std::runtime_error("truncated snapshot " + file.string());
  s.data.resize(bytes.size() / sizeof(double));
  std::memcpy(s.data.data(), bytes.data(), bytes.size());
  return s;
}

VelocityField snapshot_velocity(const Grid& g, const Snapshot& s) {
  if (s.kind != "velocity" || s.nx != g.nx || s.ny != g.ny)
    throw std::runtime_error("snapshot does not match the grid");
  return VelocityField::from_vector(g, Eigen::Map<const Eigen::VectorXd>(s.data.data(), s.data.size()));
}

std::string trajectory_hash(const std::vector<VelocityField>& y) {
  std::string buf;
  for (const auto& s : y) {
    buf.append(reinterpret_cast<const char*>(s.u.data()), s.u.size() * sizeof(double));
    buf.append(reinterpret_cast<const char*>(s.v.data()), s.v.size() * sizeof(double));
  }
  return sha256_hex(buf);
}

void write_trajectory(const std::filesystem::path& dir, const Grid& g, const StateTrajectory& traj,
                      const std::string& config_hash, int cadence) {
  std::filesystem::create_directories(dir);
  if (cadence < 1) cadence = 1;
  nlohmann::ordered_json m;
  m["nx"] = g.nx;
  m["ny"] = g.ny;
  m["Lx"] = g.Lx;
  m["Ly"] = g.Ly;
  m["T"] = traj.time.T;
  m["nt"] = traj.time.nt;
  m["dt"] = traj.time.dt;
  m["config_hash"] = config_hash;
  m["content_hash"] = traj.content_hash.empty() ? trajectory_hash(traj.y) : traj.content_hash;
  m["bytes_per_slice"] = static_cast<long long>(g.num_faces() * sizeof(double));
  auto files = nlohmann::ordered_json::array();
  const int last = static_cast<int>(traj.y.size()) - 1;
  for (int n = 0; n <= last; ++n) {
    if (n % cadence != 0 && n != last) continue;
    char name[32];
    std::snprintf(name, sizeof name, "y_%05d.bin", n);
    write_snapshot(dir / name, g, traj.y[n], traj.time.t(n));
    files.push_back(name);
    if (n >= 1 && n - 1 < static_cast<int>(traj.p.size())) {
      std::snprintf(name, sizeof name, "p_%05d.bin", n);
      write_snapshot(dir / name, g, traj.p[n - 1], traj.time.t(n));
      files.push_back(name);
    }
  }
  m["files"] = files;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

void write_boundary_csv(const std::filesystem::path& file, const Grid& g, const TimeGrid& time,
                        const BoundarySeries& f, int first) {
  std::string out = "t,s,value\n";
  for (int n = first; n < f.cols(); ++n)
    for (int k = 0; k < g.num_boundary(); ++k)
      out += fmt(time.t(n)) + "," + fmt(g.boundary[k].s) + "," + fmt(f(k, n)) + "\n";
  write_text(file, out);
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << text;
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace slip
