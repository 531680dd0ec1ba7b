#include "ucov/io.hpp"

#include <fstream>

#include <json.hpp>

namespace ucov {

namespace fs = std::filesystem;

std::filesystem::path cache_path(const fs::path& dir, std::uint64_t q) {
  return dir / ("u3_q" + std::to_string(q) + ".ucov");
}

void write_group_cache(const fs::path& path, const GroupTable& t) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot open cache file for writing");
  out.write(kCacheMagic, 5);
  std::uint32_t q32 = static_cast<std::uint32_t>(t.prime_power().q);
  std::uint64_t order = t.order();
  unsigned char hdr[12];
  for (int i = 0; i < 4; ++i) hdr[i] = static_cast<unsigned char>(q32 >> (8 * i));
  for (int i = 0; i < 8; ++i) hdr[4 + i] = static_cast<unsigned char>(order >> (8 * i));
  out.write(reinterpret_cast<const char*>(hdr), 12);
  std::vector<unsigned char> buf;
  buf.reserve(t.order() * 18);
  for (const Mat3& m : t.elements())
    for (auto e : m) {
      buf.push_back(static_cast<unsigned char>(e & 0xff));
      buf.push_back(static_cast<unsigned char>(e >> 8));
    }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  require(out.good(), "cache write failed");
}

std::optional<GroupTable> read_group_cache(const fs::path& path, PrimePower q) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return std::nullopt;
  char magic[5];
  in.read(magic, 5);
  if (!in.good() || !std::equal(magic, magic + 5, kCacheMagic)) return std::nullopt;
  unsigned char hdr[12];
  in.read(reinterpret_cast<char*>(hdr), 12);
  if (!in.good()) return std::nullopt;
  std::uint32_t q32 = 0;
  std::uint64_t order = 0;
  for (int i = 0; i < 4; ++i) q32 |= std::uint32_t(hdr[i]) << (8 * i);
  for (int i = 0; i < 8; ++i) order |= std::uint64_t(hdr[4 + i]) << (8 * i);
  if (q32 != q.q || order != GroupTable::expected_order(q)) return std::nullopt;
  std::vector<unsigned char> buf(order * 18);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in.good() || in.gcount() != static_cast<std::streamsize>(buf.size())) return std::nullopt;
  in.get();
  if (!in.eof()) return std::nullopt;  // trailing garbage
  std::vector<Mat3> elems(order);
  for (std::uint64_t i = 0; i < order; ++i)
    for (int e = 0; e < 9; ++e)
      elems[i][e] = static_cast<std::uint16_t>(buf[i * 18 + 2 * e] |
                                               (std::uint16_t(buf[i * 18 + 2 * e + 1]) << 8));
  try {
    return GroupTable::adopt(q, std::move(elems));
  } catch (const std::exception&) {
    return std::nullopt;  // corrupt content: rebuild
  }
}

GroupTable load_or_build_group(PrimePower q, const fs::path& cache_dir, unsigned jobs) {
  if (!cache_dir.empty()) {
    auto path = cache_path(cache_dir, q.q);
    if (auto t = read_group_cache(path, q)) return std::move(*t);
    auto t = GroupTable::build(q, jobs);
    write_group_cache(path, t);
    return t;
  }
  return GroupTable::build(q, jobs);
}

std::uint64_t fnv1a_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return 0;
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount()) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (in.eof()) break;
  }
  return h;
}

void write_manifest(const fs::path& output, const std::string& config_line,
                    const std::vector<fs::path>& inputs) {
  nlohmann::ordered_json m;
  m["tool"] = "ucov";
  m["version"] = kToolVersion;
  m["config"] = config_line;
  nlohmann::ordered_json in = nlohmann::ordered_json::object();
  for (const auto& p : inputs) {
    char hex[19];
    std::snprintf(hex, sizeof hex, "0x%016llx",
                  static_cast<unsigned long long>(fnv1a_file(p)));
    in[p.string()] = hex;
  }
  m["inputs"] = in;
  std::ofstream out(output.string() + ".manifest.json", std::ios::trunc);
  require(out.good(), "cannot write manifest");
  out << m.dump(2) << "\n";
}

void write_dimacs(const fs::path& path, const PolarityGraph& g) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), "cannot write DIMACS file");
  std::uint64_t loops = 0;
  for (auto f : g.loop) loops += f;
  out << "c unitary polarity graph; " << loops
      << " loops on the absolute vertices omitted from the edge list\n";
  out << "p edge " << g.n << " " << g.n_edges() << "\n";
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (auto v : g.adj[u])
      if (u < v) out << "e " << (u + 1) << " " << (v + 1) << "\n";
  require(out.good(), "DIMACS write failed");
}

}  // namespace ucov
