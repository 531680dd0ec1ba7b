#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ucov/graph.hpp"
#include "ucov/group.hpp"

namespace ucov {

// Binary group cache: magic "UCOV1", q (u32 LE), order (u64 LE), then the 9
// matrix entry indices per element, 2 bytes each, little-endian, in table
// order. Corruption (bad magic, wrong length, wrong order) is detected and
// reported as absent so callers rebuild.
inline constexpr char kCacheMagic[5] = {'U', 'C', 'O', 'V', '1'};

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t q);
void write_group_cache(const std::filesystem::path& path, const GroupTable& t);
std::optional<GroupTable> read_group_cache(const std::filesystem::path& path, PrimePower q);

// Builds the table, using/refreshing the cache when a directory is given.
GroupTable load_or_build_group(PrimePower q, const std::filesystem::path& cache_dir,
                               unsigned jobs = 0);

// FNV-1a over a file's bytes; 0 for missing files.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

// Writes <output>.manifest.json capturing the tool version, the full
// configuration line, and input-file hashes, so identical manifests certify
// byte-identical reruns.
void write_manifest(const std::filesystem::path& output, const std::string& config_line,
                    const std::vector<std::filesystem::path>& inputs);

// DIMACS edge list of the polarity graph; loops are omitted and flagged in a
// header comment.
void write_dimacs(const std::filesystem::path& path, const PolarityGraph& g);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace ucov
