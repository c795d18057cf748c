#pragma once

// Timing harness comparing the frequency-domain spectrum against SVD of the
// assembled dense layer matrix.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "convspectra/oracle.hpp"

namespace convspectra::bench {

enum class Method { Exact, FullMatrix };

const char* to_string(Method method) noexcept;

struct BenchSpec {
  Method method = Method::Exact;
  std::size_t n = 16;  // square feature map
  std::size_t m = 4;   // m_out = m_in
  std::size_t k = 3;   // square filter support
  int repeats = 5;
  int warmup = 1;
};

struct BenchRow {
  BenchSpec spec;
  double median_seconds = 0.0;
  double min_seconds = 0.0;
  double checksum = 0.0;  // sum of singular values
};

struct BenchOptions {
  std::uint64_t seed = 0;
  /// Full-matrix runs above the cap need force = true.
  oracle::Limits limits{};
};

/// Seed of the kernel used for one (n, m, k) cell; identical across methods.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t k) noexcept;

/// One timed cell: warmup runs, then `repeats` timed runs.
BenchRow run_one(const BenchSpec& spec, const BenchOptions& options);

/// Runs every spec in order. Specs are validated (and full-matrix sizes
/// checked against the cap) before anything is timed.
std::vector<BenchRow> run_bench(const std::vector<BenchSpec>& specs, const BenchOptions& options);

struct GridCell {
  std::size_t n, m, k;
};

/// Parses `n=16,m=4:8:16:32,k=3` (comma between keys, colon between
/// values) into the cartesian product of the listed values.
std::vector<GridCell> parse_grid(std::string_view text);

/// Expands grid cells for the given methods ("exact", "full" or "both").
std::vector<BenchSpec> make_specs(const std::vector<GridCell>& cells, std::string_view methods, int repeats,
                                  int warmup);

/// CSV columns: method,n,m,k,repeats,median_s,min_s,checksum.
std::string format_bench_csv(const std::vector<BenchRow>& rows);
void write_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);

}  // namespace convspectra::bench
