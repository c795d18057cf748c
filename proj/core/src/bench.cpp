#include "convspectra/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "convspectra/array_io.hpp"
#include "convspectra/spectra.hpp"

namespace convspectra::bench {

namespace {

void validate(const BenchSpec& s, const BenchOptions& options) {
  if (s.repeats < 3) throw Error(ErrorCode::InvalidArgument, "bench repeats must be >= 3");
  if (s.warmup < 1) throw Error(ErrorCode::InvalidArgument, "bench warmup must be >= 1");
  if (s.n == 0 || s.m == 0 || s.k == 0) throw Error(ErrorCode::InvalidArgument, "bench sizes must be >= 1");
  if (s.k > s.n) throw Error(ErrorCode::KernelLargerThanInput, "bench filter larger than feature map");
  if (s.method == Method::FullMatrix && !options.limits.force) {
    const std::size_t dim = s.n * s.n * s.m;
    if (dim > options.limits.max_dimension) {
      throw Error(ErrorCode::SizeGuard, "full-matrix bench at n=" + std::to_string(s.n) + ", m=" +
                                            std::to_string(s.m) + " needs a " + std::to_string(dim) +
                                            "-dimensional matrix, above the cap of " +
                                            std::to_string(options.limits.max_dimension) + " (use --force)");
    }
  }
}

double run_method(const BenchSpec& s, const Kernel4D& kernel, const oracle::Limits& limits) {
  const FeatureShape shape{s.n, s.n};
  const Spectrum spectrum = s.method == Method::Exact ? compute_spectrum(kernel, shape)
                                                      : oracle::dense_spectrum(kernel, shape, limits);
  return std::accumulate(spectrum.values.begin(), spectrum.values.end(), 0.0);
}

std::size_t parse_size(std::string_view text) {
  std::size_t value = 0;
  if (text.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid value");
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw Error(ErrorCode::InvalidArgument, "bad grid value '" + std::string(text) + "'");
    value = value * 10 + static_cast<std::size_t>(ch - '0');
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

const char* to_string(Method method) noexcept {
  return method == Method::Exact ? "exact" : "full_matrix";
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t k) noexcept {
  // splitmix64 over the cell coordinates
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (1 + n + 1000 * m + 1000000 * k));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

BenchRow run_one(const BenchSpec& spec, const BenchOptions& options) {
  validate(spec, options);
  const Kernel4D kernel = random_normal_kernel({spec.k, spec.k, spec.m, spec.m}, cell_seed(options.seed, spec.n, spec.m, spec.k));
  oracle::Limits limits = options.limits;
  limits.force = true;  // the cap was enforced by validate()

  BenchRow row;
  row.spec = spec;
  for (int i = 0; i < spec.warmup; ++i) row.checksum = run_method(spec, kernel, limits);

  std::vector<double> seconds;
  seconds.reserve(static_cast<std::size_t>(spec.repeats));
  for (int i = 0; i < spec.repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    row.checksum = run_method(spec, kernel, limits);
    const auto stop = std::chrono::steady_clock::now();
    seconds.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::sort(seconds.begin(), seconds.end());
  const std::size_t mid = seconds.size() / 2;
  row.median_seconds = seconds.size() % 2 ? seconds[mid] : 0.5 * (seconds[mid - 1] + seconds[mid]);
  row.min_seconds = seconds.front();
  if (!std::isfinite(row.checksum)) throw Error(ErrorCode::NonFiniteEntry, "bench checksum is not finite");
  return row;
}

std::vector<BenchRow> run_bench(const std::vector<BenchSpec>& specs, const BenchOptions& options) {
  for (const auto& s : specs) validate(s, options);
  std::vector<BenchRow> rows;
  rows.reserve(specs.size());
  for (const auto& s : specs) rows.push_back(run_one(s, options));
  return rows;
}

std::vector<GridCell> parse_grid(std::string_view text) {
  std::vector<std::size_t> ns, ms, ks;
  for (auto part : split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument, "grid entry '" + std::string(part) + "' is not key=values");
    const auto key = part.substr(0, eq);
    std::vector<std::size_t>* target = key == "n" ? &ns : key == "m" ? &ms : key == "k" ? &ks : nullptr;
    if (!target) throw Error(ErrorCode::InvalidArgument, "unknown grid key '" + std::string(key) + "'");
    for (auto v : split(part.substr(eq + 1), ':')) target->push_back(parse_size(v));
  }
  if (ns.empty() || ms.empty() || ks.empty())
    throw Error(ErrorCode::InvalidArgument, "grid needs n=, m= and k= entries");

  std::vector<GridCell> cells;
  for (auto n : ns)
    for (auto m : ms)
      for (auto k : ks) cells.push_back({n, m, k});
  return cells;
}

std::vector<BenchSpec> make_specs(const std::vector<GridCell>& cells, std::string_view methods, int repeats,
                                  int warmup) {
  std::vector<Method> list;
  if (methods == "exact")
    list = {Method::Exact};
  else if (methods == "full")
    list = {Method::FullMatrix};
  else if (methods == "both")
    list = {Method::Exact, Method::FullMatrix};
  else
    throw Error(ErrorCode::InvalidArgument, "method must be exact, full or both");

  std::vector<BenchSpec> specs;
  for (const auto& c : cells)
    for (auto method : list) specs.push_back({method, c.n, c.m, c.k, repeats, warmup});
  return specs;
}

std::string format_bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "method,n,m,k,repeats,median_s,min_s,checksum\n";
  for (const auto& r : rows) {
    os << to_string(r.spec.method) << ',' << r.spec.n << ',' << r.spec.m << ',' << r.spec.k << ','
       << r.spec.repeats << ',' << io::format_double(r.median_seconds) << ',' << io::format_double(r.min_seconds)
       << ',' << io::format_double(r.checksum) << '\n';
  }
  return os.str();
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << format_bench_csv(rows);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

}  // namespace convspectra::bench
