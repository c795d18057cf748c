#include "convspectra/array_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

namespace convspectra::io {

static_assert(std::endian::native == std::endian::little, "NPY payloads are read as host little-endian");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

[[noreturn]] void bad_header(const std::filesystem::path& path, const std::string& why) {
  throw Error(ErrorCode::BadHeader, path.string() + ": " + why);
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read error on " + path.string());
  return bytes;
}

std::vector<std::size_t> parse_shape(const std::filesystem::path& path, const std::string& tuple) {
  std::vector<std::size_t> shape;
  std::stringstream ss(tuple);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // trailing comma of a 1-tuple
    const auto last = item.find_last_not_of(" \tL");
    const std::string digits = item.substr(first, last - first + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      bad_header(path, "malformed shape entry '" + item + "'");
    shape.push_back(static_cast<std::size_t>(std::stoull(digits)));
  }
  return shape;
}

}  // namespace

ArrayFile read_array(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  if (bytes.size() < kMagicLen + 4 || bytes.compare(0, kMagicLen, kMagic, kMagicLen) != 0)
    bad_header(path, "missing NPY magic");

  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
    offset = 10;
  } else if (major == 2) {
    if (bytes.size() < 12) bad_header(path, "truncated header length");
    for (int i = 0; i < 4; ++i)
      header_len |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    offset = 12;
  } else {
    bad_header(path, "unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) bad_header(path, "truncated header");
  const std::string header = bytes.substr(offset, header_len);

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m;

  ArrayFile out;
  if (!std::regex_search(header, m, descr_re)) bad_header(path, "header has no descr");
  const std::string descr = m[1];
  std::size_t item_size = 0;
  if (descr == "<f8") {
    out.dtype = Dtype::Float64;
    item_size = 8;
  } else if (descr == "<f4") {
    out.dtype = Dtype::Float32;
    item_size = 4;
  } else {
    throw Error(ErrorCode::UnsupportedDtype, path.string() + ": dtype '" + descr +
                                                 "' (only little-endian float32/float64 are supported)");
  }

  if (!std::regex_search(header, m, order_re)) bad_header(path, "header has no fortran_order");
  if (m[1] == "True")
    throw Error(ErrorCode::UnsupportedOrder, path.string() + ": Fortran-ordered arrays are not supported");

  if (!std::regex_search(header, m, shape_re)) bad_header(path, "header has no shape");
  out.shape = parse_shape(path, m[1]);

  std::size_t count = 1;
  for (auto d : out.shape) count *= d;
  const std::size_t payload = offset + header_len;
  if (bytes.size() - payload < count * item_size) bad_header(path, "payload shorter than the declared shape");

  out.values.resize(count);
  const char* src = bytes.data() + payload;
  if (out.dtype == Dtype::Float64) {
    std::memcpy(out.values.data(), src, count * 8);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, src + i * 4, 4);
      out.values[i] = static_cast<double>(f);
    }
  }
  return out;
}

void write_array(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
                 const std::vector<double>& values) {
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  if (count != values.size()) throw Error(ErrorCode::ShapeMismatch, "array payload does not match shape");

  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) dict += ", ";
    dict += std::to_string(shape[i]);
  }
  if (shape.size() == 1) dict += ",";
  dict += "), }";
  // Pad so magic + version + length + header is a multiple of 64 bytes.
  const std::size_t unpadded = kMagicLen + 2 + 2 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict += '\n';
  if (dict.size() > 0xFFFF) throw Error(ErrorCode::InvalidArgument, "NPY header too long for version 1.0");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(kMagic, kMagicLen);
  const char version[2] = {1, 0};
  out.write(version, 2);
  const char len[2] = {static_cast<char>(dict.size() & 0xFF), static_cast<char>((dict.size() >> 8) & 0xFF)};
  out.write(len, 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 8));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

Kernel4D read_kernel(const std::filesystem::path& path) {
  ArrayFile a = read_array(path);
  if (a.shape.size() != 4)
    throw Error(ErrorCode::WrongRank,
                path.string() + ": expected a 4D [h, w, out, in] array, got rank " + std::to_string(a.shape.size()));
  return Kernel4D({a.shape[0], a.shape[1], a.shape[2], a.shape[3]}, std::move(a.values));
}

void write_kernel(const Kernel4D& kernel, const std::filesystem::path& path) {
  const auto& s = kernel.shape();
  write_array(path, {s.k_h, s.k_w, s.m_out, s.m_in}, std::vector<double>(kernel.data().begin(), kernel.data().end()));
}

ExportMode parse_export_mode(std::string_view name) {
  if (name == "values") return ExportMode::Values;
  if (name == "ratios") return ExportMode::Ratios;
  if (name == "normalized") return ExportMode::Normalized;
  throw Error(ErrorCode::InvalidArgument, "unknown export mode '" + std::string(name) + "'");
}

const char* to_string(ExportMode mode) noexcept {
  switch (mode) {
    case ExportMode::Values: return "values";
    case ExportMode::Ratios: return "ratios";
    case ExportMode::Normalized: return "normalized";
  }
  return "values";
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_spectrum_csv(const SpectrumReport& report, ExportMode mode) {
  if (report.spectrum.values.empty()) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  std::string out;
  switch (mode) {
    case ExportMode::Values: out = "index,value\n"; break;
    case ExportMode::Ratios: out = "index,ratio\n"; break;
    case ExportMode::Normalized: out = "normalized_rank,ratio\n"; break;
  }
  const auto& values = report.spectrum.values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    switch (mode) {
      case ExportMode::Values: out += std::to_string(i) + "," + format_double(values[i]); break;
      case ExportMode::Ratios: out += std::to_string(i) + "," + format_double(report.ratios[i]); break;
      case ExportMode::Normalized:
        out += format_double(report.normalized_rank_axis[i]) + "," + format_double(report.ratios[i]);
        break;
    }
    out += '\n';
  }
  return out;
}

void write_spectrum_csv(const SpectrumReport& report, const std::filesystem::path& path, ExportMode mode) {
  const std::string text = format_spectrum_csv(report, mode);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

}  // namespace convspectra::io
