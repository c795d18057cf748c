#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "convspectra/array_io.hpp"
#include "test_util.hpp"

using namespace convspectra;
using namespace convspectra::io;
using testing_util::TempDir;

namespace {

// Hand-assembled NPY file: magic, version, header length, padded dict, payload.
void write_raw_npy(const std::filesystem::path& path, int major, const std::string& dict, const std::string& payload) {
  const std::size_t prefix = major == 1 ? 10 : 12;
  std::string header = dict;
  while ((prefix + header.size() + 1) % 64 != 0) header += ' ';
  header += '\n';
  std::string out = "\x93NUMPY";
  out += static_cast<char>(major);
  out += '\0';
  const std::size_t len = header.size();
  out += static_cast<char>(len & 0xff);
  out += static_cast<char>((len >> 8) & 0xff);
  if (major != 1) {
    out += '\0';
    out += '\0';
  }
  out += header;
  out += payload;
  std::ofstream(path, std::ios::binary) << out;
}

template <typename T>
std::string bytes_of(const std::vector<T>& values) {
  std::string s(values.size() * sizeof(T), '\0');
  std::memcpy(s.data(), values.data(), s.size());
  return s;
}

ErrorCode read_error(const std::filesystem::path& path) {
  try {
    read_array(path);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ArrayIo, KernelRoundTripIsBitExact) {
  TempDir dir;
  Kernel4D k = testing_util::random_kernel(3, 2, 4, 5, 11);
  k(0, 0, 0, 0) = 1e-300;
  k(0, 0, 0, 1) = -0.0;
  write_kernel(k, dir / "k.npy");
  const Kernel4D back = read_kernel(dir / "k.npy");
  ASSERT_EQ(back.shape(), k.shape());
  EXPECT_EQ(std::memcmp(back.data().data(), k.data().data(), k.data().size_bytes()), 0);
}

TEST(ArrayIo, HeaderIsAlignedVersionOne) {
  TempDir dir;
  write_array(dir / "a.npy", {2, 3}, {1, 2, 3, 4, 5, 6});
  std::ifstream in(dir / "a.npy", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(bytes.substr(0, 6), "\x93NUMPY");
  EXPECT_EQ(bytes[6], 1);
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
  EXPECT_EQ((10 + header_len) % 64, 0u);
  EXPECT_NE(bytes.find("'descr': '<f8'"), std::string::npos);
  EXPECT_NE(bytes.find("'fortran_order': False"), std::string::npos);
  EXPECT_NE(bytes.find("(2, 3)"), std::string::npos);
  EXPECT_EQ(bytes.size(), 10 + header_len + 48);
}

TEST(ArrayIo, Float32IsWidened) {
  TempDir dir;
  const std::vector<float> values = {0.1f, -2.5f, 3.0f, 1e-7f};
  write_raw_npy(dir / "f.npy", 1, "{'descr': '<f4', 'fortran_order': False, 'shape': (1, 1, 2, 2), }", bytes_of(values));
  const auto arr = read_array(dir / "f.npy");
  EXPECT_EQ(arr.dtype, Dtype::Float32);
  for (std::size_t i = 0; i < values.size(); ++i) EXPECT_EQ(arr.values[i], static_cast<double>(values[i]));
  EXPECT_EQ(read_kernel(dir / "f.npy").shape(), (KernelShape{1, 1, 2, 2}));
}

TEST(ArrayIo, VersionTwoHeader) {
  TempDir dir;
  const std::vector<double> values = {1.5, 2.5, 3.5};
  write_raw_npy(dir / "v2.npy", 2, "{'descr': '<f8', 'fortran_order': False, 'shape': (3,), }", bytes_of(values));
  const auto arr = read_array(dir / "v2.npy");
  EXPECT_EQ(arr.shape, (std::vector<std::size_t>{3}));
  EXPECT_EQ(arr.values, values);
}

TEST(ArrayIo, KeyOrderDoesNotMatter) {
  TempDir dir;
  const std::vector<double> values = {4.0, 5.0};
  write_raw_npy(dir / "o.npy", 1, "{'shape': (2,), 'fortran_order': False, 'descr': '<f8'}", bytes_of(values));
  EXPECT_EQ(read_array(dir / "o.npy").values, values);
}

TEST(ArrayIo, UnsupportedDtypes) {
  TempDir dir;
  for (const char* descr : {">f8", "<i4", "<c16", "|u1"}) {
    write_raw_npy(dir / "d.npy", 1, std::string("{'descr': '") + descr + "', 'fortran_order': False, 'shape': (1,), }",
                  std::string(16, '\0'));
    EXPECT_EQ(read_error(dir / "d.npy"), ErrorCode::UnsupportedDtype) << descr;
  }
}

TEST(ArrayIo, FortranOrderRejected) {
  TempDir dir;
  write_raw_npy(dir / "f.npy", 1, "{'descr': '<f8', 'fortran_order': True, 'shape': (2, 2), }",
                bytes_of(std::vector<double>(4, 1.0)));
  EXPECT_EQ(read_error(dir / "f.npy"), ErrorCode::UnsupportedOrder);
}

TEST(ArrayIo, WrongRank) {
  TempDir dir;
  write_array(dir / "r3.npy", {2, 2, 2}, std::vector<double>(8, 0.0));
  try {
    read_kernel(dir / "r3.npy");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongRank);
  }
}

TEST(ArrayIo, BadHeaders) {
  TempDir dir;
  std::ofstream(dir / "junk.npy", std::ios::binary) << "not an npy file at all";
  EXPECT_EQ(read_error(dir / "junk.npy"), ErrorCode::BadHeader);

  write_raw_npy(dir / "short.npy", 1, "{'descr': '<f8', 'fortran_order': False, 'shape': (4,), }",
                bytes_of(std::vector<double>(3, 1.0)));
  EXPECT_EQ(read_error(dir / "short.npy"), ErrorCode::BadHeader);

  write_raw_npy(dir / "v9.npy", 9, "{'descr': '<f8', 'fortran_order': False, 'shape': (1,), }", std::string(8, '\0'));
  EXPECT_EQ(read_error(dir / "v9.npy"), ErrorCode::BadHeader);

  write_raw_npy(dir / "noshape.npy", 1, "{'descr': '<f8', 'fortran_order': False, }", std::string(8, '\0'));
  EXPECT_EQ(read_error(dir / "noshape.npy"), ErrorCode::BadHeader);
}

TEST(ArrayIo, MissingFile) {
  TempDir dir;
  EXPECT_EQ(read_error(dir / "nope.npy"), ErrorCode::IoFailure);
  try {
    write_array(dir / "missing_dir" / "x.npy", {1}, {1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoFailure);
  }
}

TEST(ArrayIo, OverwriteTruncates) {
  TempDir dir;
  write_array(dir / "x.npy", {100}, std::vector<double>(100, 1.0));
  write_array(dir / "x.npy", {2}, {7.0, 8.0});
  const auto arr = read_array(dir / "x.npy");
  EXPECT_EQ(arr.values, (std::vector<double>{7.0, 8.0}));
}

TEST(ExportMode, Parse) {
  EXPECT_EQ(parse_export_mode("values"), ExportMode::Values);
  EXPECT_EQ(parse_export_mode("ratios"), ExportMode::Ratios);
  EXPECT_EQ(parse_export_mode("normalized"), ExportMode::Normalized);
  EXPECT_THROW(parse_export_mode("loud"), Error);
  EXPECT_STREQ(to_string(ExportMode::Ratios), "ratios");
}

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = dist(rng) * std::pow(10.0, static_cast<double>(i % 40) - 20.0);
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.0), "0");
}

TEST(SpectrumCsv, Modes) {
  const auto report = make_report("layer", make_spectrum({1.0, 4.0, 2.0, 0.5}));
  EXPECT_EQ(format_spectrum_csv(report, ExportMode::Values), "index,value\n0,4\n1,2\n2,1\n3,0.5\n");
  EXPECT_EQ(format_spectrum_csv(report, ExportMode::Ratios), "index,ratio\n0,1\n1,0.5\n2,0.25\n3,0.125\n");
  EXPECT_EQ(format_spectrum_csv(report, ExportMode::Normalized),
            "normalized_rank,ratio\n0,1\n0.25,0.5\n0.5,0.25\n0.75,0.125\n");
}

TEST(SpectrumCsv, ZeroSpectrumRatios) {
  const auto report = make_report("zero", make_spectrum({0.0, 0.0}));
  EXPECT_EQ(format_spectrum_csv(report, ExportMode::Ratios), "index,ratio\n0,0\n1,0\n");
}

TEST(SpectrumCsv, FileRoundTripAtFullPrecision) {
  TempDir dir;
  const auto report = make_report("l", make_spectrum({1.0 / 3.0, 2.0 / 7.0, 1e-17}));
  write_spectrum_csv(report, dir / "s.csv", ExportMode::Values);
  std::ifstream in(dir / "s.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "index,value");
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(std::getline(in, line));
    const auto comma = line.find(',');
    EXPECT_EQ(std::stoul(line.substr(0, comma)), i);
    EXPECT_EQ(std::strtod(line.c_str() + comma + 1, nullptr), report.spectrum.values[i]);
  }
  EXPECT_FALSE(std::getline(in, line));
}
