#include "croc/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace croc {

namespace {

constexpr char kFeatureMagic[8] = {'C', 'R', 'O', 'C', 'F', 'E', 'A', 'T'};
constexpr char kMaskMagic[8] = {'C', 'R', 'O', 'C', 'M', 'A', 'S', 'K'};
constexpr std::uint64_t kMaxPayloadBytes = 1ull << 40;

std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return bytes;
}

void write_all_atomic(const std::filesystem::path& path,
                      const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::uint32_t read_u32le(const char* p) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24;
}

void append_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void append_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

// Validates magic/version/size and returns (rows, cols, payload pointer).
struct Header {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  const char* payload = nullptr;
};

Header parse_header(const std::vector<char>& bytes, const char* magic,
                    std::uint32_t version, std::size_t elem_size,
                    const std::filesystem::path& path) {
  if (bytes.size() < 20) {
    throw TruncationError(path.string() + ": header needs 20 bytes, file has " +
                          std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), magic, 8) != 0) {
    throw BadMagicError(path.string() + ": bad magic at offset 0, expected \"" +
                        std::string(magic, 8) + "\"");
  }
  const std::uint32_t file_version = read_u32le(bytes.data() + 8);
  if (file_version != version) {
    throw VersionError(path.string() + ": unsupported version " +
                       std::to_string(file_version) + " at offset 8, expected " +
                       std::to_string(version));
  }
  Header h;
  h.rows = read_u32le(bytes.data() + 12);
  h.cols = read_u32le(bytes.data() + 16);
  if (h.rows == 0 || h.cols == 0) {
    throw IoError(path.string() + ": header declares an empty matrix");
  }
  // Cap each dimension so the size product cannot wrap 64 bits.
  if (h.rows > (1u << 30) || h.cols > (1u << 30)) {
    throw IoError(path.string() + ": implausible header dimensions");
  }
  const std::uint64_t expected =
      static_cast<std::uint64_t>(h.rows) * h.cols * elem_size;
  if (expected > kMaxPayloadBytes) {
    throw IoError(path.string() + ": implausible header dimensions");
  }
  const std::uint64_t actual = bytes.size() - 20;
  if (actual != expected) {
    throw TruncationError(path.string() + ": payload at offset 20 must be " +
                          std::to_string(expected) + " bytes, found " +
                          std::to_string(actual));
  }
  h.payload = bytes.data() + 20;
  return h;
}

}  // namespace

FeatureMatrix read_features(const std::filesystem::path& path) {
  const std::vector<char> bytes = read_all(path);
  const Header h =
      parse_header(bytes, kFeatureMagic, kFeatureFormatVersion, 4, path);
  Matrix m(h.rows, h.cols);
  const char* p = h.payload;
  for (std::uint32_t i = 0; i < h.rows; ++i) {
    for (std::uint32_t j = 0; j < h.cols; ++j) {
      m(i, j) = static_cast<double>(std::bit_cast<float>(read_u32le(p)));
      p += 4;
    }
  }
  return FeatureMatrix(std::move(m));
}

void write_features(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ShapeError("write_features requires a non-empty matrix");
  }
  std::string out;
  out.reserve(20 + static_cast<std::size_t>(m.size()) * 4);
  out.append(kFeatureMagic, 8);
  append_u32le(out, kFeatureFormatVersion);
  append_u32le(out, static_cast<std::uint32_t>(m.rows()));
  append_u32le(out, static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      append_u32le(out, std::bit_cast<std::uint32_t>(
                            static_cast<float>(m(i, j))));
    }
  }
  write_all_atomic(path, out);
}

Vector read_vector(const std::filesystem::path& path) {
  const FeatureMatrix m = read_features(path);
  if (m.cols() != 1) {
    throw ShapeError(path.string() + ": expected a single-column file, got " +
                     std::to_string(m.cols()) + " columns");
  }
  return m.values().col(0);
}

void write_vector(const std::filesystem::path& path, const Vector& v) {
  write_features(path, v);
}

LabelMask read_mask(const std::filesystem::path& path) {
  const std::vector<char> bytes = read_all(path);
  const Header h = parse_header(bytes, kMaskMagic, kMaskFormatVersion, 2, path);
  std::vector<int> labels(static_cast<std::size_t>(h.rows) * h.cols);
  const char* p = h.payload;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<int>(
        static_cast<std::uint16_t>(static_cast<unsigned char>(p[0])) |
        static_cast<std::uint16_t>(static_cast<unsigned char>(p[1])) << 8);
    p += 2;
  }
  return LabelMask(static_cast<int>(h.rows), static_cast<int>(h.cols),
                   std::move(labels));
}

void write_mask(const std::filesystem::path& path, const LabelMask& mask) {
  std::string out;
  out.reserve(20 + mask.labels.size() * 2);
  out.append(kMaskMagic, 8);
  append_u32le(out, kMaskFormatVersion);
  append_u32le(out, static_cast<std::uint32_t>(mask.height));
  append_u32le(out, static_cast<std::uint32_t>(mask.width));
  for (const int id : mask.labels) {
    if (id < 0 || id > 0xffff) {
      throw InputError("mask id " + std::to_string(id) +
                       " does not fit a 16-bit label");
    }
    append_u16le(out, static_cast<std::uint16_t>(id));
  }
  write_all_atomic(path, out);
}

CropGeometry read_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  CropGeometry g;
  int hflip = 0;
  std::istringstream fields(buf.str());
  if (!(fields >> g.x0 >> g.y0 >> g.width >> g.height >> g.grid_n >> hflip)) {
    throw InputError(path.string() +
                     ": expected 6 fields: x0 y0 width height grid_n hflip");
  }
  std::string extra;
  if (fields >> extra) {
    throw InputError(path.string() + ": unexpected trailing field \"" + extra +
                     "\"");
  }
  if (hflip != 0 && hflip != 1) {
    throw InputError(path.string() + ": hflip must be 0 or 1");
  }
  g.hflip = hflip == 1;
  g.validate();
  return g;
}

void write_geometry(const std::filesystem::path& path,
                    const CropGeometry& geom) {
  std::ostringstream out;
  out.precision(17);
  out << geom.x0 << " " << geom.y0 << " " << geom.width << " " << geom.height
      << " " << geom.grid_n << " " << (geom.hflip ? 1 : 0) << "\n";
  write_all_atomic(path, out.str());
}

}  // namespace croc
