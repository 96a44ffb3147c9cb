#include "simscope/activation_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <sstream>
#include <vector>

#include "simscope/error.hpp"

namespace simscope {
namespace {

template <typename UInt>
void put_le(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in, const std::string& source, const char* field) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) {
    throw Error(ErrorKind::kFormat,
                source + ": truncated SSAD record while reading " + field);
  }
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(bytes[i]) << (8 * i);
  }
  return value;
}

}  // namespace

void write_activation(std::ostream& out, const ActivationMatrix& m,
                      DumpDtype dtype) {
  const std::string& name = m.layer_name();
  if (name.size() > 0xFFFF) {
    throw Error(ErrorKind::kInvalidInput, "layer name too long for SSAD header");
  }
  put_le<std::uint32_t>(out, kSsadMagic);
  put_le<std::uint16_t>(out, kSsadVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(dtype));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.n()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.p()));
  const Matrix& data = m.data();
  for (Eigen::Index r = 0; r < m.n(); ++r) {
    for (Eigen::Index c = 0; c < m.p(); ++c) {
      if (dtype == DumpDtype::kFloat32) {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(
                                       static_cast<float>(data(r, c))));
      } else {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(data(r, c)));
      }
    }
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing SSAD record");
}

ActivationMatrix read_activation(std::istream& in, const std::string& source) {
  const auto magic = get_le<std::uint32_t>(in, source, "magic");
  if (magic != kSsadMagic) {
    throw Error(ErrorKind::kFormat, source + ": bad magic bytes, not an SSAD file");
  }
  const auto version = get_le<std::uint16_t>(in, source, "version");
  if (version != kSsadVersion) {
    throw Error(ErrorKind::kFormat,
                source + ": unsupported SSAD version " + std::to_string(version));
  }
  const auto name_len = get_le<std::uint16_t>(in, source, "name length");
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  if (!in) throw Error(ErrorKind::kFormat, source + ": truncated layer name");
  const auto dtype = get_le<std::uint8_t>(in, source, "dtype");
  if (dtype > 1) {
    throw Error(ErrorKind::kFormat,
                source + ": unknown dtype " + std::to_string(dtype));
  }
  const auto n = get_le<std::uint64_t>(in, source, "n");
  const auto p = get_le<std::uint64_t>(in, source, "p");
  constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 34;
  if (n == 0 || p == 0 || n > kMaxEntries / p) {
    throw Error(ErrorKind::kFormat, source + ": implausible shape " +
                                        std::to_string(n) + "x" + std::to_string(p));
  }
  Matrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (dtype == 0) {
        data(r, c) = std::bit_cast<float>(get_le<std::uint32_t>(in, source, "values"));
      } else {
        data(r, c) = std::bit_cast<double>(get_le<std::uint64_t>(in, source, "values"));
      }
    }
  }
  try {
    return ActivationMatrix(std::move(data), std::move(name));
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, source + ": " + e.what());
  }
}

void save_activation(const std::filesystem::path& path, const ActivationMatrix& m,
                     DumpDtype dtype) {
  std::ostringstream buffer(std::ios::binary);
  write_activation(buffer, m, dtype);
  write_file_atomic(path, buffer.str());
}

ActivationMatrix load_activation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return read_activation(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                "cannot rename " + tmp.string() + " to " + path.string() + ": " +
                    ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace simscope
