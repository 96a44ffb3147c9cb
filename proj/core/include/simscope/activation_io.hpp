#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "simscope/matrix.hpp"

namespace simscope {

// SSAD activation dump, all integers little-endian:
//   u32  magic   0x53534144
//   u16  version 1
//   u16  name length L
//   L    bytes   UTF-8 layer name
//   u8   dtype   0 = float32, 1 = float64
//   u64  n
//   u64  p
//   n*p  values, row-major, little-endian IEEE-754
inline constexpr std::uint32_t kSsadMagic = 0x53534144;
inline constexpr std::uint16_t kSsadVersion = 1;

enum class DumpDtype : std::uint8_t { kFloat32 = 0, kFloat64 = 1 };

void write_activation(std::ostream& out, const ActivationMatrix& m,
                      DumpDtype dtype = DumpDtype::kFloat64);

/// `source` names the stream in format errors (usually the file path).
ActivationMatrix read_activation(std::istream& in, const std::string& source);

/// Writes to a temporary sibling and renames it into place.
void save_activation(const std::filesystem::path& path, const ActivationMatrix& m,
                     DumpDtype dtype = DumpDtype::kFloat64);
ActivationMatrix load_activation(const std::filesystem::path& path);

/// Atomically replaces `path` with `contents`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace simscope
