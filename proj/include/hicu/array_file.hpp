#pragma once

#include <filesystem>
#include <variant>

#include "hicu/tensor.hpp"

namespace hicu {

/// Portable array container:
///   "HICU" | version u8 = 1 | dtype u8 | ndim u8 | reserved u8 = 0 | dims: ndim x u64 LE |
///   payload, row-major, little-endian.
/// dtype 0 = complex double (interleaved re, im), 1 = real double, 2 = u8 mask.
namespace array_file {

inline constexpr std::uint8_t version = 1;
enum class DType : std::uint8_t { Complex = 0, Real = 1, Mask = 2 };

using AnyArray = std::variant<CTensor, RTensor, BinaryMask>;

std::vector<std::uint8_t> encode(CTensor const &t);
std::vector<std::uint8_t> encode(RTensor const &t);
std::vector<std::uint8_t> encode(BinaryMask const &t);
AnyArray decode(std::span<std::uint8_t const> bytes);

void write(std::filesystem::path const &path, CTensor const &t);
void write(std::filesystem::path const &path, RTensor const &t);
void write(std::filesystem::path const &path, BinaryMask const &t);

AnyArray read(std::filesystem::path const &path);
CTensor read_complex(std::filesystem::path const &path);
RTensor read_real(std::filesystem::path const &path);
BinaryMask read_mask(std::filesystem::path const &path);

} // namespace array_file
} // namespace hicu
