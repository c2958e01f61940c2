#include "hicu/array_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace hicu::array_file {

namespace {

constexpr char magic[4] = {'H', 'I', 'C', 'U'};
constexpr std::size_t fixed_header = 8;

void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_u64(std::uint8_t const *p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b)
    v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

void put_f64(std::vector<std::uint8_t> &out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::uint8_t const *p) { return std::bit_cast<double>(get_u64(p)); }

std::vector<std::uint8_t> header(DType dt, Dims const &dims, std::size_t payload) {
  if (dims.size() > 255)
    throw FormatError("array file supports at most 255 dimensions");
  std::vector<std::uint8_t> out(magic, magic + 4);
  out.push_back(version);
  out.push_back(static_cast<std::uint8_t>(dt));
  out.push_back(static_cast<std::uint8_t>(dims.size()));
  out.push_back(0);
  for (auto d : dims)
    put_u64(out, static_cast<std::uint64_t>(d));
  out.reserve(out.size() + payload);
  return out;
}

void write_bytes(std::filesystem::path const &path, std::vector<std::uint8_t> const &bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<char const *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f)
    throw IoError("write failed: " + path.string());
}

} // namespace

std::vector<std::uint8_t> encode(CTensor const &t) {
  auto out = header(DType::Complex, t.dims(), static_cast<std::size_t>(t.size()) * 16);
  for (auto const &v : t.span()) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  return out;
}

std::vector<std::uint8_t> encode(RTensor const &t) {
  auto out = header(DType::Real, t.dims(), static_cast<std::size_t>(t.size()) * 8);
  for (auto v : t.span())
    put_f64(out, v);
  return out;
}

std::vector<std::uint8_t> encode(BinaryMask const &t) {
  auto out = header(DType::Mask, t.dims(), static_cast<std::size_t>(t.size()));
  out.insert(out.end(), t.span().begin(), t.span().end());
  return out;
}

AnyArray decode(std::span<std::uint8_t const> bytes) {
  if (bytes.size() < fixed_header)
    throw FormatError("truncated HICU array header");
  if (std::memcmp(bytes.data(), magic, 4) != 0)
    throw FormatError("not a HICU array file (bad magic)");
  if (bytes[4] != version)
    throw FormatError("unsupported HICU array file version " + std::to_string(bytes[4]));
  auto const dt = bytes[5];
  std::size_t const ndim = bytes[6];
  if (dt > 2)
    throw FormatError("unknown HICU array dtype " + std::to_string(dt));
  if (ndim == 0)
    throw FormatError("HICU array file has zero dimensions");
  if (bytes.size() < fixed_header + 8 * ndim)
    throw FormatError("truncated HICU array header");
  Dims dims(ndim);
  std::uint64_t count = 1;
  for (std::size_t d = 0; d < ndim; ++d) {
    auto const v = get_u64(bytes.data() + fixed_header + 8 * d);
    if (v == 0 || v > (std::uint64_t{1} << 40))
      throw FormatError("invalid extent in HICU array header");
    dims[d] = static_cast<Index>(v);
    count *= v;
  }
  std::size_t const elem = dt == 0 ? 16 : dt == 1 ? 8 : 1;
  auto const *p = bytes.data() + fixed_header + 8 * ndim;
  std::size_t const payload = bytes.size() - fixed_header - 8 * ndim;
  if (payload != count * elem)
    throw FormatError("HICU array payload is " + std::to_string(payload) + " bytes, expected " +
                      std::to_string(count * elem));
  switch (static_cast<DType>(dt)) {
  case DType::Complex: {
    CTensor t(dims);
    for (Index j = 0; j < t.size(); ++j)
      t[j] = cplx{get_f64(p + 16 * j), get_f64(p + 16 * j + 8)};
    return t;
  }
  case DType::Real: {
    RTensor t(dims);
    for (Index j = 0; j < t.size(); ++j)
      t[j] = get_f64(p + 8 * j);
    return t;
  }
  case DType::Mask: {
    BinaryMask t(dims);
    std::memcpy(t.data(), p, payload);
    for (auto b : t.span())
      if (b > 1)
        throw FormatError("HICU mask payload holds a value other than 0 or 1");
    return t;
  }
  }
  throw FormatError("unreachable dtype");
}

void write(std::filesystem::path const &path, CTensor const &t) { write_bytes(path, encode(t)); }
void write(std::filesystem::path const &path, RTensor const &t) { write_bytes(path, encode(t)); }
void write(std::filesystem::path const &path, BinaryMask const &t) { write_bytes(path, encode(t)); }

AnyArray read(std::filesystem::path const &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode(bytes);
}

namespace {
template <typename T> T read_as(std::filesystem::path const &path, char const *what) {
  auto any = read(path);
  if (auto *t = std::get_if<T>(&any))
    return std::move(*t);
  throw FormatError(path.string() + ": expected a " + what + " array");
}
} // namespace

CTensor read_complex(std::filesystem::path const &path) { return read_as<CTensor>(path, "complex"); }
RTensor read_real(std::filesystem::path const &path) { return read_as<RTensor>(path, "real"); }
BinaryMask read_mask(std::filesystem::path const &path) { return read_as<BinaryMask>(path, "mask"); }

} // namespace hicu::array_file
