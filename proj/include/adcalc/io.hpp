#pragma once

// ADKF kernel-family files: "ADKF", version, fiber_dim, nx, nu, nt (u32), then
// the x, U and t grids and the [t][x][U] samples as little-endian doubles,
// complex values interleaved (re, im).

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "adcalc/core.hpp"
#include "adcalc/family.hpp"

namespace adcalc {

inline constexpr std::uint32_t kAdkfVersion = 1;
inline constexpr char kAdkfMagic[4] = {'A', 'D', 'K', 'F'};
inline constexpr std::size_t kAdkfHeaderBytes = 4 + 5 * 4;

struct LoadedField {
  int fiber_dim = 1;
  SampledField field;
};

namespace detail {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::string& out, T v) {
  v = to_little(v);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return to_little(v);
}

}  // namespace detail

inline std::string encode_adkf(const SampledField& f, int fiber_dim = 1) {
  f.validate();
  std::string out;
  out.reserve(kAdkfHeaderBytes + 8 * (f.x.size() + f.u.size() + f.t.size()) + 16 * f.values.size());
  out.append(kAdkfMagic, 4);
  detail::put<std::uint32_t>(out, kAdkfVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(fiber_dim));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(f.x.size()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(f.u.size()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(f.t.size()));
  for (const auto* g : {&f.x, &f.u, &f.t})
    for (double v : *g) detail::put(out, v);
  for (const auto& c : f.values) {
    detail::put(out, c.real());
    detail::put(out, c.imag());
  }
  return out;
}

inline LoadedField decode_adkf(const std::string& in) {
  require(in.size() >= kAdkfHeaderBytes, ErrorKind::format, "ADKF file truncated: header needs 24 bytes, got " +
                                                                std::to_string(in.size()));
  require(std::memcmp(in.data(), kAdkfMagic, 4) == 0, ErrorKind::format, "not an ADKF file (bad magic bytes)");
  std::size_t pos = 4;
  const auto version = detail::get<std::uint32_t>(in, pos);
  require(version == kAdkfVersion, ErrorKind::format,
          "unsupported ADKF version " + std::to_string(version) + " (expected " + std::to_string(kAdkfVersion) + ")");
  LoadedField r;
  r.fiber_dim = static_cast<int>(detail::get<std::uint32_t>(in, pos));
  const std::uint64_t nx = detail::get<std::uint32_t>(in, pos);
  const std::uint64_t nu = detail::get<std::uint32_t>(in, pos);
  const std::uint64_t nt = detail::get<std::uint32_t>(in, pos);
  require(r.fiber_dim >= 1, ErrorKind::format, "ADKF fiber_dim must be >= 1");
  const std::uint64_t expect = kAdkfHeaderBytes + 8 * (nx + nu + nt) + 16 * nx * nu * nt;
  require(in.size() == expect, ErrorKind::format,
          "ADKF payload length " + std::to_string(in.size()) + " does not match header (" + std::to_string(expect) +
              " bytes)");
  auto grid = [&](std::uint64_t n) {
    std::vector<double> g(n);
    for (auto& v : g) v = detail::get<double>(in, pos);
    return g;
  };
  r.field.x = grid(nx);
  r.field.u = grid(nu);
  r.field.t = grid(nt);
  r.field.values.resize(nx * nu * nt);
  for (auto& c : r.field.values) {
    const double re = detail::get<double>(in, pos);
    const double im = detail::get<double>(in, pos);
    c = Complex(re, im);
  }
  r.field.validate();
  return r;
}

inline void save_field(const std::filesystem::path& path, const SampledField& f, int fiber_dim = 1) {
  const auto bytes = encode_adkf(f, fiber_dim);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(os), ErrorKind::io, "write failed: " + path.string());
}

inline LoadedField load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_adkf(bytes);
}

// Sampled families only; analytic ones go through normal_coords first.
inline void save_family(const std::filesystem::path& path, const KernelFamily& f) {
  require(!f.is_analytic(), ErrorKind::format, "save_family needs a sampled family; sample it with normal_coords");
  save_field(path, f.sampled(), f.p());
}

// Support radii are taken from the grid extents.
inline KernelFamily load_family(const std::filesystem::path& path, std::optional<ClassTag> claimed = std::nullopt) {
  auto r = load_field(path);
  GroupoidSpec g;
  g.fiber_dim = r.fiber_dim;
  const double sx = std::max(std::abs(r.field.x.front()), std::abs(r.field.x.back()));
  const double su = std::max(std::abs(r.field.u.front()), std::abs(r.field.u.back()));
  g.half_width = std::max(g.half_width, sx);
  return KernelFamily(g, std::move(r.field), sx, su, claimed);
}

}  // namespace adcalc
