#pragma once

// Weight checkpoint file, all fields little-endian:
//   8 bytes  magic "HJQNET\0\0"
//   u32      format version (1)
//   i32 x3   input channels, height, width
//   u32      layer count, then per layer i32 x7:
//            kind, out_channels, kernel_h, kernel_w, stride_h, stride_w, units
//   u64      weight count
//   f64 x n  weights in layer order (weights then biases per layer)

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hidjam/dqn/network.hpp"

namespace hidjam::dqn {

inline constexpr std::array<char, 8> kCheckpointMagic{'H', 'J', 'Q', 'N', 'E', 'T', '\0', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename U>
void put_le(std::ostream& os, U v) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw std::runtime_error("checkpoint: truncated file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

inline void put_i32(std::ostream& os, int v) { put_le<std::uint32_t>(os, static_cast<std::uint32_t>(v)); }
inline int get_i32(std::istream& is) { return static_cast<int>(get_le<std::uint32_t>(is)); }

}  // namespace detail

template <typename Scalar>
void write_checkpoint(std::ostream& os, const QNetwork<Scalar>& net) {
  os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put_le<std::uint32_t>(os, kCheckpointVersion);
  const Architecture& arch = net.architecture();
  detail::put_i32(os, arch.input.channels);
  detail::put_i32(os, arch.input.height);
  detail::put_i32(os, arch.input.width);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(arch.layers.size()));
  for (const auto& l : arch.layers) {
    for (int v : {static_cast<int>(l.kind), l.out_channels, l.kernel_h, l.kernel_w, l.stride_h, l.stride_w, l.units})
      detail::put_i32(os, v);
  }
  detail::put_le<std::uint64_t>(os, net.num_params());
  for (Eigen::Index i = 0; i < net.params().size(); ++i)
    detail::put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(static_cast<double>(net.params()[i])));
}

template <typename Scalar>
QNetwork<Scalar> read_checkpoint(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
    throw std::runtime_error("checkpoint: bad magic");
  if (const auto version = detail::get_le<std::uint32_t>(is); version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  Architecture arch;
  arch.input.channels = detail::get_i32(is);
  arch.input.height = detail::get_i32(is);
  arch.input.width = detail::get_i32(is);
  const auto layers = detail::get_le<std::uint32_t>(is);
  if (layers > 1024) throw std::runtime_error("checkpoint: implausible layer count");
  for (std::uint32_t i = 0; i < layers; ++i) {
    LayerSpec l;
    l.kind = static_cast<LayerKind>(detail::get_i32(is));
    l.out_channels = detail::get_i32(is);
    l.kernel_h = detail::get_i32(is);
    l.kernel_w = detail::get_i32(is);
    l.stride_h = detail::get_i32(is);
    l.stride_w = detail::get_i32(is);
    l.units = detail::get_i32(is);
    arch.layers.push_back(l);
  }
  QNetwork<Scalar> net(arch);
  const auto count = detail::get_le<std::uint64_t>(is);
  if (count != net.num_params())
    throw std::runtime_error("checkpoint: weight count " + std::to_string(count) + " does not match architecture (" +
                             std::to_string(net.num_params()) + ")");
  for (std::uint64_t i = 0; i < count; ++i)
    net.params()[static_cast<Eigen::Index>(i)] =
        static_cast<Scalar>(std::bit_cast<double>(detail::get_le<std::uint64_t>(is)));
  return net;
}

template <typename Scalar>
void save_checkpoint(const std::string& path, const QNetwork<Scalar>& net) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  write_checkpoint(os, net);
  if (!os) throw std::runtime_error("checkpoint: write to " + path + " failed");
}

template <typename Scalar>
QNetwork<Scalar> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  return read_checkpoint<Scalar>(is);
}

}  // namespace hidjam::dqn
