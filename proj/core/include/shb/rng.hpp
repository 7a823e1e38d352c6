#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace shb {

// Counter-based random stream (Philox4x32-10).  A stream is addressed by
// (master_seed, stream_id): the seed forms the Philox key and the stream id
// occupies the top half of the 128-bit counter, so streams never overlap and
// a draw depends only on its index within the stream.  Replica k of an
// experiment owns stream (master_seed, k); results are independent of
// thread scheduling by construction.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // iid uniforms on (0,1]
  double uniform();
  // iid standard normals (Box-Muller on the uniform stream)
  double gaussian();
  void gaussian_fill(std::span<double> out);

  // Raw 64 random bits.
  std::uint64_t bits64();

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t index) const;
  void refill();

  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace shb
