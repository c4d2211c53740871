#pragma once

// Seeded sampling. Gaussians come from std::mt19937_64 through an explicit
// Box-Muller transform rather than std::normal_distribution, whose output
// is implementation-defined; the algorithm is named in every report.

#include <kgf/linalg.hpp>

#include <cstdint>
#include <random>
#include <string_view>

namespace kgf {

inline constexpr std::string_view kGeneratorName = "mt19937_64+box-muller/v1";

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);
/// Sub-seed for one trial of one check; independent of scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view theorem_id, std::uint64_t trial);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  double normal();
  /// (g1 + i g2) / sqrt(2): unit variance complex Gaussian.
  cplx complex_normal();
  Mat gaussian(Eigen::Index rows, Eigen::Index cols, double scale = 1.0);
  /// Haar-like unitary from the QR factorization of a Gaussian matrix,
  /// with the phases of R's diagonal moved into Q.
  Mat unitary(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kgf
