#include "core/rng.hpp"

#include <atomic>

#include <boost/random/normal_distribution.hpp>

namespace pcrlab::rng {
namespace {

std::atomic<bool> g_seed_fault{false};
std::atomic<std::uint64_t> g_fault_counter{0};

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t faulted(std::uint64_t seed) {
  if (!g_seed_fault.load(std::memory_order_relaxed)) return seed;
  return mix(seed ^ g_fault_counter.fetch_add(1, std::memory_order_relaxed));
}

}  // namespace

std::uint64_t derive(std::uint64_t parent, std::uint64_t index) {
  return faulted(mix(mix(parent) ^ mix(index + 0x632be59bd9b4e019ULL)));
}

std::uint64_t derive(std::uint64_t parent, std::uint64_t first, std::uint64_t second) {
  return derive(derive(parent, first), second);
}

std::uint64_t derive(std::uint64_t parent, std::string_view tag) {
  // FNV-1a over the tag, then the integer path
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive(parent, h);
}

Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

void fill_normal(Eigen::Ref<Eigen::MatrixXd> out, Engine& engine) {
  boost::random::normal_distribution<double> normal;  // ziggurat
  // column-major fill keeps the draw order independent of the Ref's stride
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal(engine);
}

Eigen::VectorXd normal_vector(Eigen::Index size, Engine& engine) {
  Eigen::VectorXd v(size);
  boost::random::normal_distribution<double> normal;  // ziggurat
  for (Eigen::Index i = 0; i < size; ++i) v[i] = normal(engine);
  return v;
}

void set_seed_fault(bool enabled) { g_seed_fault.store(enabled); }
bool seed_fault_enabled() { return g_seed_fault.load(); }

}  // namespace pcrlab::rng
