#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace pcrlab::rng {

using Engine = std::mt19937_64;

// Counter-style seed derivation: a child seed depends only on the parent
// seed and the integer path, never on call order or thread scheduling.
std::uint64_t derive(std::uint64_t parent, std::uint64_t index);
std::uint64_t derive(std::uint64_t parent, std::uint64_t first, std::uint64_t second);
std::uint64_t derive(std::uint64_t parent, std::string_view tag);

Engine make_engine(std::uint64_t seed);

// Uniform on [0,1) from the top 53 bits; independent of library distribution code.
inline double uniform01(Engine& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

void fill_normal(Eigen::Ref<Eigen::MatrixXd> out, Engine& engine);
Eigen::VectorXd normal_vector(Eigen::Index size, Engine& engine);

// Fault injection for the selftest negative control: while enabled, derive()
// mixes in a process-wide counter, so repeated derivations disagree.
void set_seed_fault(bool enabled);
bool seed_fault_enabled();

}  // namespace pcrlab::rng
