#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "acplab/brain.hpp"
#include "acplab/genome.hpp"

namespace acplab::markov {

inline constexpr std::uint8_t kCodonFirst = 42;
inline constexpr std::uint8_t kCodonSecond = 213;
inline constexpr int kNumNodes = 16;

// Deterministic logic gate over the 16-node state vector.  table has
// 2^n_in entries; entry r packs the n_out output bits (bit k = output k)
// for input pattern r, where input bit k of the pattern comes from node
// in_addrs[k].
struct Gate {
  int n_in = 1;
  int n_out = 1;
  std::array<std::uint8_t, 4> in_addrs{};
  std::array<std::uint8_t, 4> out_addrs{};
  std::vector<std::uint8_t> table;
};

// Scans the genome for start codons (42, 213) and reads one gate per hit,
// wrapping at the genome end: one byte each for n_in and n_out
// (1 + byte mod 4), four input-address and four output-address bytes
// (mod 16, first n_in / n_out used), then 2^n_in × n_out table bits taken
// from one byte each (byte mod 2).  Gate bodies may overlap.  Total: any
// byte sequence decodes to a valid, possibly empty, gate list.
std::vector<Gate> decode(const genome::Genome& g);

// One gate per line: arities, addresses, then table bits row by row.
std::string format_gates(const std::vector<Gate>& gates);

// State layout: nodes 0-3 sensors, 4-5 motors, 6-15 hidden.  Each update
// writes the sensor bits, evaluates every gate against the time-t state,
// and ORs all gate outputs into a zeroed time-t+1 state; writes aimed at
// sensor nodes are discarded.
class MarkovBrain final : public Brain {
 public:
  explicit MarkovBrain(const genome::Genome& g) : gates_(decode(g)) {}
  explicit MarkovBrain(std::vector<Gate> gates) : gates_(std::move(gates)) {}

  void reset() override { state_ = 0; }
  std::uint8_t step(std::uint8_t sensors) override;
  std::uint16_t hidden_bits() const override {
    return static_cast<std::uint16_t>((state_ >> 6) & 0x3FF);
  }

  const std::vector<Gate>& gates() const { return gates_; }
  std::uint16_t state() const { return state_; }

 private:
  std::vector<Gate> gates_;
  std::uint16_t state_ = 0;
};

}  // namespace acplab::markov
