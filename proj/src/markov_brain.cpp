#include "acplab/markov_brain.hpp"

namespace acplab::markov {

std::vector<Gate> decode(const genome::Genome& g) {
  std::vector<Gate> gates;
  const std::size_t n = g.size();
  if (n < 2) return gates;
  auto at = [&](std::size_t i) { return g[i % n]; };
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (g[pos] != kCodonFirst || at(pos + 1) != kCodonSecond) continue;
    std::size_t r = pos + 2;
    Gate gate;
    gate.n_in = 1 + (at(r++) % 4);
    gate.n_out = 1 + (at(r++) % 4);
    for (int k = 0; k < 4; ++k) gate.in_addrs[k] = at(r++) % kNumNodes;
    for (int k = 0; k < 4; ++k) gate.out_addrs[k] = at(r++) % kNumNodes;
    const int rows = 1 << gate.n_in;
    gate.table.resize(static_cast<std::size_t>(rows));
    for (int row = 0; row < rows; ++row) {
      std::uint8_t packed = 0;
      for (int k = 0; k < gate.n_out; ++k)
        packed |= static_cast<std::uint8_t>((at(r++) % 2) << k);
      gate.table[static_cast<std::size_t>(row)] = packed;
    }
    gates.push_back(std::move(gate));
  }
  return gates;
}

std::string format_gates(const std::vector<Gate>& gates) {
  std::string out;
  for (const Gate& g : gates) {
    out += "in=" + std::to_string(g.n_in) + " out=" + std::to_string(g.n_out);
    out += " from=[";
    for (int k = 0; k < g.n_in; ++k) {
      if (k) out += ',';
      out += std::to_string(static_cast<int>(g.in_addrs[k]));
    }
    out += "] to=[";
    for (int k = 0; k < g.n_out; ++k) {
      if (k) out += ',';
      out += std::to_string(static_cast<int>(g.out_addrs[k]));
    }
    out += "] table=";
    for (std::size_t row = 0; row < g.table.size(); ++row) {
      if (row) out += '|';
      for (int k = 0; k < g.n_out; ++k)
        out += static_cast<char>('0' + ((g.table[row] >> k) & 1));
    }
    out += '\n';
  }
  return out;
}

std::uint8_t MarkovBrain::step(std::uint8_t sensors) {
  std::uint16_t now = static_cast<std::uint16_t>((state_ & ~0xFu) |
                                                 (sensors & 0xFu));
  std::uint16_t next = 0;
  for (const Gate& g : gates_) {
    unsigned idx = 0;
    for (int k = 0; k < g.n_in; ++k)
      idx |= static_cast<unsigned>((now >> g.in_addrs[k]) & 1u) << k;
    std::uint8_t packed = g.table[idx];
    for (int k = 0; k < g.n_out; ++k)
      next |= static_cast<std::uint16_t>(((packed >> k) & 1u)
                                         << g.out_addrs[k]);
  }
  next &= static_cast<std::uint16_t>(~0xFu);
  state_ = next;
  return static_cast<std::uint8_t>((state_ >> 4) & 3u);
}

}  // namespace acplab::markov
