#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "acplab/rng.hpp"

namespace acplab::genome {

// A genome is a flat sequence of byte sites; all substrates decode their
// parameters from it and share one set of mutation operators.
using Genome = std::vector<std::uint8_t>;

struct MutationConfig {
  double point_rate = 0.005;
  double indel_rate_per_site = 0.0002;
  int chunk_min = 256;
  int chunk_max = 512;
  int min_len = 5000;
  int max_len = 20000;

  void validate() const;

  bool operator==(const MutationConfig&) const = default;
};

Genome random_genome(int n, const MutationConfig& cfg, Rng& rng);

// Applies point mutations, then at most one deletion, then at most one
// duplication.  Each indel fires with probability
// min(1, indel_rate_per_site * current_length) and moves a contiguous
// chunk of uniform random length in [chunk_min, chunk_max]; an indel that
// would push the length outside [min_len, max_len] is skipped outright.
Genome mutate(const Genome& g, const MutationConfig& cfg, Rng& rng);

// Text form: comma-separated decimal bytes, one genome per line.
std::string to_text(const Genome& g);
Genome from_text(const std::string& line);

// Binary form: little-endian u64 site count followed by the raw bytes.
void write_binary(std::ostream& os, const Genome& g);
Genome read_binary(std::istream& is);

}  // namespace acplab::genome
