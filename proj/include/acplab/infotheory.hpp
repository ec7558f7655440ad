#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <utility>
#include <vector>

#include "acplab/world.hpp"

namespace acplab::info {

// One record per world update: concept bits W (ws, wl, wd), sensor bits S,
// binarized brain bits B.  A full agent trace pools all 64 trials.
struct TraceRow {
  std::uint8_t w = 0;
  std::uint8_t s = 0;
  std::uint16_t b = 0;
};
using StateTrace = std::vector<TraceRow>;

StateTrace trace_from_records(
    const std::vector<std::vector<world::TrialRecordRow>>& trials);

// Discrete joint distribution over packed integer symbols.  Probabilities
// must be non-negative and sum to 1 within 1e-12; entropy() checks this.
class JointTable {
 public:
  JointTable() = default;
  explicit JointTable(std::vector<std::pair<std::uint32_t, double>> cells)
      : cells_(std::move(cells)) {}

  static JointTable from_counts(
      const std::unordered_map<std::uint32_t, std::uint64_t>& counts);

  const std::vector<std::pair<std::uint32_t, double>>& cells() const {
    return cells_;
  }

 private:
  std::vector<std::pair<std::uint32_t, double>> cells_;
};

// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(const JointTable& t);

// R = H(W:B|S) = H(W,S) + H(B,S) - H(S) - H(W,B,S), the information the
// brain carries about the world beyond what the sensors already supply.
double representation_R(const StateTrace& trace);

// H(W:B) = H(W) + H(B) - H(W,B).
double shared_entropy_wb(const StateTrace& trace);

// I(W:B:S), three-way co-information; may be negative.
double coherent_information(const StateTrace& trace);

// Rows: concepts in the order size, location, direction; columns: the 10
// analyzed nodes.  M(c, i) = H(W_c : B_i | S).
using RepMatrix = Eigen::Matrix<double, 3, 10>;

enum ConceptRow { kSize = 0, kLocation = 1, kDirection = 2 };

RepMatrix representation_matrix(const StateTrace& trace);

// Sum over nodes of pairwise minima across concepts: high when single
// nodes carry several concepts at once.
double node_smearedness(const RepMatrix& m);

// Sum over concepts of pairwise minima across nodes: high when single
// concepts are spread over several nodes.
double concept_smearedness(const RepMatrix& m);

// 3x10 CSV with concept-name row labels.
void write_matrix_csv(std::ostream& os, const RepMatrix& m);
RepMatrix read_matrix_csv(std::istream& is);

}  // namespace acplab::info
