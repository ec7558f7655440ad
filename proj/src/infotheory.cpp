#include "acplab/infotheory.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "acplab/csv.hpp"

namespace acplab::info {

StateTrace trace_from_records(
    const std::vector<std::vector<world::TrialRecordRow>>& trials) {
  StateTrace trace;
  std::size_t total = 0;
  for (const auto& t : trials) total += t.size();
  trace.reserve(total);
  for (const auto& t : trials)
    for (const auto& r : t)
      trace.push_back(TraceRow{r.concepts, r.sensors, r.hidden_bits});
  return trace;
}

JointTable JointTable::from_counts(
    const std::unordered_map<std::uint32_t, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [sym, c] : counts) total += c;
  if (total == 0) throw std::invalid_argument("empty count table");
  std::vector<std::pair<std::uint32_t, double>> cells;
  cells.reserve(counts.size());
  for (const auto& [sym, c] : counts)
    cells.emplace_back(sym, static_cast<double>(c) / static_cast<double>(total));
  return JointTable(std::move(cells));
}

double entropy(const JointTable& t) {
  double sum = 0.0;
  for (const auto& [sym, p] : t.cells()) {
    if (p < 0.0) throw std::invalid_argument("negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities do not sum to 1");
  double h = 0.0;
  for (const auto& [sym, p] : t.cells())
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

namespace {

using Counts = std::unordered_map<std::uint32_t, std::uint64_t>;

// Packs the full (w, s, b) triple; projections mask symbol parts out, so
// every marginal is a re-count of the same keys.
std::uint32_t pack(std::uint8_t w, std::uint8_t s, std::uint16_t b) {
  return static_cast<std::uint32_t>(w & 7u) |
         (static_cast<std::uint32_t>(s & 15u) << 3) |
         (static_cast<std::uint32_t>(b & 0x3FFu) << 7);
}

Counts triple_counts(const StateTrace& trace) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  Counts counts;
  for (const TraceRow& r : trace) ++counts[pack(r.w, r.s, r.b)];
  return counts;
}

// Entropy of the projection of the triple distribution under a key map.
template <class KeyFn>
double entropy_of(const Counts& triples, KeyFn key) {
  Counts projected;
  for (const auto& [sym, c] : triples) projected[key(sym)] += c;
  return entropy(JointTable::from_counts(projected));
}

std::uint32_t sym_w(std::uint32_t sym) { return sym & 7u; }
std::uint32_t sym_s(std::uint32_t sym) { return (sym >> 3) & 15u; }
std::uint32_t sym_b(std::uint32_t sym) { return (sym >> 7) & 0x3FFu; }

}  // namespace

double representation_R(const StateTrace& trace) {
  Counts t = triple_counts(trace);
  double h_ws = entropy_of(t, [](std::uint32_t y) {
    return sym_w(y) | (sym_s(y) << 3);
  });
  double h_bs = entropy_of(t, [](std::uint32_t y) {
    return sym_b(y) | (sym_s(y) << 10);
  });
  double h_s = entropy_of(t, sym_s);
  double h_wbs = entropy_of(t, [](std::uint32_t y) { return y; });
  return h_ws + h_bs - h_s - h_wbs;
}

double shared_entropy_wb(const StateTrace& trace) {
  Counts t = triple_counts(trace);
  double h_w = entropy_of(t, sym_w);
  double h_b = entropy_of(t, sym_b);
  double h_wb = entropy_of(t, [](std::uint32_t y) {
    return sym_w(y) | (sym_b(y) << 3);
  });
  return h_w + h_b - h_wb;
}

double coherent_information(const StateTrace& trace) {
  Counts t = triple_counts(trace);
  double h_w = entropy_of(t, sym_w);
  double h_s = entropy_of(t, sym_s);
  double h_b = entropy_of(t, sym_b);
  double h_ws = entropy_of(t, [](std::uint32_t y) {
    return sym_w(y) | (sym_s(y) << 3);
  });
  double h_wb = entropy_of(t, [](std::uint32_t y) {
    return sym_w(y) | (sym_b(y) << 3);
  });
  double h_bs = entropy_of(t, [](std::uint32_t y) {
    return sym_b(y) | (sym_s(y) << 10);
  });
  double h_wbs = entropy_of(t, [](std::uint32_t y) { return y; });
  return h_w + h_b + h_s - h_wb - h_ws - h_bs + h_wbs;
}

RepMatrix representation_matrix(const StateTrace& trace) {
  Counts t = triple_counts(trace);
  double h_s = entropy_of(t, sym_s);
  RepMatrix m;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 10; ++i) {
      auto wc = [c](std::uint32_t y) { return (sym_w(y) >> c) & 1u; };
      auto bi = [i](std::uint32_t y) { return (sym_b(y) >> i) & 1u; };
      double h_wcs = entropy_of(t, [&](std::uint32_t y) {
        return wc(y) | (sym_s(y) << 1);
      });
      double h_bis = entropy_of(t, [&](std::uint32_t y) {
        return bi(y) | (sym_s(y) << 1);
      });
      double h_wbis = entropy_of(t, [&](std::uint32_t y) {
        return wc(y) | (bi(y) << 1) | (sym_s(y) << 2);
      });
      m(c, i) = h_wcs + h_bis - h_s - h_wbis;
    }
  }
  return m;
}

double node_smearedness(const RepMatrix& m) {
  double total = 0.0;
  for (int i = 0; i < m.cols(); ++i)
    for (int j = 1; j < m.rows(); ++j)
      for (int k = 0; k < j; ++k) total += std::min(m(j, i), m(k, i));
  return total;
}

double concept_smearedness(const RepMatrix& m) {
  double total = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 1; j < m.cols(); ++j)
      for (int k = 0; k < j; ++k) total += std::min(m(i, j), m(i, k));
  return total;
}

namespace {

constexpr const char* kConceptNames[3] = {"size", "location", "direction"};

}  // namespace

void write_matrix_csv(std::ostream& os, const RepMatrix& m) {
  os << "concept";
  for (int i = 0; i < 10; ++i) os << ",n" << i;
  os << '\n';
  for (int c = 0; c < 3; ++c) {
    os << kConceptNames[c];
    for (int i = 0; i < 10; ++i) os << ',' << fmt_double(m(c, i));
    os << '\n';
  }
}

RepMatrix read_matrix_csv(std::istream& is) {
  RepMatrix m;
  std::string line;
  bool seen[3] = {false, false, false};
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (fields[0] == "concept") continue;
    int row = -1;
    for (int k = 0; k < 3; ++k)
      if (fields[0] == kConceptNames[k]) row = k;
    if (row < 0) throw std::runtime_error("unknown concept row label");
    if (fields.size() != 11)
      throw std::runtime_error("matrix row has wrong field count");
    for (int i = 0; i < 10; ++i) m(row, i) = parse_double(fields[1 + i]);
    seen[row] = true;
  }
  if (!(seen[0] && seen[1] && seen[2]))
    throw std::runtime_error("matrix csv is missing a concept row");
  return m;
}

}  // namespace acplab::info
