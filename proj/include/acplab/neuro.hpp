#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>

#include "acplab/brain.hpp"
#include "acplab/genome.hpp"

namespace acplab::neuro {

// One genome site per weight, mapped affinely onto [-1, 1].
inline double decode_weight(std::uint8_t site) {
  return static_cast<double>(site) / 255.0 * 2.0 - 1.0;
}

using Vec10 = Eigen::Matrix<double, 10, 1>;

// Threshold-at-zero discretization used by the analysis stage; exact
// zeros map to 0, so Markov hidden bits pass through unchanged.
inline std::uint16_t binarize_hidden(const Vec10& v) {
  std::uint16_t bits = 0;
  for (int k = 0; k < 10; ++k)
    if (v[k] > 0.0) bits |= std::uint16_t(1) << k;
  return bits;
}

inline constexpr int kRnnSites = 14 * 12;
inline constexpr int kLstmSites = 4 * (14 * 10 + 10);

// Single-layer tanh perceptron with 10 recurrent nodes.  Input is the 4
// sensor bits followed by the previous update's recurrent values; the 12
// outputs are 2 motor units then the 10 new recurrent values, copied back
// continuously (no binarization between updates).
class RnnBrain final : public Brain {
 public:
  explicit RnnBrain(const genome::Genome& g);

  void reset() override { recurrent_.setZero(); }
  std::uint8_t step(std::uint8_t sensors) override;
  std::uint16_t hidden_bits() const override {
    return binarize_hidden(recurrent_);
  }

  const Eigen::Matrix<double, 14, 12>& weights() const { return weights_; }
  const Vec10& recurrent() const { return recurrent_; }

 private:
  Eigen::Matrix<double, 14, 12> weights_;
  Vec10 recurrent_;
};

// Standard gated recurrence with h and C streams of dimension 10.  The
// input to every gate is z = [h; sensors] (14 values); motors are the
// thresholded first two components of the new h, and the analysis reads
// the 10 h-components.
class LstmBrain final : public Brain {
 public:
  explicit LstmBrain(const genome::Genome& g);

  void reset() override {
    h_.setZero();
    c_.setZero();
  }
  std::uint8_t step(std::uint8_t sensors) override;
  std::uint16_t hidden_bits() const override { return binarize_hidden(h_); }

  const Vec10& h() const { return h_; }
  const Vec10& c() const { return c_; }

  using GateMatrix = Eigen::Matrix<double, 10, 14>;
  const GateMatrix& w_forget() const { return wf_; }
  const GateMatrix& w_input() const { return wi_; }
  const GateMatrix& w_candidate() const { return wc_; }
  const GateMatrix& w_output() const { return wo_; }
  const Vec10& b_forget() const { return bf_; }
  const Vec10& b_input() const { return bi_; }
  const Vec10& b_candidate() const { return bc_; }
  const Vec10& b_output() const { return bo_; }

 private:
  // Weight matrices are stored transposed-for-use: rows index the 10 gate
  // units, columns the 14 inputs, filled row-major over z per unit.
  GateMatrix wf_, wi_, wc_, wo_;
  Vec10 bf_, bi_, bc_, bo_;
  Vec10 h_, c_;
};

// Parameter dump as CSV rows (matrix,row,col,value) for golden tests.
void dump_rnn_params(std::ostream& os, const RnnBrain& b);
void dump_lstm_params(std::ostream& os, const LstmBrain& b);

}  // namespace acplab::neuro
