#include "acplab/neuro.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "acplab/csv.hpp"

namespace acplab::neuro {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

RnnBrain::RnnBrain(const genome::Genome& g) {
  if (g.size() < static_cast<std::size_t>(kRnnSites))
    throw std::invalid_argument("genome too short for RNN decode");
  // Sites are row-major over (input i, output j); stored coefficient
  // (i, j) matches that layout directly.
  for (int i = 0; i < 14; ++i)
    for (int j = 0; j < 12; ++j)
      weights_(i, j) = decode_weight(g[static_cast<std::size_t>(i * 12 + j)]);
  recurrent_.setZero();
}

std::uint8_t RnnBrain::step(std::uint8_t sensors) {
  Eigen::Matrix<double, 14, 1> x;
  for (int k = 0; k < 4; ++k) x[k] = (sensors >> k) & 1 ? 1.0 : 0.0;
  x.segment<10>(4) = recurrent_;
  Eigen::Matrix<double, 12, 1> y =
      (weights_.transpose() * x).array().tanh().matrix();
  recurrent_ = y.segment<10>(2);
  std::uint8_t motors = 0;
  if (y[0] > 0.0) motors |= 1;
  if (y[1] > 0.0) motors |= 2;
  return motors;
}

namespace {

// Reads one 14x10 matrix (row-major over input, unit) into a 10x14
// operator, then its 10 biases; advances the cursor.
void read_lstm_block(const genome::Genome& g, std::size_t& pos,
                     Eigen::Matrix<double, 10, 14>& w, Vec10& b) {
  for (int i = 0; i < 14; ++i)
    for (int j = 0; j < 10; ++j) w(j, i) = decode_weight(g[pos++]);
  for (int j = 0; j < 10; ++j) b[j] = decode_weight(g[pos++]);
}

}  // namespace

LstmBrain::LstmBrain(const genome::Genome& g) {
  if (g.size() < static_cast<std::size_t>(kLstmSites))
    throw std::invalid_argument("genome too short for LSTM decode");
  std::size_t pos = 0;
  read_lstm_block(g, pos, wf_, bf_);
  read_lstm_block(g, pos, wi_, bi_);
  read_lstm_block(g, pos, wc_, bc_);
  read_lstm_block(g, pos, wo_, bo_);
  h_.setZero();
  c_.setZero();
}

std::uint8_t LstmBrain::step(std::uint8_t sensors) {
  Eigen::Matrix<double, 14, 1> z;
  z.segment<10>(0) = h_;
  for (int k = 0; k < 4; ++k) z[10 + k] = (sensors >> k) & 1 ? 1.0 : 0.0;
  Vec10 f = (wf_ * z + bf_).unaryExpr([](double v) { return sigmoid(v); });
  Vec10 i = (wi_ * z + bi_).unaryExpr([](double v) { return sigmoid(v); });
  Vec10 cand = (wc_ * z + bc_).array().tanh().matrix();
  Vec10 o = (wo_ * z + bo_).unaryExpr([](double v) { return sigmoid(v); });
  c_ = f.cwiseProduct(c_) + i.cwiseProduct(cand);
  h_ = o.cwiseProduct(c_.array().tanh().matrix());
  std::uint8_t motors = 0;
  if (h_[0] > 0.0) motors |= 1;
  if (h_[1] > 0.0) motors |= 2;
  return motors;
}

void dump_rnn_params(std::ostream& os, const RnnBrain& b) {
  os << "matrix,row,col,value\n";
  for (int i = 0; i < 14; ++i)
    for (int j = 0; j < 12; ++j)
      os << "weights," << i << ',' << j << ','
         << fmt_double(b.weights()(i, j)) << '\n';
}

void dump_lstm_params(std::ostream& os, const LstmBrain& b) {
  os << "matrix,row,col,value\n";
  // Rows and columns follow the genome layout: row = input index into z,
  // col = gate unit.
  auto emit = [&os](const char* name, const LstmBrain::GateMatrix& w,
                    const Vec10& bias) {
    for (int i = 0; i < 14; ++i)
      for (int j = 0; j < 10; ++j)
        os << name << ',' << i << ',' << j << ',' << fmt_double(w(j, i))
           << '\n';
    for (int j = 0; j < 10; ++j)
      os << name << "_bias," << j << ",0," << fmt_double(bias[j]) << '\n';
  };
  emit("forget", b.w_forget(), b.b_forget());
  emit("input", b.w_input(), b.b_input());
  emit("candidate", b.w_candidate(), b.b_candidate());
  emit("output", b.w_output(), b.b_output());
}

}  // namespace acplab::neuro
