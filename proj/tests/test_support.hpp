#pragma once

#include <cstdint>
#include <vector>

#include "acplab/brain.hpp"

namespace acplab::testsupport {

// Emits a fixed motor mask every update; hidden bits stay 0.
class FixedMotorBrain final : public Brain {
 public:
  explicit FixedMotorBrain(std::uint8_t motors) : motors_(motors) {}
  void reset() override {}
  std::uint8_t step(std::uint8_t) override { return motors_; }
  std::uint16_t hidden_bits() const override { return 0; }

 private:
  std::uint8_t motors_;
};

// Replays a scripted motor sequence, repeating the last entry when the
// script runs out; reset rewinds.
class ScriptedBrain final : public Brain {
 public:
  explicit ScriptedBrain(std::vector<std::uint8_t> script)
      : script_(std::move(script)) {}
  void reset() override { pos_ = 0; }
  std::uint8_t step(std::uint8_t) override {
    if (script_.empty()) return 0;
    std::uint8_t m = script_[pos_ < script_.size() ? pos_ : script_.size() - 1];
    ++pos_;
    return m;
  }
  std::uint16_t hidden_bits() const override { return 0; }

 private:
  std::vector<std::uint8_t> script_;
  std::size_t pos_ = 0;
};

// Records the sensor stream it receives; useful for noise tests.
class SensorTapBrain final : public Brain {
 public:
  void reset() override {}
  std::uint8_t step(std::uint8_t sensors) override {
    seen.push_back(sensors);
    return 0;
  }
  std::uint16_t hidden_bits() const override { return 0; }

  std::vector<std::uint8_t> seen;
};

}  // namespace acplab::testsupport
