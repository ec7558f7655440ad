#pragma once

#include <cstdint>

namespace acplab {

inline constexpr int kNumSensors = 4;
inline constexpr int kNumMotors = 2;
inline constexpr int kNumHidden = 10;

// Common control interface for all substrates.  Sensor values arrive as a
// 4-bit mask (bit k = sensor k), the step returns a 2-bit motor mask
// (bit 0 = left motor, bit 1 = right motor), and hidden_bits() reports the
// binarized internal state after the most recent step as a 10-bit mask.
class Brain {
 public:
  virtual ~Brain() = default;

  virtual void reset() = 0;
  virtual std::uint8_t step(std::uint8_t sensors) = 0;
  virtual std::uint16_t hidden_bits() const = 0;
};

}  // namespace acplab
