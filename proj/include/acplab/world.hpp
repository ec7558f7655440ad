#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "acplab/brain.hpp"
#include "acplab/rng.hpp"

namespace acplab::world {

// Periodic 1-D catching task: a block falls for drop_height updates while
// drifting one column per update, and the agent below must overlap small
// blocks and dodge large ones when the block reaches its row.
struct WorldConfig {
  int width = 16;
  int drop_height = 32;
  int agent_width = 6;
  std::array<int, 4> sensor_offsets{0, 1, 4, 5};
  int small_size = 2;
  int large_size = 4;

  void validate() const;
};

struct TrialSpec {
  int block_size = 2;
  int direction = -1;  // -1 drifts left, +1 drifts right
  int start_x = 0;     // leftmost block column at the top row
};

struct TrialState {
  int block_x = 0;    // leftmost block column, mod width
  int block_row = 0;  // rows above the agent, drop_height down to 0
  int agent_x = 0;    // leftmost agent column, mod width
  int tick = 0;       // block_row + tick == drop_height always holds
};

enum class Outcome { kCaught, kMissed };

// Per-update record used by the analysis stage.  Concepts are labelled at
// sensing time: bit 0 (ws) = block is large, bit 1 (wl) = signed wrap
// offset from agent to block is positive, bit 2 (wd) = block drifts right.
struct TrialRecordRow {
  int tick = 0;
  std::uint8_t sensors = 0;      // 4-bit mask, corrupted value if noisy
  std::uint16_t hidden_bits = 0; // 10-bit mask, post-update
  std::uint8_t concepts = 0;     // 3-bit mask
};

struct TrialResult {
  bool success = false;
  std::vector<TrialRecordRow> rows;
};

inline constexpr std::uint8_t kConceptSize = 1;
inline constexpr std::uint8_t kConceptLocation = 2;
inline constexpr std::uint8_t kConceptDirection = 4;

// All 64 trials in canonical order: size (small, large) outermost, then
// direction (-1, +1), then start_x ascending.
std::vector<TrialSpec> enumerate_specs(const WorldConfig& cfg);

TrialState init_trial(const TrialSpec& spec, const WorldConfig& cfg);

std::uint8_t sense(const TrialState& st, const TrialSpec& spec,
                   const WorldConfig& cfg);

std::uint8_t label_concepts(const TrialState& st, const TrialSpec& spec,
                            const WorldConfig& cfg);

// Applies a motor mask: 01 moves left, 10 moves right, 00 and 11 stay.
void apply_action(TrialState& st, std::uint8_t motors, const WorldConfig& cfg);

void advance_block(TrialState& st, const TrialSpec& spec,
                   const WorldConfig& cfg);

// True when block and agent overlap in at least one column (mod width).
bool blocks_overlap(int block_x, int block_size, int agent_x,
                    const WorldConfig& cfg);

// Only valid once the block has landed (block_row == 0).
Outcome outcome(const TrialState& st, const TrialSpec& spec,
                const WorldConfig& cfg);

// Catch or avoid, judged against block size: catching a small block and
// dodging a large one both count as success.
bool trial_success(Outcome out, const TrialSpec& spec, const WorldConfig& cfg);

// Runs one trial from a reset brain.  noise_p is the per-sensor-bit
// corruption probability: each sensed bit is independently replaced by a
// fair random bit with probability noise_p.  The rng is only consumed when
// noise_p > 0.  Rows are recorded only when record is true.
TrialResult run_trial(Brain& brain, const TrialSpec& spec,
                      const WorldConfig& cfg, double noise_p, Rng& rng,
                      bool record);

// Trace CSV: header tick,s0,s1,s2,s3,b0..b9,ws,wl,wd plus a leading trial
// column identifying the source trial.
void write_trace_csv(std::ostream& os,
                     const std::vector<std::vector<TrialRecordRow>>& trials);
std::vector<std::vector<TrialRecordRow>> read_trace_csv(std::istream& is);

}  // namespace acplab::world
