#include "acplab/world.hpp"

#include <ostream>
#include <istream>
#include <stdexcept>
#include <string>

#include "acplab/csv.hpp"

namespace acplab::world {

namespace {

int wrap(int x, int width) {
  int r = x % width;
  return r < 0 ? r + width : r;
}

}  // namespace

void WorldConfig::validate() const {
  if (width <= 0) throw std::invalid_argument("width must be positive");
  if (drop_height <= 0)
    throw std::invalid_argument("drop_height must be positive");
  if (agent_width <= 0 || agent_width > width)
    throw std::invalid_argument("agent_width out of range");
  if (small_size <= 0 || large_size <= 0 || small_size == large_size)
    throw std::invalid_argument("block sizes must be positive and distinct");
  for (int off : sensor_offsets)
    if (off < 0 || off >= agent_width)
      throw std::invalid_argument("sensor offset outside agent");
}

std::vector<TrialSpec> enumerate_specs(const WorldConfig& cfg) {
  std::vector<TrialSpec> specs;
  specs.reserve(static_cast<std::size_t>(4) * cfg.width);
  for (int size : {cfg.small_size, cfg.large_size})
    for (int dir : {-1, +1})
      for (int x = 0; x < cfg.width; ++x)
        specs.push_back(TrialSpec{size, dir, x});
  return specs;
}

TrialState init_trial(const TrialSpec& spec, const WorldConfig& cfg) {
  if (spec.block_size != cfg.small_size && spec.block_size != cfg.large_size)
    throw std::invalid_argument("block_size matches neither configured size");
  if (spec.start_x < 0 || spec.start_x >= cfg.width)
    throw std::invalid_argument("start_x out of range");
  TrialState st;
  st.block_x = spec.start_x;
  st.block_row = cfg.drop_height;
  st.agent_x = 0;
  st.tick = 0;
  return st;
}

std::uint8_t sense(const TrialState& st, const TrialSpec& spec,
                   const WorldConfig& cfg) {
  std::uint8_t mask = 0;
  for (int k = 0; k < 4; ++k) {
    int col = wrap(st.agent_x + cfg.sensor_offsets[k], cfg.width);
    int rel = wrap(col - st.block_x, cfg.width);
    if (rel < spec.block_size) mask |= std::uint8_t(1) << k;
  }
  return mask;
}

std::uint8_t label_concepts(const TrialState& st, const TrialSpec& spec,
                            const WorldConfig& cfg) {
  std::uint8_t c = 0;
  if (spec.block_size == cfg.large_size) c |= kConceptSize;
  // Signed wrap offset along the shorter arc, in [-width/2, width/2).
  // Positive sets the location bit; the antipodal tie lands at -width/2
  // and labels 0.
  int off = wrap(st.block_x - st.agent_x + cfg.width / 2, cfg.width) -
            cfg.width / 2;
  if (off > 0) c |= kConceptLocation;
  if (spec.direction > 0) c |= kConceptDirection;
  return c;
}

void apply_action(TrialState& st, std::uint8_t motors, const WorldConfig& cfg) {
  motors &= 3;
  if (motors == 1)
    st.agent_x = wrap(st.agent_x - 1, cfg.width);
  else if (motors == 2)
    st.agent_x = wrap(st.agent_x + 1, cfg.width);
}

void advance_block(TrialState& st, const TrialSpec& spec,
                   const WorldConfig& cfg) {
  if (st.block_row <= 0)
    throw std::logic_error("advance_block called after landing");
  st.block_x = wrap(st.block_x + spec.direction, cfg.width);
  --st.block_row;
  ++st.tick;
}

bool blocks_overlap(int block_x, int block_size, int agent_x,
                    const WorldConfig& cfg) {
  for (int i = 0; i < block_size; ++i) {
    int col = wrap(block_x + i, cfg.width);
    int rel = wrap(col - agent_x, cfg.width);
    if (rel < cfg.agent_width) return true;
  }
  return false;
}

Outcome outcome(const TrialState& st, const TrialSpec& spec,
                const WorldConfig& cfg) {
  if (st.block_row != 0)
    throw std::logic_error("outcome queried before the block landed");
  return blocks_overlap(st.block_x, spec.block_size, st.agent_x, cfg)
             ? Outcome::kCaught
             : Outcome::kMissed;
}

bool trial_success(Outcome out, const TrialSpec& spec,
                   const WorldConfig& cfg) {
  return (out == Outcome::kCaught) != (spec.block_size == cfg.large_size);
}

TrialResult run_trial(Brain& brain, const TrialSpec& spec,
                      const WorldConfig& cfg, double noise_p, Rng& rng,
                      bool record) {
  if (noise_p < 0.0 || noise_p > 1.0)
    throw std::invalid_argument("noise_p outside [0, 1]");
  TrialResult result;
  if (record) result.rows.reserve(static_cast<std::size_t>(cfg.drop_height));
  TrialState st = init_trial(spec, cfg);
  brain.reset();
  while (st.block_row > 0) {
    std::uint8_t sensors = sense(st, spec, cfg);
    if (noise_p > 0.0) {
      for (int k = 0; k < 4; ++k) {
        if (rng.next_unit() < noise_p) {
          std::uint8_t bit = rng.next_bit() ? 1 : 0;
          sensors = static_cast<std::uint8_t>(
              (sensors & ~(std::uint8_t(1) << k)) | (bit << k));
        }
      }
    }
    std::uint8_t concepts = label_concepts(st, spec, cfg);
    std::uint8_t motors = brain.step(sensors);
    if (record)
      result.rows.push_back(
          TrialRecordRow{st.tick, sensors, brain.hidden_bits(), concepts});
    apply_action(st, motors, cfg);
    advance_block(st, spec, cfg);
  }
  result.success = trial_success(outcome(st, spec, cfg), spec, cfg);
  return result;
}

void write_trace_csv(std::ostream& os,
                     const std::vector<std::vector<TrialRecordRow>>& trials) {
  os << "trial,tick,s0,s1,s2,s3,b0,b1,b2,b3,b4,b5,b6,b7,b8,b9,ws,wl,wd\n";
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const TrialRecordRow& r : trials[t]) {
      os << t << ',' << r.tick;
      for (int k = 0; k < 4; ++k) os << ',' << ((r.sensors >> k) & 1);
      for (int k = 0; k < 10; ++k) os << ',' << ((r.hidden_bits >> k) & 1);
      for (int k = 0; k < 3; ++k) os << ',' << ((r.concepts >> k) & 1);
      os << '\n';
    }
  }
}

std::vector<std::vector<TrialRecordRow>> read_trace_csv(std::istream& is) {
  std::string line;
  std::vector<std::vector<TrialRecordRow>> trials;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header && line.rfind("trial,", 0) == 0) {
      saw_header = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 19)
      throw std::runtime_error("trace csv row has wrong field count");
    std::size_t trial = static_cast<std::size_t>(parse_i64(fields[0]));
    if (trial >= trials.size()) trials.resize(trial + 1);
    TrialRecordRow r;
    r.tick = static_cast<int>(parse_i64(fields[1]));
    for (int k = 0; k < 4; ++k)
      if (parse_i64(fields[2 + k])) r.sensors |= std::uint8_t(1) << k;
    for (int k = 0; k < 10; ++k)
      if (parse_i64(fields[6 + k])) r.hidden_bits |= std::uint16_t(1) << k;
    for (int k = 0; k < 3; ++k)
      if (parse_i64(fields[16 + k])) r.concepts |= std::uint8_t(1) << k;
    trials[trial].push_back(r);
  }
  if (!saw_header) throw std::runtime_error("trace csv has no header");
  return trials;
}

}  // namespace acplab::world
