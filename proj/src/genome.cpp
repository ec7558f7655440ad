#include "acplab/genome.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace acplab::genome {

void MutationConfig::validate() const {
  if (point_rate < 0.0 || point_rate > 1.0)
    throw std::invalid_argument("point_rate outside [0, 1]");
  if (indel_rate_per_site < 0.0)
    throw std::invalid_argument("indel_rate_per_site must be non-negative");
  if (chunk_min <= 0 || chunk_min > chunk_max)
    throw std::invalid_argument("chunk bounds invalid");
  if (min_len < 0 || min_len > max_len)
    throw std::invalid_argument("length bounds invalid");
}

Genome random_genome(int n, const MutationConfig& cfg, Rng& rng) {
  if (n < cfg.min_len || n > cfg.max_len)
    throw std::invalid_argument("random_genome length outside bounds");
  Genome g(static_cast<std::size_t>(n));
  for (auto& site : g) site = rng.next_byte();
  return g;
}

namespace {

// Event probability for one indel pass, capped at 1 for long genomes.
bool indel_fires(std::size_t len, const MutationConfig& cfg, Rng& rng) {
  double p = cfg.indel_rate_per_site * static_cast<double>(len);
  if (p >= 1.0) return true;
  return rng.next_unit() < p;
}

int draw_chunk_len(const MutationConfig& cfg, Rng& rng) {
  return static_cast<int>(rng.next_range(cfg.chunk_min, cfg.chunk_max));
}

}  // namespace

Genome mutate(const Genome& g, const MutationConfig& cfg, Rng& rng) {
  Genome child = g;

  if (cfg.point_rate > 0.0) {
    for (auto& site : child)
      if (rng.next_unit() < cfg.point_rate) site = rng.next_byte();
  }

  if (cfg.indel_rate_per_site > 0.0 && indel_fires(child.size(), cfg, rng)) {
    int chunk = draw_chunk_len(cfg, rng);
    auto len = static_cast<std::int64_t>(child.size());
    if (len - chunk >= cfg.min_len) {
      auto start = rng.next_range(0, len - chunk);
      child.erase(child.begin() + start, child.begin() + start + chunk);
    }
  }

  if (cfg.indel_rate_per_site > 0.0 && indel_fires(child.size(), cfg, rng)) {
    int chunk = draw_chunk_len(cfg, rng);
    auto len = static_cast<std::int64_t>(child.size());
    if (chunk <= len && len + chunk <= cfg.max_len) {
      auto src = rng.next_range(0, len - chunk);
      Genome copy(child.begin() + src, child.begin() + src + chunk);
      auto at = rng.next_range(0, len);
      child.insert(child.begin() + at, copy.begin(), copy.end());
    }
  }

  return child;
}

std::string to_text(const Genome& g) {
  std::string out;
  out.reserve(g.size() * 4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(static_cast<int>(g[i]));
  }
  return out;
}

Genome from_text(const std::string& line) {
  Genome g;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    std::size_t end = comma == std::string::npos ? line.size() : comma;
    int v = 0;
    bool any = false;
    for (std::size_t i = pos; i < end; ++i) {
      char c = line[i];
      if (c < '0' || c > '9')
        throw std::runtime_error("genome text contains a non-digit");
      v = v * 10 + (c - '0');
      any = true;
      if (v > 255) throw std::runtime_error("genome site exceeds 255");
    }
    if (!any) throw std::runtime_error("genome text has an empty field");
    g.push_back(static_cast<std::uint8_t>(v));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return g;
}

void write_binary(std::ostream& os, const Genome& g) {
  std::uint64_t n = g.size();
  char hdr[8];
  for (int i = 0; i < 8; ++i) hdr[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
  os.write(hdr, 8);
  if (n) os.write(reinterpret_cast<const char*>(g.data()),
                  static_cast<std::streamsize>(n));
}

Genome read_binary(std::istream& is) {
  char hdr[8];
  if (!is.read(hdr, 8)) throw std::runtime_error("truncated genome header");
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i)
    n |= static_cast<std::uint64_t>(static_cast<unsigned char>(hdr[i]))
         << (8 * i);
  Genome g(n);
  if (n && !is.read(reinterpret_cast<char*>(g.data()),
                    static_cast<std::streamsize>(n)))
    throw std::runtime_error("truncated genome body");
  return g;
}

}  // namespace acplab::genome
