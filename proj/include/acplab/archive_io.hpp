#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "acplab/evolution.hpp"
#include "acplab/genome.hpp"

namespace acplab::io {

// All CSV files start with a "# manifest: <name>" comment so every result
// can be traced to the exact configuration that produced it; readers skip
// leading # lines.

void write_meta_csv(const std::filesystem::path& path,
                    const std::vector<std::vector<evo::IndividualMeta>>& gens,
                    const std::string& manifest_ref);

// Appends generations [from, gens.size()) to an existing file (or creates
// it with the header when from == 0).
void append_meta_csv(const std::filesystem::path& path,
                     const std::vector<std::vector<evo::IndividualMeta>>& gens,
                     std::size_t from, const std::string& manifest_ref);

std::vector<std::vector<evo::IndividualMeta>> read_meta_csv(
    const std::filesystem::path& path);

// lod.csv uses the same columns, one row per generation along the line
// of descent.
void write_lod_csv(const std::filesystem::path& path,
                   const std::vector<evo::IndividualMeta>& lod,
                   const std::string& manifest_ref);
std::vector<evo::IndividualMeta> read_lod_csv(
    const std::filesystem::path& path);

// genomes.bin: magic "ACPLGEN1", then repeated (id: i64 LE, length: u64
// LE, raw bytes).
void write_genomes_bin(
    const std::filesystem::path& path,
    const std::unordered_map<std::int64_t, genome::Genome>& store);
std::unordered_map<std::int64_t, genome::Genome> read_genomes_bin(
    const std::filesystem::path& path);

// checkpoint.bin captures a mid-run evolver: completed generation index,
// id counter, current population, and the pruned ancestor genome store.
// Generation metadata is not duplicated here; it lives in archive.csv.
struct Checkpoint {
  std::int64_t generation = 0;
  std::int64_t next_id = 0;
  std::vector<evo::Individual> population;
  std::unordered_map<std::int64_t, genome::Genome> store;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace acplab::io
