#include "acplab/archive_io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "acplab/csv.hpp"

namespace acplab::io {

namespace {

constexpr char kGenomesMagic[8] = {'A', 'C', 'P', 'L', 'G', 'E', 'N', '1'};
constexpr char kCheckpointMagic[8] = {'A', 'C', 'P', 'L', 'C', 'K', 'P', '1'};
constexpr const char* kMetaHeader = "generation,id,parent_id,n_correct,fitness";

std::ofstream open_out(const std::filesystem::path& path, bool binary,
                       bool append = false) {
  std::ios::openmode mode = std::ios::out;
  if (binary) mode |= std::ios::binary;
  if (append) mode |= std::ios::app;
  std::ofstream os(path, mode);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream is(path, binary ? std::ios::in | std::ios::binary
                                : std::ios::in);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return is;
}

void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}

std::uint64_t read_u64(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw std::runtime_error("truncated binary file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i]))
         << (8 * i);
  return v;
}

void write_i64(std::ostream& os, std::int64_t v) {
  write_u64(os, static_cast<std::uint64_t>(v));
}

std::int64_t read_i64(std::istream& is) {
  return static_cast<std::int64_t>(read_u64(is));
}

void write_meta_rows(std::ostream& os,
                     const std::vector<std::vector<evo::IndividualMeta>>& gens,
                     std::size_t from) {
  for (std::size_t g = from; g < gens.size(); ++g)
    for (const evo::IndividualMeta& m : gens[g])
      os << g << ',' << m.id << ',' << m.parent_id << ',' << m.n_correct
         << ',' << fmt_double(m.fitness) << '\n';
}

}  // namespace

void write_meta_csv(const std::filesystem::path& path,
                    const std::vector<std::vector<evo::IndividualMeta>>& gens,
                    const std::string& manifest_ref) {
  auto os = open_out(path, false);
  os << "# manifest: " << manifest_ref << '\n' << kMetaHeader << '\n';
  write_meta_rows(os, gens, 0);
}

void append_meta_csv(const std::filesystem::path& path,
                     const std::vector<std::vector<evo::IndividualMeta>>& gens,
                     std::size_t from, const std::string& manifest_ref) {
  if (from == 0) {
    write_meta_csv(path, gens, manifest_ref);
    return;
  }
  auto os = open_out(path, false, true);
  write_meta_rows(os, gens, from);
}

std::vector<std::vector<evo::IndividualMeta>> read_meta_csv(
    const std::filesystem::path& path) {
  auto is = open_in(path, false);
  std::vector<std::vector<evo::IndividualMeta>> gens;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kMetaHeader)
        throw std::runtime_error("unexpected archive header in " +
                                 path.string());
      header_seen = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw std::runtime_error("bad archive row in " + path.string());
    auto g = static_cast<std::size_t>(parse_i64(fields[0]));
    if (g >= gens.size()) gens.resize(g + 1);
    evo::IndividualMeta m;
    m.id = parse_i64(fields[1]);
    m.parent_id = parse_i64(fields[2]);
    m.n_correct = static_cast<int>(parse_i64(fields[3]));
    m.fitness = parse_double(fields[4]);
    gens[g].push_back(m);
  }
  if (!header_seen)
    throw std::runtime_error("archive csv has no header: " + path.string());
  return gens;
}

void write_lod_csv(const std::filesystem::path& path,
                   const std::vector<evo::IndividualMeta>& lod,
                   const std::string& manifest_ref) {
  auto os = open_out(path, false);
  os << "# manifest: " << manifest_ref << '\n' << kMetaHeader << '\n';
  for (std::size_t g = 0; g < lod.size(); ++g)
    os << g << ',' << lod[g].id << ',' << lod[g].parent_id << ','
       << lod[g].n_correct << ',' << fmt_double(lod[g].fitness) << '\n';
}

std::vector<evo::IndividualMeta> read_lod_csv(
    const std::filesystem::path& path) {
  auto gens = read_meta_csv(path);
  std::vector<evo::IndividualMeta> lod;
  lod.reserve(gens.size());
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (gens[g].size() != 1)
      throw std::runtime_error("lod csv must hold one row per generation");
    lod.push_back(gens[g][0]);
  }
  return lod;
}

void write_genomes_bin(
    const std::filesystem::path& path,
    const std::unordered_map<std::int64_t, genome::Genome>& store) {
  auto os = open_out(path, true);
  os.write(kGenomesMagic, 8);
  // Sorted by id so the file is deterministic.
  std::vector<std::int64_t> ids;
  ids.reserve(store.size());
  for (const auto& [id, g] : store) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  for (std::int64_t id : ids) {
    write_i64(os, id);
    genome::write_binary(os, store.at(id));
  }
}

std::unordered_map<std::int64_t, genome::Genome> read_genomes_bin(
    const std::filesystem::path& path) {
  auto is = open_in(path, true);
  char magic[8];
  if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kGenomesMagic))
    throw std::runtime_error("not a genome archive: " + path.string());
  std::unordered_map<std::int64_t, genome::Genome> store;
  while (true) {
    std::int64_t id;
    {
      char probe;
      if (!is.get(probe)) break;
      is.unget();
      id = read_i64(is);
    }
    store[id] = genome::read_binary(is);
  }
  return store;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    auto os = open_out(tmp, true);
    os.write(kCheckpointMagic, 8);
    write_i64(os, c.generation);
    write_i64(os, c.next_id);
    write_u64(os, c.population.size());
    for (const evo::Individual& ind : c.population) {
      write_i64(os, ind.id);
      write_i64(os, ind.parent_id);
      write_i64(os, ind.n_correct);
      genome::write_binary(os, ind.genome);
    }
    write_u64(os, c.store.size());
    std::vector<std::int64_t> ids;
    ids.reserve(c.store.size());
    for (const auto& [id, g] : c.store) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (std::int64_t id : ids) {
      write_i64(os, id);
      genome::write_binary(os, c.store.at(id));
    }
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  auto is = open_in(path, true);
  char magic[8];
  if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kCheckpointMagic))
    throw std::runtime_error("not a checkpoint: " + path.string());
  Checkpoint c;
  c.generation = read_i64(is);
  c.next_id = read_i64(is);
  auto pop_count = read_u64(is);
  c.population.reserve(pop_count);
  for (std::uint64_t i = 0; i < pop_count; ++i) {
    evo::Individual ind;
    ind.id = read_i64(is);
    ind.parent_id = read_i64(is);
    ind.n_correct = static_cast<int>(read_i64(is));
    ind.fitness = evo::fitness_from_correct(ind.n_correct);
    ind.genome = genome::read_binary(is);
    c.population.push_back(std::move(ind));
  }
  auto store_count = read_u64(is);
  for (std::uint64_t i = 0; i < store_count; ++i) {
    std::int64_t id = read_i64(is);
    c.store[id] = genome::read_binary(is);
  }
  return c;
}

}  // namespace acplab::io
