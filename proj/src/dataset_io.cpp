#include "trajcast/dataset_io.hpp"

#include "io_util.hpp"

namespace trajcast {

namespace {

constexpr char kGridMagic[4] = {'T', 'G', 'R', 'D'};
constexpr char kSeqMagic[4] = {'T', 'S', 'E', 'Q'};
constexpr std::uint32_t kVersion = 1;

void write_grid_section(std::ostream& out, const std::vector<Sample>& samples,
                        std::size_t resolution) {
  detail::write_uint<std::uint64_t>(out, samples.size());
  for (const Sample& s : samples) {
    if (s.grid.resolution != resolution ||
        s.grid.values.size() != resolution * resolution) {
      throw DataError("sample grid does not match dataset resolution");
    }
    for (float v : s.grid.values) detail::write_f32(out, v);
    detail::write_f32(out, s.target_m);
    detail::write_f32(out, s.target_n);
  }
}

std::vector<Sample> read_grid_section(std::istream& in,
                                      std::size_t resolution) {
  const std::uint64_t count =
      detail::read_uint<std::uint64_t>(in, "section count");
  std::vector<Sample> samples;
  samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Sample s;
    s.grid.resolution = resolution;
    s.grid.values.resize(resolution * resolution);
    for (float& v : s.grid.values) v = detail::read_f32(in, "grid value");
    s.target_m = detail::read_f32(in, "target m");
    s.target_n = detail::read_f32(in, "target n");
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_seq_section(std::ostream& out,
                       const std::vector<SequenceSample>& samples) {
  detail::write_uint<std::uint64_t>(out, samples.size());
  for (const SequenceSample& s : samples) {
    detail::write_uint<std::uint32_t>(
        out, static_cast<std::uint32_t>(s.cells.size()));
    for (const CellIndex& c : s.cells) {
      detail::write_f32(out, static_cast<float>(c.m));
      detail::write_f32(out, static_cast<float>(c.n));
    }
    detail::write_f32(out, s.target_m);
    detail::write_f32(out, s.target_n);
  }
}

std::vector<SequenceSample> read_seq_section(std::istream& in) {
  const std::uint64_t count =
      detail::read_uint<std::uint64_t>(in, "section count");
  std::vector<SequenceSample> samples;
  samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    SequenceSample s;
    const std::uint32_t len =
        detail::read_uint<std::uint32_t>(in, "sequence length");
    s.cells.resize(len);
    for (CellIndex& c : s.cells) {
      c.m = static_cast<int>(detail::read_f32(in, "cell m"));
      c.n = static_cast<int>(detail::read_f32(in, "cell n"));
    }
    s.target_m = detail::read_f32(in, "target m");
    s.target_n = detail::read_f32(in, "target n");
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace

void write_grid_dataset(const GridDataset& ds, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  detail::write_magic(out, kGridMagic);
  detail::write_uint<std::uint32_t>(out, kVersion);
  detail::write_uint<std::uint32_t>(out,
                                    static_cast<std::uint32_t>(ds.resolution));
  detail::write_uint<std::uint8_t>(out,
                                   static_cast<std::uint8_t>(ds.encoder));
  write_grid_section(out, ds.split.train, ds.resolution);
  write_grid_section(out, ds.split.validation, ds.resolution);
  write_grid_section(out, ds.split.test, ds.resolution);
  if (!out) throw IoError("write failed for '" + path + "'");
}

GridDataset read_grid_dataset(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  detail::expect_magic(in, kGridMagic, path);
  detail::expect_version(in, kVersion, path);
  GridDataset ds;
  ds.resolution = detail::read_uint<std::uint32_t>(in, "resolution");
  if (ds.resolution == 0) {
    throw FormatError("'" + path + "': zero grid resolution");
  }
  const std::uint8_t tag = detail::read_uint<std::uint8_t>(in, "encoder tag");
  if (tag > 2) {
    throw FormatError("'" + path + "': unknown encoder tag " +
                      std::to_string(tag));
  }
  ds.encoder = static_cast<Encoder>(tag);
  ds.split.train = read_grid_section(in, ds.resolution);
  ds.split.validation = read_grid_section(in, ds.resolution);
  ds.split.test = read_grid_section(in, ds.resolution);
  return ds;
}

void write_sequence_dataset(const SequenceDataset& ds,
                            const std::string& path) {
  std::ofstream out = detail::open_output(path);
  detail::write_magic(out, kSeqMagic);
  detail::write_uint<std::uint32_t>(out, kVersion);
  detail::write_uint<std::uint32_t>(out,
                                    static_cast<std::uint32_t>(ds.resolution));
  write_seq_section(out, ds.split.train);
  write_seq_section(out, ds.split.validation);
  write_seq_section(out, ds.split.test);
  if (!out) throw IoError("write failed for '" + path + "'");
}

SequenceDataset read_sequence_dataset(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  detail::expect_magic(in, kSeqMagic, path);
  detail::expect_version(in, kVersion, path);
  SequenceDataset ds;
  ds.resolution = detail::read_uint<std::uint32_t>(in, "resolution");
  if (ds.resolution == 0) {
    throw FormatError("'" + path + "': zero grid resolution");
  }
  ds.split.train = read_seq_section(in);
  ds.split.validation = read_seq_section(in);
  ds.split.test = read_seq_section(in);
  return ds;
}

}  // namespace trajcast
