#include "trajcast/checkpoint.hpp"

#include "io_util.hpp"

namespace trajcast {

namespace {
constexpr char kMagic[4] = {'T', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_checkpoint(const std::vector<nn::Parameter<float>*>& params,
                     const std::string& path) {
  std::ofstream out = detail::open_output(path);
  detail::write_magic(out, kMagic);
  detail::write_uint<std::uint32_t>(out, kVersion);
  detail::write_uint<std::uint32_t>(out,
                                    static_cast<std::uint32_t>(params.size()));
  for (const nn::Parameter<float>* p : params) {
    if (p->name.size() > UINT16_MAX) {
      throw DataError("parameter name too long: " + p->name);
    }
    detail::write_uint<std::uint16_t>(
        out, static_cast<std::uint16_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    detail::write_uint<std::uint8_t>(
        out, static_cast<std::uint8_t>(p->value.rank()));
    for (std::size_t e : p->value.shape()) {
      detail::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(e));
    }
    for (float v : p->value.values()) detail::write_f32(out, v);
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void load_checkpoint(const std::vector<nn::Parameter<float>*>& params,
                     const std::string& path) {
  std::ifstream in = detail::open_input(path);
  detail::expect_magic(in, kMagic, path);
  detail::expect_version(in, kVersion, path);
  const std::uint32_t count =
      detail::read_uint<std::uint32_t>(in, "parameter count");
  if (count != params.size()) {
    throw FormatError("'" + path + "': checkpoint has " +
                      std::to_string(count) + " parameters, model expects " +
                      std::to_string(params.size()));
  }
  for (nn::Parameter<float>* p : params) {
    const std::uint16_t name_len =
        detail::read_uint<std::uint16_t>(in, "name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw FormatError("'" + path + "': truncated file while reading name");
    }
    if (name != p->name) {
      throw FormatError("'" + path + "': parameter '" + name +
                        "' does not match model parameter '" + p->name + "'");
    }
    const std::uint8_t rank = detail::read_uint<std::uint8_t>(in, "rank");
    std::vector<std::size_t> shape(rank);
    for (auto& e : shape) {
      e = detail::read_uint<std::uint32_t>(in, "extent");
    }
    if (shape != p->value.shape()) {
      throw FormatError("'" + path + "': parameter '" + name +
                        "' has shape " + nn::Tensor<float>::shape_str(shape) +
                        ", model expects " + p->value.shape_str());
    }
    for (float& v : p->value.values()) v = detail::read_f32(in, "value");
  }
}

}  // namespace trajcast
