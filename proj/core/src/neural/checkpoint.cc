#include "selfgen/neural/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

constexpr std::string_view kMagic = "SGTENSOR";

template <typename T>
void PutLe(std::string* out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out->push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::string_view Take(std::size_t n) {
    Need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string EncodeArchive(const TensorArchive& archive) {
  std::string out(kMagic);
  PutLe<std::uint32_t>(&out, kCheckpointVersion);
  PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(archive.metadata.size()));
  out += archive.metadata;
  PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(archive.tensors.size()));
  for (const NamedTensor& t : archive.tensors) {
    PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    const auto shape = t.tensor.shape();
    PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) PutLe<std::uint64_t>(&out, d);
  }
  PutLe<std::uint64_t>(&out, Fnv1a64(out));
  const std::size_t payload_start = out.size();
  for (const NamedTensor& t : archive.tensors) {
    for (double v : t.tensor.values()) PutLe<std::uint64_t>(&out, std::bit_cast<std::uint64_t>(v));
  }
  PutLe<std::uint64_t>(&out, Fnv1a64(std::string_view(out).substr(payload_start)));
  return out;
}

TensorArchive DecodeArchive(std::string_view bytes) {
  Reader r(bytes);
  if (r.Take(kMagic.size()) != kMagic) throw CheckpointError("bad checkpoint magic");
  const auto version = r.Get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  TensorArchive archive;
  const auto meta_len = r.Get<std::uint32_t>();
  archive.metadata = std::string(r.Take(meta_len));
  const auto count = r.Get<std::uint32_t>();
  std::vector<std::vector<std::size_t>> shapes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.Get<std::uint32_t>();
    NamedTensor t;
    t.name = std::string(r.Take(name_len));
    const auto rank = r.Get<std::uint32_t>();
    if (rank < 1 || rank > 2) throw CheckpointError("bad tensor rank in checkpoint");
    std::vector<std::size_t> shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.Get<std::uint64_t>());
    shapes.push_back(shape);
    archive.tensors.push_back(std::move(t));
  }
  const std::size_t header_end = r.pos();
  const auto header_sum = r.Get<std::uint64_t>();
  if (header_sum != Fnv1a64(bytes.substr(0, header_end))) {
    throw CheckpointError("checkpoint header checksum mismatch");
  }
  const std::size_t payload_start = r.pos();
  for (std::size_t i = 0; i < archive.tensors.size(); ++i) {
    std::size_t n = 1;
    for (std::size_t d : shapes[i]) n *= d;
    if (n > r.remaining() / 8) throw CheckpointError("checkpoint truncated");
    Tensor t = Tensor::FromShape(shapes[i]);
    for (double& v : t.values()) v = std::bit_cast<double>(r.Get<std::uint64_t>());
    archive.tensors[i].tensor = std::move(t);
  }
  const std::size_t payload_end = r.pos();
  const auto payload_sum = r.Get<std::uint64_t>();
  if (payload_sum != Fnv1a64(bytes.substr(payload_start, payload_end - payload_start))) {
    throw CheckpointError("checkpoint payload checksum mismatch");
  }
  if (r.remaining() != 0) throw CheckpointError("trailing bytes after checkpoint");
  return archive;
}

void SaveArchive(const std::string& path, const TensorArchive& archive) {
  const std::string bytes = EncodeArchive(archive);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("short write to checkpoint '" + path + "'");
}

TensorArchive LoadArchive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return DecodeArchive(buf.str());
}

TensorArchive ArchiveFromParams(const ParamStore& params, std::string metadata) {
  TensorArchive archive{std::move(metadata), {}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    archive.tensors.push_back({params.at(i).name, params.at(i).value});
  }
  return archive;
}

void RestoreParams(const TensorArchive& archive, ParamStore& params) {
  if (archive.tensors.size() != params.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(archive.tensors.size()) +
                          " tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const NamedTensor& t = archive.tensors[i];
    const Parameter& p = params.at(i);
    if (t.name != p.name || t.tensor.shape() != p.value.shape()) {
      throw CheckpointError("checkpoint tensor '" + t.name + "' " +
                            ShapeString(t.tensor.shape()) + " does not match '" +
                            p.name + "' " + ShapeString(p.value.shape()));
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    params.at(i).value = archive.tensors[i].tensor;
  }
}

}  // namespace selfgen
