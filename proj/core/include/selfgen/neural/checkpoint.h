#ifndef SELFGEN_NEURAL_CHECKPOINT_H_
#define SELFGEN_NEURAL_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfgen/neural/param_store.h"
#include "selfgen/neural/tensor.h"

namespace selfgen {

// Binary tensor container. All integers little-endian.
//
//   offset  field
//   0       magic "SGTENSOR" (8 bytes)
//   8       u32 format version (kCheckpointVersion)
//   12      u32 metadata byte length M, then M bytes of UTF-8 text
//           u32 tensor count T
//           T x { u32 name length, name bytes, u32 rank, rank x u64 dim }
//           u64 FNV-1a 64 of every header byte above
//           payload: for each tensor in manifest order, its values as
//           IEEE-754 binary64 little-endian, row-major
//           u64 FNV-1a 64 of the payload bytes
//
// Nothing may follow the payload checksum.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct TensorArchive {
  std::string metadata;
  std::vector<NamedTensor> tensors;
};

std::string EncodeArchive(const TensorArchive& archive);
// Throws CheckpointError on any mismatch: magic, version, checksums,
// truncation, trailing bytes.
TensorArchive DecodeArchive(std::string_view bytes);

void SaveArchive(const std::string& path, const TensorArchive& archive);
TensorArchive LoadArchive(const std::string& path);

TensorArchive ArchiveFromParams(const ParamStore& params, std::string metadata);
// Copies archive tensors into `params`. Names, order and shapes must match
// exactly; on mismatch nothing is modified.
void RestoreParams(const TensorArchive& archive, ParamStore& params);

std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace selfgen

#endif  // SELFGEN_NEURAL_CHECKPOINT_H_
