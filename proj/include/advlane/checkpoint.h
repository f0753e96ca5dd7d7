#ifndef ADVLANE_CHECKPOINT_H_
#define ADVLANE_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "advlane/policy.h"

namespace advlane {

// Policy checkpoint, little-endian binary, version 1:
//
//   offset  size        field
//   0       8           magic "ADVLPOL\0"
//   8       4  u32      format version (1)
//   12      4  u32      input_dim
//   16      4  u32      output_dim
//   20      4  u32      number of hidden layers H
//   24      4*H u32     hidden widths
//   ...     f64[]       per layer in order: weight (row-major, out x in), bias
//   ...     f64[out]    log_std
//   ...     f64[out]    action_low
//   ...     f64[out]    action_high
//   end-8   8  u64      FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(const std::string& file, std::uint64_t offset, const std::string& reason);
  const std::string& file() const { return file_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::string file_;
  std::uint64_t offset_;
};

std::vector<unsigned char> SerializePolicy(const GaussianPolicy& policy);
// `name` is only used in error messages.
GaussianPolicy DeserializePolicy(const std::vector<unsigned char>& bytes,
                                 const std::string& name);

void SavePolicy(const std::filesystem::path& path, const GaussianPolicy& policy);
GaussianPolicy LoadPolicy(const std::filesystem::path& path);

}  // namespace advlane

#endif  // ADVLANE_CHECKPOINT_H_
