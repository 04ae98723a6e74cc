#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mcslam::nn {

// One named parameter block scheduled for save/load. shape is recorded in
// the file and verified on load; its product must equal data->size().
struct ParamRef {
    std::string name;
    std::vector<double>* data = nullptr;
    std::vector<std::uint32_t> shape;
};

std::uint64_t fnv1a64(std::string_view s);

// Binary layout: magic "MCNCKPT\0", u32 version, u64 arch hash, u64 step,
// u32 block count, then per block: u32 name length, name bytes, u32 ndims,
// u32 dims, doubles. All integers and doubles little-endian.
void save_checkpoint(const std::string& path, std::uint64_t arch_hash, std::uint64_t step,
                     const std::vector<ParamRef>& refs);

// Fills the referenced blocks and returns the stored step. Throws when the
// file is unreadable, the architecture hash differs, or any block's
// name/shape does not match the refs in order.
std::uint64_t load_checkpoint(const std::string& path, std::uint64_t arch_hash,
                              const std::vector<ParamRef>& refs);

}  // namespace mcslam::nn
