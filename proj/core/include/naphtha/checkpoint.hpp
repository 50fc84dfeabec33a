#pragma once

#include <cstdint>
#include <string>

#include "naphtha/model.hpp"

namespace naphtha {

// Little-endian binary checkpoint:
//   magic "NAPHCKP1", version u32, fingerprint 32 bytes, seed u64,
//   meta u32 length + bytes (flat key=value text),
//   has_optimizer u8,
//   tensor count u32, then per tensor: name u32+bytes, rank u32,
//   dims u64 each, raw f64 values
//   [optimizer: per group u32+name + step i64, then m and v tensors
//    in the same order as the values].
// Saving the same state twice produces byte-identical files.

struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::string config_echo; // key=value lines, round-tripped verbatim
    bool has_optimizer_state = false;
};

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& path);

// Verifies the fingerprint against the target model before accepting any
// tensor bytes and checks every length against the declared shapes.
CheckpointMeta load_checkpoint(Model& model, const std::string& path);

// Reads only the header metadata (for report tooling).
CheckpointMeta peek_checkpoint(const std::string& path);

} // namespace naphtha
