#pragma once

#include <string>
#include <vector>

#include "trajcast/nn.hpp"

namespace trajcast {

// Checkpoint file (little-endian): magic "TCKP" | version u32 = 1 |
// parameter count u32 | per parameter: name length u16 + UTF-8 name +
// rank u8 + extents u32[] + float32 values. Round-trips are bit-exact.
void save_checkpoint(const std::vector<nn::Parameter<float>*>& params,
                     const std::string& path);

// Strict: parameter order, names and shapes must match the model exactly.
void load_checkpoint(const std::vector<nn::Parameter<float>*>& params,
                     const std::string& path);

}  // namespace trajcast
