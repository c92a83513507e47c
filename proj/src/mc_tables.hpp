// Copyright 2026 The wala Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace wala::mc {

// Classic 256-case marching cubes tables (Lorensen-Cline / Bourke layout).
// Corner k of a cell sits at offset ((k^(k>>1))&1, (k>>1)&1, (k>>2)&1) --
// i.e. corners 0..7 = (0,0,0),(1,0,0),(1,1,0),(0,1,0),(0,0,1),(1,0,1),
// (1,1,1),(0,1,1). Edge e connects corner_pairs[e][0] and corner_pairs[e][1].
extern const int corner_offsets[8][3];
extern const int edge_corners[12][2];
extern const std::uint16_t edge_table[256];
extern const std::int8_t tri_table[256][16];

}  // namespace wala::mc
