// ticks.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>

namespace zreval {

// Times are seconds in the data model, but every comparison that can flip a
// decision (segment overlap, the edge-inclusion rule, interval arithmetic)
// runs on integer ticks of 0.1 ms. Values read back from decimal text then
// never change an outcome through float noise.
using Ticks = std::int64_t;

inline constexpr double kTicksPerSecond = 10000.0;

inline Ticks to_ticks(double seconds) {
  return std::llround(seconds * kTicksPerSecond);
}

inline double from_ticks(Ticks t) {
  return static_cast<double>(t) / kTicksPerSecond;
}

inline bool time_eq(double a, double b) { return to_ticks(a) == to_ticks(b); }
inline bool time_lt(double a, double b) { return to_ticks(a) < to_ticks(b); }
inline bool time_le(double a, double b) { return to_ticks(a) <= to_ticks(b); }

}  // namespace zreval
