// Copyright 2026 The fedwelfare Authors
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

#ifndef FEDWELFARE_CHECKPOINT_H_
#define FEDWELFARE_CHECKPOINT_H_

#include <iosfwd>

#include "fedwelfare/param_vector.h"

namespace fedwelfare {

// Checkpoint format: one line of JSON describing the layout
//   {"format":"fedwelfare-checkpoint","version":1,"count":N,
//    "layers":[{"name":..,"offset":..,"size":..,"partition":"shared"},..]}
// followed by N little-endian IEEE-754 binary64 values.
void write_checkpoint(std::ostream& out, const ParamVector& params);
ParamVector read_checkpoint(std::istream& in);

}  // namespace fedwelfare

#endif  // FEDWELFARE_CHECKPOINT_H_
