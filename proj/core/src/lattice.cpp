// Copyright 2026 The lswlattice Authors
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

#include "lsw/lattice.hpp"

namespace lsw {

RealSeq abs_sq(const ComplexSeq& u) {
  RealSeq out(u.radius());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::norm(u[i]);
  return out;
}

}  // namespace lsw
