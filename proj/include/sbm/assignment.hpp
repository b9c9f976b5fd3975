/*
Copyright 2026 The sbmthresh Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "sbm/model.hpp"

#include <vector>

namespace sbm {

struct Assignment {
    std::vector<int> column_of_row; ///< column_of_row[i] = rho(i)
    double value = 0.0;
};

/// Maximum-weight perfect matching on a square score matrix (Hungarian
/// algorithm with potentials, O(q^3)).
Assignment max_weight_assignment(const Matrix& score);

} // namespace sbm
