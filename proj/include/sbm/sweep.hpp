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

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sbm {

using Row = nlohmann::ordered_json;

struct Dataset {
    Row provenance;
    std::vector<Row> rows;
};

std::string fnv1a_hex(const std::string& bytes);

/// Config: {"master_seed": s, "experiments": [{"type": ..., ...}, ...]}.
Dataset run_sweep(const nlohmann::json& config);
Dataset run_sweep_file(const std::string& path);

void write_json(std::ostream& os, const Dataset& ds);
void write_csv(std::ostream& os, const Dataset& ds);

/// JSON number, or the strings "inf" / "-inf" / "nan".
Row ext_number(double x);

} // namespace sbm
