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

#include "fedwelfare/checkpoint.h"

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "fedwelfare/common.h"

namespace fedwelfare {

void write_checkpoint(std::ostream& out, const ParamVector& params) {
  nlohmann::json manifest;
  manifest["format"] = "fedwelfare-checkpoint";
  manifest["version"] = 1;
  manifest["count"] = params.size();
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerSpan& s : params.layout().spans()) {
    layers.push_back({{"name", s.name},
                      {"offset", s.offset},
                      {"size", s.size},
                      {"partition",
                       s.partition == Partition::kShared ? "shared" : "local"}});
  }
  manifest["layers"] = std::move(layers);
  out << manifest.dump() << '\n';
  for (double v : params.values()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) {
      bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    out.write(bytes, 8);
  }
}

ParamVector read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw StructuralError("missing checkpoint manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("bad checkpoint manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "fedwelfare-checkpoint" ||
      manifest.value("version", 0) != 1) {
    throw StructuralError("unsupported checkpoint format");
  }
  std::vector<LayerSpan> spans;
  for (const auto& l : manifest.at("layers")) {
    const std::string part = l.at("partition").get<std::string>();
    if (part != "shared" && part != "local") {
      throw StructuralError("unknown partition '" + part + "'");
    }
    spans.push_back({l.at("name").get<std::string>(),
                     l.at("offset").get<std::size_t>(),
                     l.at("size").get<std::size_t>(),
                     part == "shared" ? Partition::kShared : Partition::kLocal});
  }
  ParamLayout layout(std::move(spans));
  const auto count = manifest.at("count").get<std::size_t>();
  if (count != layout.total_size()) {
    throw StructuralError("checkpoint count disagrees with its layout");
  }
  std::vector<double> values(count);
  for (double& v : values) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
      throw StructuralError("checkpoint truncated");
    }
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[b];
    v = std::bit_cast<double>(bits);
  }
  return ParamVector(std::move(layout), std::move(values));
}

}  // namespace fedwelfare
