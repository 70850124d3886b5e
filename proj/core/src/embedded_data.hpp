#pragma once

#include <string_view>
#include <vector>

namespace modkin::detail {

struct EmbeddedFile {
  std::string_view name;
  std::string_view contents;
};

const std::vector<EmbeddedFile>& embedded_presets();
const std::vector<EmbeddedFile>& embedded_topologies();

}  // namespace modkin::detail
