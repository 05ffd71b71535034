#pragma once

#include <string_view>

// Default data files compiled into the library (see data/).
namespace nora::assets {

std::string_view nlu_rules();
std::string_view templates();

/// Word list data/lexicon/<name>.txt, or an empty view if there is none.
std::string_view lexicon(std::string_view name);

}  // namespace nora::assets
