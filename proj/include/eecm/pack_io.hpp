#pragma once

#include <string>

#include "eecm/cell_model.hpp"

namespace eecm {

// JSON parameter-pack serialization. Schema documented in the repo README;
// data/lgm50_pack.json ships the reference values.
ParameterPack load_pack(const std::string& path);
ParameterPack pack_from_json_text(const std::string& text);
std::string pack_to_json_text(const ParameterPack& pack);
void save_pack(const ParameterPack& pack, const std::string& path);

} // namespace eecm
