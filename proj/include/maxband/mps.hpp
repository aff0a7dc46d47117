#pragma once

#include <filesystem>
#include <string>

#include "maxband/model.hpp"

namespace maxband {

// Free-format MPS with OBJSENSE MAX, an INTORG/INTEND marker block, and a
// BOUNDS section. Coefficients are printed with 17 significant digits so an
// external solver sees bit-identical doubles.
std::string model_to_mps(const MilpModel& model, const std::string& name);

void write_mps(const MilpModel& model, const std::string& name,
               const std::filesystem::path& path);

}  // namespace maxband
