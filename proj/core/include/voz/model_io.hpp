#pragma once

#include <filesystem>

#include "voz/hmm.hpp"

namespace voz {

/// Versioned structured-text model format; doubles are written with enough
/// digits to round-trip exactly, so identical training runs produce
/// byte-identical files.
void save_model_set(const ModelSet& models, const std::filesystem::path& path);
ModelSet load_model_set(const std::filesystem::path& path);

}  // namespace voz
