// model_io.hpp - Trained-compensator persistence.
//
// Models are stored as versioned JSON: degrees, memory shifts, the basis
// order tag ("graded-lex") for the Volterra coefficient layout, and the
// coefficient arrays (real for Volterra and kernel weights plus support
// rows, interleaved re/im for the complex memory polynomial).

#pragma once

#include "dpod/compensation.hpp"

#include <map>

namespace dpod {

void save_models(const std::map<std::string, Compensator>& models, const std::string& path);

std::map<std::string, Compensator> load_models(const std::string& path);

}  // namespace dpod
