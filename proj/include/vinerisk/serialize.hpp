#pragma once

#include <string>

#include "vinerisk/pipeline.hpp"

namespace vinerisk {

// JSON round-trips for fitted models.  Keys are emitted sorted and doubles
// in shortest round-trip form, so serialization is deterministic and
// parse(dump(x)) reproduces x bit-for-bit.
std::string model_set_json(const AnnualModelSet& ms);
AnnualModelSet model_set_from_json(const std::string& text);

std::string yvine_json(const YVineModel& m);
YVineModel yvine_from_json(const std::string& text);

} // namespace vinerisk
