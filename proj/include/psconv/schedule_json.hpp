#pragma once

#include <string>

#include "psconv/patterns.hpp"

namespace psconv {

/// {"k":3,"kss":1,"kvs":8,"period":8,"eta":1,"seed":42,"variants":[[[r,c],...],...]}
/// Variants are written out explicitly so archived schedules do not depend on
/// the generator.
std::string schedule_to_json(const PatternSchedule& s);

/// Parses and validates a schedule document.
PatternSchedule schedule_from_json(const std::string& text);

}  // namespace psconv
