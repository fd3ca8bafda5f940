#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "sheafmach/section.hpp"

namespace sheafmach {

/// Line-oriented text form of a section, byte-stable and lossless.
///
///   event length=<s>                      then one "t,value" row per event
///   continuous length=<s> lipschitz=<K|none> codiscrete=<0|1> pieces=<m>
///     piece <start> <end> constant|linear|sampled n=<k>   then k "t,value" rows
///   clock length=<s> period=<s> first=<s|none>
///   product length=<s> parts=<n>           then the n parts
///
/// Times are exact decimal seconds (possibly negative for anchors outside the
/// window); values use encode_value.
void write_section(std::ostream& os, const Section& s);
std::string section_to_string(const Section& s);

/// Throws Error with a line number on malformed input.
Section read_section(std::istream& is);
Section section_from_string(const std::string& text);

}  // namespace sheafmach
