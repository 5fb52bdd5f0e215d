#ifndef SADDLESCOPE_RESULT_IO_HPP
#define SADDLESCOPE_RESULT_IO_HPP

#include <string>

#include "saddlescope/normal_form.hpp"

namespace saddlescope {

// JSON round trip for normal form results: kappa tables keyed by exponent
// tuples, generator term lists, M row-major.  Doubles are emitted with
// shortest round-trip precision, so parse(serialize(r)) is bit-exact.
std::string serialize_normal_form(const NormalFormResult& result);
NormalFormResult parse_normal_form(const std::string& json_text);

}  // namespace saddlescope

#endif
