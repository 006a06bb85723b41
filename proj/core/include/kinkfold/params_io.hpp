#pragma once

// Parameter files. A flat JSON object holds one coupling set:
//
//   {"lambda": 1.0, "m": 1.5, "a": 0.1, "b": 0.0, "c": 1.0, "d": 0.0}
//
// A segment file maps inclusive residue ranges to coupling sets:
//
//   {"segments": [{"first": 6, "last": 18, "params": {...}}, ...]}
//
// Residue r is bond-angle site r - index_offset of the profile it is applied to.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kinkfold/energy.hpp"

namespace kinkfold {

struct Segment {
  std::size_t begin = 0;  // first site
  std::size_t end = 0;    // one past the last site
  EnergyParams params;
};

// Throws InvalidArgument unless the segments tile [0, sites) in order.
void check_partition(const std::vector<Segment>& segments, std::size_t sites);

ParamMap param_map_from_segments(const std::vector<Segment>& segments, std::size_t sites);

EnergyParams parse_energy_params(std::string_view json_text);
std::string format_energy_params(const EnergyParams& params);

// Accepts either a flat coupling set (one segment covering every site) or a segment file.
// With require_params false, segments may omit "params" and get EnergyParams{}.
std::vector<Segment> parse_segments(std::string_view json_text, std::size_t sites,
                                    int index_offset, bool require_params = true);
// `meta_json` is embedded verbatim under "meta" when non-empty.
std::string format_segments(const std::vector<Segment>& segments, int index_offset,
                            const std::string& meta_json = {});

}  // namespace kinkfold
