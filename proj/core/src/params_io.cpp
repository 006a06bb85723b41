#include "kinkfold/params_io.hpp"

#include <json.hpp>

#include "kinkfold/errors.hpp"

namespace kinkfold {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
}

double require_number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw SchemaError(std::string("missing numeric field '") + key + "'");
  }
  return it->get<double>();
}

EnergyParams params_from_json(const json& obj) {
  if (!obj.is_object()) throw SchemaError("coupling set must be a JSON object");
  EnergyParams p;
  p.lambda = require_number(obj, "lambda");
  p.m = require_number(obj, "m");
  p.a = require_number(obj, "a");
  p.b = require_number(obj, "b");
  p.c = require_number(obj, "c");
  p.d = require_number(obj, "d");
  p.validate();
  return p;
}

json params_to_json(const EnergyParams& p) {
  // keys come out sorted
  return json{{"lambda", p.lambda}, {"m", p.m}, {"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}};
}

}  // namespace

void check_partition(const std::vector<Segment>& segments, std::size_t sites) {
  if (segments.empty()) throw InvalidArgument("no segments given");
  std::size_t expected = 0;
  for (const Segment& s : segments) {
    if (s.begin != expected || s.end <= s.begin) {
      throw InvalidArgument("segments must tile the profile contiguously without gaps; segment [" +
                            std::to_string(s.begin) + ", " + std::to_string(s.end) +
                            ") breaks the tiling at site " + std::to_string(expected));
    }
    expected = s.end;
  }
  if (expected != sites) {
    throw InvalidArgument("segments cover " + std::to_string(expected) + " sites, profile has " +
                          std::to_string(sites));
  }
}

ParamMap param_map_from_segments(const std::vector<Segment>& segments, std::size_t sites) {
  check_partition(segments, sites);
  if (segments.size() == 1) return ParamMap(segments.front().params);
  std::vector<EnergyParams> per_site;
  per_site.reserve(sites);
  for (const Segment& s : segments) per_site.insert(per_site.end(), s.end - s.begin, s.params);
  return ParamMap(std::move(per_site));
}

EnergyParams parse_energy_params(std::string_view json_text) {
  return params_from_json(parse_json(json_text));
}

std::string format_energy_params(const EnergyParams& params) {
  return params_to_json(params).dump(2) + "\n";
}

std::vector<Segment> parse_segments(std::string_view json_text, std::size_t sites,
                                    int index_offset, bool require_params) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) throw SchemaError("parameter file must be a JSON object");
  const auto it = doc.find("segments");
  if (it == doc.end()) return {Segment{0, sites, params_from_json(doc)}};
  if (!it->is_array()) throw SchemaError("'segments' must be an array");

  std::vector<Segment> segments;
  for (const json& entry : *it) {
    if (!entry.is_object()) throw SchemaError("segment entries must be objects");
    const auto first = entry.find("first");
    const auto last = entry.find("last");
    if (first == entry.end() || last == entry.end() || !first->is_number_integer() ||
        !last->is_number_integer()) {
      throw SchemaError("segment needs integer 'first' and 'last' residues");
    }
    const long begin = first->get<long>() - index_offset;
    const long end = last->get<long>() - index_offset + 1;
    if (begin < 0 || end <= begin) {
      throw SchemaError("segment residues " + std::to_string(first->get<long>()) + ".." +
                        std::to_string(last->get<long>()) + " fall outside the profile");
    }
    const auto params = entry.find("params");
    if (params == entry.end() && require_params) throw SchemaError("segment is missing 'params'");
    segments.push_back(Segment{static_cast<std::size_t>(begin), static_cast<std::size_t>(end),
                               params == entry.end() ? EnergyParams{} : params_from_json(*params)});
  }
  check_partition(segments, sites);
  return segments;
}

std::string format_segments(const std::vector<Segment>& segments, int index_offset,
                            const std::string& meta_json) {
  json doc;
  if (!meta_json.empty()) doc["meta"] = json::parse(meta_json);
  json arr = json::array();
  for (const Segment& s : segments) {
    arr.push_back(json{{"first", static_cast<long>(s.begin) + index_offset},
                       {"last", static_cast<long>(s.end) - 1 + index_offset},
                       {"params", params_to_json(s.params)}});
  }
  doc["segments"] = std::move(arr);
  return doc.dump(2) + "\n";
}

}  // namespace kinkfold
