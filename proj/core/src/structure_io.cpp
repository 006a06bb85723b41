#include "kinkfold/structure_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "kinkfold/errors.hpp"

namespace kinkfold {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Columns are 1-based and inclusive, as printed in the format description.
std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - first + 1);
}

char column(std::string_view line, std::size_t col) {
  return line.size() >= col ? line[col - 1] : ' ';
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

bool parse_int(std::string_view text, int& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string record_name(std::string_view line) { return std::string(trim(columns(line, 1, 6))); }

bool better_alternate(const PdbRecord& candidate, const PdbRecord& current) {
  if (candidate.occupancy != current.occupancy) return candidate.occupancy > current.occupancy;
  return candidate.alt_loc < current.alt_loc;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

}  // namespace

PdbRecord parse_atom_record(std::string_view line, std::size_t line_number) {
  if (line.size() < 54) {
    throw MalformedRecord(line_number, "coordinate record shorter than 54 columns");
  }
  PdbRecord r;
  r.record = record_name(line);
  if (r.record != "ATOM" && r.record != "HETATM") {
    throw MalformedRecord(line_number, "not an ATOM or HETATM record");
  }
  const std::string_view serial = trim(columns(line, 7, 11));
  // Serial numbers past 99999 are written in hybrid notation by some tools; only the
  // purely numeric form is interpreted.
  if (!serial.empty() && !parse_int(serial, r.serial)) r.serial = 0;
  r.atom_name = std::string(trim(columns(line, 13, 16)));
  r.alt_loc = column(line, 17);
  r.res_name = std::string(trim(columns(line, 18, 20)));
  r.chain_id = column(line, 22);
  if (!parse_int(columns(line, 23, 26), r.res_seq)) {
    throw MalformedRecord(line_number, "residue number in columns 23-26 is not an integer");
  }
  r.insertion_code = column(line, 27);
  double xyz[3];
  static constexpr std::size_t kStart[3] = {31, 39, 47};
  for (int a = 0; a < 3; ++a) {
    if (!parse_double(columns(line, kStart[a], kStart[a] + 7), xyz[a])) {
      throw MalformedRecord(line_number, std::string("coordinate ") + "xyz"[a] +
                                             " in columns " + std::to_string(kStart[a]) + "-" +
                                             std::to_string(kStart[a] + 7) + " is not a number");
    }
  }
  r.position = Point3(xyz[0], xyz[1], xyz[2]);
  const std::string_view occ = trim(columns(line, 55, 60));
  if (!occ.empty() && !parse_double(occ, r.occupancy)) {
    throw MalformedRecord(line_number, "occupancy in columns 55-60 is not a number");
  }
  const std::string_view bfac = trim(columns(line, 61, 66));
  if (!bfac.empty() && !parse_double(bfac, r.b_factor)) {
    throw MalformedRecord(line_number, "B-factor in columns 61-66 is not a number");
  }
  return r;
}

const CalphaChain& CalphaParse::longest() const {
  if (fragments.empty()) throw NoAtoms("no fragments");
  std::size_t best = 0;
  for (std::size_t i = 1; i < fragments.size(); ++i) {
    if (fragments[i].size() > fragments[best].size()) best = i;
  }
  return fragments[best];
}

CalphaParse parse_calpha(std::string_view pdb_text, const PdbOptions& options) {
  if (options.model == 0) throw InvalidArgument("model numbers start at 1");

  using Key = std::pair<int, char>;
  std::map<char, std::map<Key, PdbRecord>> by_chain;
  std::vector<char> chain_order;
  std::size_t model = 1;
  bool seen_model = false;
  bool any_ca = false;

  const std::vector<std::string_view> lines = split_lines(pdb_text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t line_number = i + 1;
    if (starts_with(line, "MODEL")) {
      if (seen_model) ++model;
      seen_model = true;
      continue;
    }
    if (trim(line) == "END") break;
    if (!starts_with(line, "ATOM") && !starts_with(line, "HETATM")) continue;
    const std::string name = record_name(line);
    if (name != "ATOM" && name != "HETATM") continue;

    PdbRecord r = parse_atom_record(line, line_number);
    if (r.record != "ATOM" || r.atom_name != "CA") continue;
    any_ca = true;
    if (model != options.model) continue;
    if (options.chain && r.chain_id != *options.chain) continue;

    auto [chain_it, inserted_chain] = by_chain.try_emplace(r.chain_id);
    if (inserted_chain) chain_order.push_back(r.chain_id);
    const Key key{r.res_seq, r.insertion_code};
    auto it = chain_it->second.find(key);
    if (it == chain_it->second.end()) {
      chain_it->second.emplace(key, std::move(r));
    } else if (better_alternate(r, it->second)) {
      it->second = std::move(r);
    }
  }

  if (!any_ca) throw NoAtoms("no CA atoms in input");
  if (by_chain.empty()) {
    if (options.chain) {
      throw NoSuchChain("chain '" + std::string(1, *options.chain) + "' has no CA atoms in model " +
                        std::to_string(options.model));
    }
    throw NoSuchChain("model " + std::to_string(options.model) + " has no CA atoms");
  }

  CalphaParse out;
  out.chain_id = chain_order.front();
  const std::map<Key, PdbRecord>& residues = by_chain.at(out.chain_id);

  CalphaChain current;
  double gap = 0.0;
  auto flush = [&]() {
    if (current.empty()) return;
    FragmentInfo info;
    info.first_residue = current.residue_numbers.front();
    info.last_residue = current.residue_numbers.back();
    info.residues = current.size();
    info.gap_before = gap;
    out.report.push_back(info);
    out.fragments.push_back(std::move(current));
    current = CalphaChain{};
  };

  for (const auto& [key, r] : residues) {
    if (!current.empty()) {
      const double d = (r.position - current.vertices.back()).norm();
      if (d > options.gap_distance) {
        flush();
        gap = d;
      }
    }
    const bool cis = r.res_name == "PRO" && !current.empty() &&
                     (r.position - current.vertices.back()).norm() < options.cis_distance;
    current.vertices.push_back(r.position);
    current.residue_labels.push_back(r.res_name);
    current.residue_numbers.push_back(r.res_seq);
    current.b_factors.push_back(r.b_factor);
    current.cis_flags.push_back(cis);
  }
  flush();
  return out;
}

CalphaChain select_residues(const CalphaChain& chain, int first, int last) {
  if (chain.residue_numbers.size() != chain.size()) {
    throw InvalidArgument("chain carries no residue numbers");
  }
  CalphaChain out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const int r = chain.residue_numbers[i];
    if (r < first || r > last) continue;
    out.vertices.push_back(chain.vertices[i]);
    out.residue_numbers.push_back(r);
    if (chain.residue_labels.size() == chain.size()) {
      out.residue_labels.push_back(chain.residue_labels[i]);
    }
    if (chain.b_factors.size() == chain.size()) out.b_factors.push_back(chain.b_factors[i]);
    if (chain.cis_flags.size() == chain.size()) {
      // A cis flag describes the bond to the previous residue, which may have been cut away.
      out.cis_flags.push_back(out.vertices.size() > 1 && chain.cis_flags[i]);
    }
  }
  if (out.empty()) {
    throw IndexOutOfRange("no residues numbered " + std::to_string(first) + ".." +
                          std::to_string(last));
  }
  return out;
}

std::string write_chain(const CalphaChain& chain, char chain_id,
                        const std::vector<std::string>& remarks) {
  std::string out;
  for (const std::string& r : remarks) out += "REMARK 999 " + r + "\n";
  if (chain.size() > 99999) throw InvalidArgument("too many atoms for the PDB serial column");
  char buf[96];
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Point3& p = chain.vertices[i];
    for (int a = 0; a < 3; ++a) {
      if (!(p[a] > -999.9995 && p[a] < 9999.9995)) {
        throw InvalidArgument("coordinate " + std::to_string(p[a]) + " of vertex " +
                              std::to_string(i) + " does not fit the PDB columns");
      }
    }
    const int res_seq = chain.residue_numbers.size() == chain.size()
                            ? chain.residue_numbers[i]
                            : static_cast<int>(i) + 1;
    if (res_seq < -999 || res_seq > 9999) {
      throw InvalidArgument("residue number " + std::to_string(res_seq) + " does not fit");
    }
    std::string name = chain.residue_labels.size() == chain.size() ? chain.residue_labels[i] : "GLY";
    if (name.empty() || name.size() > 3) name = "UNK";
    const double b = chain.b_factors.size() == chain.size() ? chain.b_factors[i] : 0.0;
    if (!(b > -99.995 && b < 999.995)) {
      throw InvalidArgument("B-factor " + std::to_string(b) + " does not fit");
    }
    std::snprintf(buf, sizeof buf,
                  "ATOM  %5zu  CA  %3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f           C  \n", i + 1,
                  name.c_str(), chain_id, res_seq, p.x(), p.y(), p.z(), 1.0, b);
    out += buf;
  }
  out += "TER\nEND\n";
  return out;
}

std::string format_header(const HeaderEntries& entries) {
  std::string out;
  for (const auto& [key, value] : entries) out += "# " + key + ": " + value + "\n";
  return out;
}

std::string profile_to_csv(const AngleProfile& profile, const HeaderEntries& header) {
  check_profile_shape(profile);
  std::string out = format_header(header);
  out += "index,kappa_rad,tau_rad,bond_length_A";
  if (profile.has_phases()) out += ",kappa_phase_rad";
  out += "\n";
  const std::size_t m = profile.sites();
  for (std::size_t k = 0; k < profile.bond_lengths.size(); ++k) {
    out += std::to_string(static_cast<long>(k) + profile.index_offset) + ",";
    if (k < m) out += format_number(profile.kappa[k]);
    out += ",";
    if (k >= 1 && k < m) out += format_number(profile.tau[k - 1]);
    out += "," + format_number(profile.bond_lengths[k]);
    if (profile.has_phases()) {
      out += ",";
      if (k < m) out += format_number(profile.kappa_phase[k]);
    }
    out += "\n";
  }
  return out;
}

AngleProfile profile_from_csv(std::string_view text) {
  AngleProfile p;
  bool header_seen = false;
  bool phases = false;
  std::vector<std::vector<std::string_view>> rows;
  const std::vector<std::string_view> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line == "index,kappa_rad,tau_rad,bond_length_A") {
        phases = false;
      } else if (line == "index,kappa_rad,tau_rad,bond_length_A,kappa_phase_rad") {
        phases = true;
      } else {
        throw SchemaError("line " + std::to_string(i + 1) + ": unexpected profile CSV header");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> cells = split_csv(line);
    if (cells.size() != (phases ? 5U : 4U)) {
      throw SchemaError("line " + std::to_string(i + 1) + ": expected " +
                        std::to_string(phases ? 5 : 4) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  if (!header_seen) throw SchemaError("profile CSV has no header row");
  if (rows.empty()) return p;

  const std::size_t m = rows.size() - 1;
  auto number = [](std::string_view cell, std::size_t row, const char* what) {
    double v;
    if (!parse_double(cell, v)) {
      throw SchemaError("row " + std::to_string(row) + ": " + what + " is not a number");
    }
    return v;
  };
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    int index;
    if (!parse_int(r[0], index)) throw SchemaError("row " + std::to_string(k) + ": bad index");
    if (k == 0) {
      p.index_offset = index;
    } else if (index != p.index_offset + static_cast<int>(k)) {
      throw SchemaError("row " + std::to_string(k) + ": indices must be consecutive");
    }
    const bool want_kappa = k < m;
    const bool want_tau = k >= 1 && k < m;
    if (r[1].empty() == want_kappa) {
      throw SchemaError("row " + std::to_string(k) + ": kappa_rad must be " +
                        (want_kappa ? "present" : "empty"));
    }
    if (r[2].empty() == want_tau) {
      throw SchemaError("row " + std::to_string(k) + ": tau_rad must be " +
                        (want_tau ? "present" : "empty"));
    }
    if (want_kappa) p.kappa.push_back(number(r[1], k, "kappa_rad"));
    if (want_tau) p.tau.push_back(number(r[2], k, "tau_rad"));
    p.bond_lengths.push_back(number(r[3], k, "bond_length_A"));
    if (phases) {
      if (r[4].empty() == want_kappa) {
        throw SchemaError("row " + std::to_string(k) + ": kappa_phase_rad must be " +
                          (want_kappa ? "present" : "empty"));
      }
      if (want_kappa) p.kappa_phase.push_back(number(r[4], k, "kappa_phase_rad"));
    }
  }
  return p;
}

std::string profile_to_json(const AngleProfile& profile, const HeaderEntries& meta) {
  check_profile_shape(profile);
  nlohmann::ordered_json doc;
  if (!meta.empty()) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [key, value] : meta) m[key] = value;
    doc["meta"] = std::move(m);
  }
  doc["index_offset"] = profile.index_offset;
  doc["kappa"] = profile.kappa;
  doc["tau"] = profile.tau;
  doc["bond_lengths"] = profile.bond_lengths;
  if (profile.has_phases()) doc["kappa_phase"] = profile.kappa_phase;
  return doc.dump(2) + "\n";
}

AngleProfile profile_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("profile JSON must be an object");
  auto numbers = [&](const char* key, bool required) {
    std::vector<double> out;
    const auto it = doc.find(key);
    if (it == doc.end()) {
      if (required) throw SchemaError(std::string("missing array '") + key + "'");
      return out;
    }
    if (!it->is_array()) throw SchemaError(std::string("'") + key + "' must be an array");
    for (const auto& v : *it) {
      if (!v.is_number()) throw SchemaError(std::string("'") + key + "' holds a non-number");
      out.push_back(v.get<double>());
    }
    return out;
  };
  AngleProfile p;
  p.kappa = numbers("kappa", true);
  p.tau = numbers("tau", true);
  p.bond_lengths = numbers("bond_lengths", true);
  p.kappa_phase = numbers("kappa_phase", false);
  const auto off = doc.find("index_offset");
  if (off == doc.end() || !off->is_number_integer()) {
    throw SchemaError("missing integer 'index_offset'");
  }
  p.index_offset = off->get<int>();
  try {
    check_profile_shape(p);
  } catch (const InconsistentLengths& e) {
    throw SchemaError(e.what());
  }
  return p;
}

std::string trajectory_to_csv(const Trajectory& trajectory, const HeaderEntries& header) {
  std::string out = format_header(header);
  out += "step,kT,energy,Rg_A,rmsd_A,acceptance\n";
  for (const TrajectorySample& s : trajectory.samples) {
    out += std::to_string(s.step) + "," + format_number(s.kT) + "," + format_number(s.energy) +
           "," + format_number(s.rg) + "," + format_number(s.rmsd) + "," +
           format_number(s.acceptance) + "\n";
  }
  return out;
}

}  // namespace kinkfold
