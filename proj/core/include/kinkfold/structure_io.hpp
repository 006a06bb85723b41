#pragma once

// PDB Cα ingestion, minimal PDB output and the profile / trajectory file formats.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kinkfold/dynamics.hpp"
#include "kinkfold/geometry.hpp"

namespace kinkfold {

struct PdbRecord {
  std::string record;  // "ATOM" or "HETATM"
  int serial = 0;
  std::string atom_name;  // trimmed
  char alt_loc = ' ';
  std::string res_name;   // trimmed
  char chain_id = ' ';
  int res_seq = 0;
  char insertion_code = ' ';
  Point3 position = Point3::Zero();
  double occupancy = 1.0;  // 1 when the column is absent
  double b_factor = 0.0;   // 0 when the column is absent
};

// Fixed-column ATOM/HETATM line. Throws MalformedRecord(line_number).
PdbRecord parse_atom_record(std::string_view line, std::size_t line_number);

struct PdbOptions {
  std::optional<char> chain;  // first chain of the model when unset
  std::size_t model = 1;      // 1-based position among MODEL blocks
  double gap_distance = 4.2;  // Å; longer Cα-Cα steps split fragments
  double cis_distance = 3.2;  // Å; PRO closer than this to its predecessor is cis
};

struct FragmentInfo {
  int first_residue = 0;
  int last_residue = 0;
  std::size_t residues = 0;
  double gap_before = 0.0;  // Å from the previous fragment's last Cα; 0 for the first
};

struct CalphaParse {
  char chain_id = ' ';
  std::vector<CalphaChain> fragments;
  std::vector<FragmentInfo> report;

  // Longest fragment, the earliest one on ties.
  const CalphaChain& longest() const;
};

// CA atoms of one chain of one model, one per residue ordered by (res_seq, iCode).
// Alternate locations resolve to the highest occupancy, ties to the earliest letter.
// Throws NoAtoms, NoSuchChain or MalformedRecord.
CalphaParse parse_calpha(std::string_view pdb_text, const PdbOptions& options = {});

// Inclusive residue-number window of a chain; throws IndexOutOfRange if it selects nothing.
CalphaChain select_residues(const CalphaChain& chain, int first, int last);

// ATOM records for the CA trace, then TER and END. Each remark becomes a REMARK line.
std::string write_chain(const CalphaChain& chain, char chain_id = 'A',
                        const std::vector<std::string>& remarks = {});

using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

// "# key: value" lines.
std::string format_header(const HeaderEntries& entries);

// One row per bond index k = 0..M: index (k + index_offset), kappa_rad, tau_rad,
// bond_length_A, plus kappa_phase_rad for gauged profiles. Cells without a value are empty.
std::string profile_to_csv(const AngleProfile& profile, const HeaderEntries& header = {});
AngleProfile profile_from_csv(std::string_view text);

// Lossless JSON with an optional "meta" object.
std::string profile_to_json(const AngleProfile& profile, const HeaderEntries& meta = {});
AngleProfile profile_from_json(std::string_view text);

// Columns step, kT, energy, Rg_A, rmsd_A, acceptance.
std::string trajectory_to_csv(const Trajectory& trajectory, const HeaderEntries& header = {});

}  // namespace kinkfold
