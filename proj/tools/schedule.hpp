#pragma once

// Flat "key = value" run configuration files ('#' starts a comment).
//
// Monte Carlo schedule keys:
//   stage = <steps> <kT>                          appended in file order
//   ramp = <kT_first> <kT_last> <stages> <steps>  geometric, appended in file order
//   sigma_kappa, sigma_tau, measure_every, kappa_only, seed
//
// Theta scan keys:
//   lengths = <N> <N> ...   kT = <kT> <kT> ...   (or kT_ramp = <first> <last> <count>)
//   steps_per_point, measure_every, burn_in, sigma_kappa, sigma_tau, threads, seed

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kinkfold/dynamics.hpp"

namespace kinkfold::cli {

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

std::vector<KeyValue> parse_key_values(std::string_view text);

// Unknown keys throw SchemaError; `seed_set` reports whether the file named a seed.
MCConfig parse_mc_schedule(std::string_view text, bool* seed_set = nullptr);
ThetaScanConfig parse_theta_config(std::string_view text, bool* seed_set = nullptr);

}  // namespace kinkfold::cli
