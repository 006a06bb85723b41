#include "kinkfold/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "kinkfold/errors.hpp"

namespace kinkfold {

namespace {

constexpr double kSaturation = 700.0;
// Below this many cross pairs a direct scan beats building the grid.
constexpr std::size_t kBruteForcePairs = 1024;

// Uniform grid hashed into a bucket table. Collisions only add candidates.
class CellHash {
 public:
  void build(const std::vector<Point3>& pts, std::size_t first, std::size_t last, double cell) {
    inv_cell_ = 1.0 / cell;
    std::size_t buckets = 16;
    while (buckets < 2 * (last - first)) buckets <<= 1;
    mask_ = buckets - 1;
    start_.assign(buckets + 1, 0);
    keys_.resize(last - first);
    for (std::size_t i = first; i < last; ++i) {
      keys_[i - first] = bucket(cell_of(pts[i]));
      ++start_[keys_[i - first] + 1];
    }
    for (std::size_t b = 0; b < buckets; ++b) start_[b + 1] += start_[b];
    order_.resize(last - first);
    fill_ = start_;
    for (std::size_t i = first; i < last; ++i) order_[fill_[keys_[i - first]]++] = i;
  }

  // Calls visit(j) for every stored index whose cell neighbours q's cell; stops when visit returns true.
  template <class Visit>
  bool any_near(const Point3& q, Visit&& visit) const {
    const std::array<long, 3> c = cell_of(q);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          const std::size_t b = bucket({c[0] + dx, c[1] + dy, c[2] + dz});
          for (std::size_t e = start_[b]; e < start_[b + 1]; ++e) {
            if (visit(order_[e])) return true;
          }
        }
      }
    }
    return false;
  }

 private:
  std::array<long, 3> cell_of(const Point3& p) const {
    return {static_cast<long>(std::floor(p.x() * inv_cell_)),
            static_cast<long>(std::floor(p.y() * inv_cell_)),
            static_cast<long>(std::floor(p.z() * inv_cell_))};
  }

  std::size_t bucket(const std::array<long, 3>& c) const {
    const auto h = static_cast<std::uint64_t>(c[0]) * 73856093ULL ^
                   static_cast<std::uint64_t>(c[1]) * 19349663ULL ^
                   static_cast<std::uint64_t>(c[2]) * 83492791ULL;
    return static_cast<std::size_t>(h) & mask_;
  }

  double inv_cell_ = 1.0;
  std::size_t mask_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> fill_;
  std::vector<std::size_t> keys_;
  std::vector<std::size_t> order_;
};

bool too_close(const Point3& a, const Point3& b, double min_sq) {
  return (a - b).squaredNorm() <= min_sq;
}

FrameMatrix initial_frame() {
  FrameMatrix f;
  f << 0.0, 1.0, 0.0,
      -1.0, 0.0, 0.0,
      0.0, 0.0, 1.0;
  return f;
}

}  // namespace

std::vector<ScheduleStage> geometric_schedule(double kT_first, double kT_last, std::size_t stages,
                                              std::size_t steps_per_stage) {
  if (!(kT_first > 0.0) || !(kT_last > 0.0)) throw InvalidArgument("kT must be positive");
  std::vector<ScheduleStage> out;
  if (stages == 0) return out;
  out.reserve(stages);
  const double ratio = stages > 1 ? std::log(kT_last / kT_first) / static_cast<double>(stages - 1)
                                  : 0.0;
  for (std::size_t s = 0; s < stages; ++s) {
    const double kT = s + 1 == stages ? kT_last : kT_first * std::exp(ratio * static_cast<double>(s));
    out.push_back({steps_per_stage, stages == 1 ? kT_first : kT});
  }
  return out;
}

void MCConfig::validate() const {
  for (const ScheduleStage& s : schedule) {
    if (!(s.kT > 0.0) || !std::isfinite(s.kT)) {
      throw InvalidArgument("schedule kT must be positive and finite, got " + std::to_string(s.kT));
    }
  }
  if (!(sigma_kappa > 0.0) || !std::isfinite(sigma_kappa)) {
    throw InvalidArgument("sigma_kappa must be positive");
  }
  if (!kappa_only && (!(sigma_tau > 0.0) || !std::isfinite(sigma_tau))) {
    throw InvalidArgument("sigma_tau must be positive");
  }
  if (measure_every == 0) throw InvalidArgument("measure_every must be at least 1");
}

std::size_t MCConfig::total_steps() const {
  std::size_t n = 0;
  for (const ScheduleStage& s : schedule) n += s.steps;
  return n;
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double glauber_probability(double delta_E, double kT) {
  if (!(kT > 0.0)) throw InvalidArgument("kT must be positive");
  const double z = delta_E / kT;
  if (z > kSaturation) return 0.0;
  if (z < -kSaturation) return 1.0;
  return 1.0 / (1.0 + std::exp(z));
}

bool glauber_accept(double delta_E, double kT, double u) {
  return u < glauber_probability(delta_E, kT);
}

Move draw_move(std::size_t sites, const MCConfig& config, Rng& rng) {
  Move mv;
  if (sites == 0) return mv;
  mv.site = std::uniform_int_distribution<std::size_t>(0, sites - 1)(rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  mv.d_kappa = config.sigma_kappa * gauss(rng);
  if (!config.kappa_only) mv.d_tau = config.sigma_tau * gauss(rng);
  return mv;
}

AngleProfile apply_move(const AngleProfile& profile, const Move& move) {
  AngleProfile out = profile;
  if (move.site >= out.kappa.size()) {
    throw IndexOutOfRange("move site " + std::to_string(move.site) + " outside " +
                          std::to_string(out.kappa.size()) + " sites");
  }
  out.kappa[move.site] = wrap_angle(out.kappa[move.site] + move.d_kappa);
  if (move.site > 0) out.tau[move.site - 1] = wrap_angle(out.tau[move.site - 1] + move.d_tau);
  return out;
}

Proposal propose_move(const AngleProfile& profile, const MCConfig& config, Rng& rng) {
  if (profile.kappa.empty()) return {profile, 0};
  const Move mv = draw_move(profile.sites(), config, rng);
  return {apply_move(profile, mv), mv.site};
}

bool self_avoidance_ok(const CalphaChain& chain, double min_distance) {
  const std::size_t n = chain.size();
  if (n <= 2) return true;
  const double min_sq = min_distance * min_distance;
  CellHash grid;
  grid.build(chain.vertices, 0, n, min_distance);
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& q = chain.vertices[i];
    const bool clash = grid.any_near(q, [&](std::size_t j) {
      return j >= i + 2 && too_close(q, chain.vertices[j], min_sq);
    });
    if (clash) return false;
  }
  return true;
}

bool self_avoidance_ok_across(const std::vector<Point3>& vertices, std::size_t split,
                              double min_distance) {
  const std::size_t n = vertices.size();
  if (split == 0 || split >= n) return true;
  const double min_sq = min_distance * min_distance;
  if (split * (n - split) <= kBruteForcePairs) {
    for (std::size_t i = 0; i < split; ++i) {
      for (std::size_t j = std::max(split, i + 2); j < n; ++j) {
        if (too_close(vertices[i], vertices[j], min_sq)) return false;
      }
    }
    return true;
  }
  thread_local CellHash grid;
  // Hash the smaller side, query with the other.
  const bool hash_upstream = split <= n - split;
  const std::size_t h0 = hash_upstream ? 0 : split;
  const std::size_t h1 = hash_upstream ? split : n;
  const std::size_t q0 = hash_upstream ? split : 0;
  const std::size_t q1 = hash_upstream ? n : split;
  grid.build(vertices, h0, h1, min_distance);
  for (std::size_t i = q0; i < q1; ++i) {
    const Point3& q = vertices[i];
    const bool clash = grid.any_near(q, [&](std::size_t j) {
      const std::size_t gap = i > j ? i - j : j - i;
      return gap >= 2 && too_close(q, vertices[j], min_sq);
    });
    if (clash) return false;
  }
  return true;
}

McState::McState(const AngleProfile& profile, ParamMap params, bool kappa_only)
    : params_(std::move(params)), kappa_only_(kappa_only) {
  check_profile_shape(profile);
  if (profile.has_phases()) throw InvalidArgument("Monte Carlo needs a Frenet-gauge profile");
  if (profile.bond_lengths.empty()) throw InsufficientData("Monte Carlo needs at least one bond");
  const std::size_t m = profile.sites();
  params_.check_covers(m);

  kappa_ = profile.kappa;
  site_tau_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    site_tau_[k] = kappa_only_ || k == 0 ? torsion_of_kappa(kappa_[k], params_.at(k))
                                         : profile.tau[k - 1];
  }
  bond_lengths_ = profile.bond_lengths;
  index_offset_ = profile.index_offset;

  frames_.assign(m + 1, initial_frame());
  chain_.vertices.assign(m + 2, Point3::Zero());
  chain_.vertices[1] = bond_lengths_[0] * frames_[0].row(2).transpose();
  scratch_frames_ = frames_;
  scratch_vertices_ = chain_.vertices;
  transfers_.resize(m);
  for (std::size_t k = 0; k < m; ++k) transfers_[k] = transfer(k);
  if (m > 0) rebuild_from(0, transfers_[0], frames_, chain_.vertices);
  scratch_frames_ = frames_;
  scratch_vertices_ = chain_.vertices;
  resync_energy();
}

AngleProfile McState::profile() const {
  AngleProfile p;
  p.kappa = kappa_;
  if (site_tau_.size() > 1) {
    p.tau.reserve(site_tau_.size() - 1);
    for (std::size_t k = 1; k < site_tau_.size(); ++k) p.tau.push_back(wrap_angle(site_tau_[k]));
  }
  p.bond_lengths = bond_lengths_;
  p.index_offset = index_offset_;
  return p;
}

void McState::resync_energy() {
  energy_ = total_energy(kappa_, site_tau_, params_, Boundary::VirtualZero);
}

double McState::local_energy(std::size_t site, double kappa, double tau) const {
  const double prev = site > 0 ? kappa_[site - 1] : 0.0;
  const double next = site + 1 < kappa_.size() ? kappa_[site + 1] : 0.0;
  const double a = kappa - prev;
  const double b = next - kappa;
  return a * a + b * b + site_energy(kappa, tau, params_.at(site));
}

FrameMatrix McState::transfer(std::size_t site) const {
  return transfer_matrix(kappa_[site], site == 0 ? 0.0 : site_tau_[site]);
}

void McState::rebuild_from(std::size_t site, const FrameMatrix& moved,
                           std::vector<FrameMatrix>& frames, std::vector<Point3>& vertices) const {
  for (std::size_t j = site; j < kappa_.size(); ++j) {
    frames[j + 1] = (j == site ? moved : transfers_[j]) * frames[j];
    vertices[j + 2] = vertices[j + 1] + bond_lengths_[j + 1] * frames[j + 1].row(2).transpose();
  }
}

bool McState::step(double kT, const MCConfig& config, Rng& rng) {
  ++proposed_;
  const std::size_t m = kappa_.size();
  if (m == 0) return false;
  const Move mv = draw_move(m, config, rng);
  const std::size_t k = mv.site;

  const double old_kappa = kappa_[k];
  const double old_tau = site_tau_[k];
  const double new_kappa = wrap_angle(old_kappa + mv.d_kappa);
  const double new_tau = kappa_only_ ? torsion_of_kappa(new_kappa, params_.at(k))
                                     : wrap_angle(old_tau + mv.d_tau);
  const double delta_E = local_energy(k, new_kappa, new_tau) - local_energy(k, old_kappa, old_tau);

  kappa_[k] = new_kappa;
  site_tau_[k] = new_tau;
  const FrameMatrix moved = transfer(k);
  rebuild_from(k, moved, scratch_frames_, scratch_vertices_);

  bool accept = self_avoidance_ok_across(scratch_vertices_, k + 2);
  if (accept) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    accept = glauber_accept(delta_E, kT, u);
  }
  if (accept) {
    std::copy(scratch_frames_.begin() + static_cast<long>(k) + 1, scratch_frames_.end(),
              frames_.begin() + static_cast<long>(k) + 1);
    std::copy(scratch_vertices_.begin() + static_cast<long>(k) + 2, scratch_vertices_.end(),
              chain_.vertices.begin() + static_cast<long>(k) + 2);
    transfers_[k] = moved;
    energy_ += delta_E;
    ++accepted_;
    assert(self_avoidance_ok(chain_));
  } else {
    kappa_[k] = old_kappa;
    site_tau_[k] = old_tau;
    std::copy(frames_.begin() + static_cast<long>(k) + 1, frames_.end(),
              scratch_frames_.begin() + static_cast<long>(k) + 1);
    std::copy(chain_.vertices.begin() + static_cast<long>(k) + 2, chain_.vertices.end(),
              scratch_vertices_.begin() + static_cast<long>(k) + 2);
  }
  return accept;
}

Trajectory run_schedule(const AngleProfile& initial, const ParamMap& params, const MCConfig& config,
                        const std::optional<CalphaChain>& reference) {
  config.validate();
  McState state(initial, params, config.kappa_only);
  if (!self_avoidance_ok(state.chain())) {
    throw InvalidArgument("initial chain violates self-avoidance");
  }
  if (reference && reference->size() != state.chain().size()) {
    throw LengthMismatch("reference has " + std::to_string(reference->size()) +
                         " vertices, chain has " + std::to_string(state.chain().size()));
  }

  Rng rng(config.seed);
  Trajectory traj;
  std::size_t window_proposed = 0;
  std::size_t window_accepted = 0;
  auto sample = [&](std::size_t step, double kT) {
    state.resync_energy();
    TrajectorySample s;
    s.step = step;
    s.kT = kT;
    s.energy = state.energy();
    s.rg = radius_of_gyration(state.chain());
    s.rmsd = reference ? rmsd(*reference, state.chain()) : std::numeric_limits<double>::quiet_NaN();
    s.acceptance = window_proposed > 0 ? static_cast<double>(window_accepted) /
                                             static_cast<double>(window_proposed)
                                       : 0.0;
    traj.samples.push_back(s);
    window_proposed = 0;
    window_accepted = 0;
  };

  sample(0, config.schedule.empty() ? 0.0 : config.schedule.front().kT);
  std::size_t step = 0;
  double last_kT = 0.0;
  for (const ScheduleStage& stage : config.schedule) {
    last_kT = stage.kT;
    for (std::size_t s = 0; s < stage.steps; ++s) {
      if (state.step(stage.kT, config, rng)) ++window_accepted;
      ++window_proposed;
      ++step;
      if (step % config.measure_every == 0) sample(step, stage.kT);
    }
  }
  if (traj.samples.back().step != step) sample(step, last_kT);

  traj.final_profile = state.profile();
  traj.final_chain = state.chain();
  return traj;
}

double debye_waller(double b_factor) {
  if (!(b_factor >= 0.0)) {
    throw InvalidArgument("B-factor must be non-negative, got " + std::to_string(b_factor));
  }
  return std::sqrt(b_factor / (8.0 * kPi * kPi));
}

}  // namespace kinkfold
