#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aggsched/occupancy.hpp"
#include "aggsched/params.hpp"
#include "aggsched/scheduling.hpp"

namespace aggsched {

enum class SimScheme { oma, rrs, crs_fixed, crs_theorem4 };

const char* to_string(SimScheme s);
SimScheme sim_scheme_from_string(const std::string& name);
bool is_crs(SimScheme s);

struct SimConfig {
  long runs = 50000;
  /// Window area is expected_aggregators / lambda_a.
  double expected_aggregators = 400.0;
  std::uint64_t seed = 1;
  SimScheme scheme = SimScheme::rrs;
  bool record_per_rank = false;
  /// crs_fixed: a = fixed_a_fraction * delta.
  double fixed_a_fraction = 0.5;
  /// 0 picks std::thread::hardware_concurrency().
  int threads = 0;

  void validate(const NetworkParams& params) const;
};

/// One snapshot of the clustered network. Aggregator 0 is the typical one at the window
/// center. Device arrays are flat; devices of aggregator c are first[c] .. first[c+1]-1.
/// Interfering clusters are already scheduled (channel, mark); the typical cluster is not.
struct Realization {
  double side = 0.0;
  std::vector<double> agg_x, agg_y;
  std::vector<long> K;
  std::vector<std::size_t> first;
  std::vector<double> dx, dy;  // offset from the own aggregator
  std::vector<double> g;       // cross fading towards the typical aggregator (interferers)
  std::vector<int> channel;    // interferers: channel used, -1 if unscheduled
  std::vector<double> mark;    // interferers: power weight
  std::vector<double> h;       // typical cluster only: fading to its own aggregator

  std::size_t aggregators() const { return K.size(); }
};

struct SirSample {
  int device = 0;
  int channel = 0;
  int j = 1;      // decode order
  int u = 1;      // devices on the channel
  int rank = 0;   // CRS rank of the channel's first occupant
  double sir = 0.0;
  bool success = false;
  double power = 0.0;  // weight * rho * r_a^alpha
};

/// Draws aggregators (Poisson(lambda_a area) around the pinned typical one), device counts,
/// offsets and cross gains, and schedules the interfering clusters. Buffers in out are reused.
void sample_realization(const NetworkParams& params, const SimConfig& config, const PowerControl* power, Rng& rng,
                        Realization& out);

/// Per-channel interference at the typical aggregator.
void channel_interference(const Realization& r, const NetworkParams& params, std::vector<double>& out);

/// SIR after SIC for every scheduled device of the typical cluster.
void evaluate_sir(const Realization& r, const Assignment& assignment, const NetworkParams& params, SimScheme scheme,
                  const std::vector<double>& interference, std::vector<SirSample>& out);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long samples = 0;
};

struct MetricReport {
  SimScheme scheme = SimScheme::rrs;
  long runs = 0;
  std::uint64_t seed = 0;
  int L = 2;
  Estimate p11, p12, p22;
  Estimate overall;
  Estimate avg_served;
  Estimate power_per_channel;
  std::vector<Estimate> occupancy;  // c_u at the typical cluster
  Estimate aggregators;             // interfering aggregators per run
  /// record_per_rank: pooled success frequency of (j,u) = (1,1), (1,2), (2,2) by rank i.
  std::vector<std::array<Estimate, 3>> per_rank;
  long nonfinite_interference = 0;
  double delta = 0.0;
};

/// Power weights of the CRS schemes (empty for oma and rrs). Fairness-rule tables cover K up to
/// max(kmax_for_tail(m_bar, 1e-12) + 10, 2N).
std::optional<PowerControl> make_power_control(const NetworkParams& params, SimScheme scheme, double fixed_a_fraction);

MetricReport estimate_metrics(const NetworkParams& params, const SimConfig& config);

enum class MarkMode { unit, fixed, uniform };

/// Simulated E[exp(-s I)] for a field of clusters with per-channel occupancy drawn from pmf
/// (L <= 2). Marks: unit (1 each), fixed (a, delta - a for pairs), uniform (a ~ U(0, delta)).
std::vector<Estimate> estimate_laplace(const NetworkParams& params, const OccupancyPMF& pmf, MarkMode marks,
                                       double fixed_a, const std::vector<double>& s_grid, long runs,
                                       std::uint64_t seed, double expected_aggregators = 400.0);

}  // namespace aggsched
