#ifndef HDFLIP_SIM_HPP
#define HDFLIP_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hdflip/hdstats.hpp"

namespace hdflip {

enum class BetaStrength { Uniform, Increasing };
enum class SelectorKind { Oracle, Lasso };
enum class StatsMethod { Exact, Approximate, Multisplit };
enum class CombinerKind { Max, Sum };

// One simulation scenario. `randomize_active` moves the active coefficients
// to a fresh random subset each replication instead of the first m1 columns.
struct ExperimentConfig {
  Index n = 100;
  Index m = 100;
  int m1 = 5;
  double rho = 0.0;
  double snr = 4.0;
  BetaStrength strength = BetaStrength::Uniform;
  int Q = 50;
  int B = 200;
  double alpha = 0.05;
  SelectorKind selector = SelectorKind::Oracle;
  int replications = 1000;
  std::uint64_t seed = 1;
  StatsMethod method = StatsMethod::Approximate;
  CombinerKind combiner = CombinerKind::Max;
  bool randomize_active = false;

  void validate() const;  // throws Error(InvalidConfig / InvalidRho)
};

struct ReplicationRecord {
  int rejections = 0;
  int false_rejections = 0;
  bool failed = false;  // singular Gram inside this replication
};

struct ExperimentReport {
  double fwer = 0.0;             // share of replications with a false rejection
  double mean_rejections = 0.0;  // mean rejection count per replication
  double wall_time_seconds = 0.0;
  int failed_replications = 0;
  std::vector<ReplicationRecord> records;
};

struct RunOptions {
  int threads = 1;
  bool unadjusted = false;  // per-variable flip tests without maxT (sanity mode)
};

// Rows i.i.d. centered Gaussian with Cov(X_j, X_h) = rho^|j-h|, realized by
// the AR(1) recursion across columns.
Matrix gen_toeplitz_design(Index n, Index m, double rho, std::uint64_t seed);

// First m1 coefficients active: all 1 (uniform) or 1..m1 (increasing).
Vector make_beta(Index m, int m1, BetaStrength strength);

// sigma = sqrt(Var(X beta) / snr), Var taken as the population variance of
// the signal entries. Throws Error(ZeroSignal) when the signal is constant.
double calibrate_sigma(const Matrix& X, const Vector& beta, double snr);

// Y = X beta + sigma * standard normal noise.
Vector gen_response(const Matrix& X, const Vector& beta, double sigma,
                    std::uint64_t seed);

// Runs `config.replications` independent replications (in parallel when
// options.threads > 1; results do not depend on the thread count), tallying
// FWER and rejection counts. When `fixed_design` is given it is held fixed
// across replications and only the response is regenerated; m1 = 0 scenarios
// use sigma = 1 since the SNR calibration is undefined without signal.
// Replications failing with a singular Gram are excluded and counted; more
// than 1% of them fails the whole run.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const RunOptions& options = {},
                                const DesignData* fixed_design = nullptr);

std::string to_string(BetaStrength v);
std::string to_string(SelectorKind v);
std::string to_string(StatsMethod v);
std::string to_string(CombinerKind v);

}  // namespace hdflip

#endif  // HDFLIP_SIM_HPP
