#include "hdflip/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include "hdflip/combine.hpp"
#include "hdflip/errors.hpp"
#include "hdflip/multisplit.hpp"
#include "hdflip/rng.hpp"
#include "hdflip/selection.hpp"

namespace hdflip {

namespace {

constexpr std::uint64_t kPlacementTag = 0x9c;
constexpr double kDefaultGammaMin = 0.05;

std::vector<int> active_positions(const ExperimentConfig& config,
                                  std::uint64_t rep_seed) {
  std::vector<int> positions(static_cast<std::size_t>(config.m1));
  if (!config.randomize_active) {
    for (int i = 0; i < config.m1; ++i) positions[static_cast<std::size_t>(i)] = i;
    return positions;
  }
  // Random m1-subset, drawn by partial Fisher-Yates on 0..m-1.
  Rng rng(derive_seed(rep_seed, kPlacementTag));
  std::vector<int> all(static_cast<std::size_t>(config.m));
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  for (int i = 0; i < config.m1; ++i) {
    const std::size_t pick = i + static_cast<std::size_t>(rng.below(all.size() - i));
    std::swap(all[static_cast<std::size_t>(i)], all[pick]);
    positions[static_cast<std::size_t>(i)] = all[static_cast<std::size_t>(i)];
  }
  std::sort(positions.begin(), positions.end());
  return positions;
}

Vector beta_at_positions(Index m, const std::vector<int>& positions,
                         BetaStrength strength) {
  Vector beta = Vector::Zero(m);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    beta(positions[i]) =
        strength == BetaStrength::Uniform ? 1.0 : static_cast<double>(i + 1);
  }
  return beta;
}

Selector build_selector(const ExperimentConfig& config,
                        const std::vector<int>& active) {
  if (config.selector == SelectorKind::Oracle) {
    return make_oracle_selector(active, config.m1);
  }
  // Lasso, calibrated to select 2*m1 variables; with no signal estimate
  // (m1 = 0) it selects as many as the per-split capacity allows.
  const int target = config.m1 > 0 ? 2 * config.m1
                                   : static_cast<int>(config.n);  // clamped later
  return make_lasso_selector(target);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 4) throw Error(ErrorCode::InvalidConfig, "need n >= 4");
  if (m < 1) throw Error(ErrorCode::InvalidConfig, "need m >= 1");
  if (m1 < 0 || m1 > m) {
    throw Error(ErrorCode::InvalidConfig, "need 0 <= m1 <= m");
  }
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorCode::InvalidRho, "need 0 <= rho < 1");
  }
  if (!(snr > 0.0)) throw Error(ErrorCode::InvalidConfig, "need snr > 0");
  if (Q < 1) throw Error(ErrorCode::InvalidConfig, "need Q >= 1");
  if (B < 1) throw Error(ErrorCode::InvalidB, "need B >= 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "need 0 <= alpha < 1");
  }
  if (replications < 1) {
    throw Error(ErrorCode::InvalidConfig, "need replications >= 1");
  }
  if (selector == SelectorKind::Oracle && m1 > 0 && 4 * m1 > n) {
    // The oracle picks 2*m1 variables; keep within the sparsity cap.
    throw Error(ErrorCode::CapacityExceeded,
                "oracle selection of 2*m1 variables needs 2*m1 <= n/2");
  }
}

Matrix gen_toeplitz_design(Index n, Index m, double rho, std::uint64_t seed) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorCode::InvalidRho,
                "need 0 <= rho < 1, got " + std::to_string(rho));
  }
  Rng rng(derive_seed(seed, stream::kDesign));
  Matrix X(n, m);
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    for (Index j = 1; j < m; ++j)
      X(i, j) = rho * X(i, j - 1) + innovation * rng.normal();
  }
  return X;
}

Vector make_beta(Index m, int m1, BetaStrength strength) {
  if (m1 < 0 || static_cast<Index>(m1) > m) {
    throw Error(ErrorCode::InvalidConfig, "need 0 <= m1 <= m");
  }
  Vector beta = Vector::Zero(m);
  for (int i = 0; i < m1; ++i)
    beta(i) = strength == BetaStrength::Uniform ? 1.0 : static_cast<double>(i + 1);
  return beta;
}

double calibrate_sigma(const Matrix& X, const Vector& beta, double snr) {
  if (!(snr > 0.0)) throw Error(ErrorCode::InvalidConfig, "need snr > 0");
  if (beta.size() != X.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "beta length != design columns");
  }
  const Vector signal = X * beta;
  const double mean = signal.mean();
  const double variance =
      (signal.array() - mean).square().sum() / static_cast<double>(signal.size());
  if (variance <= 0.0) {
    throw Error(ErrorCode::ZeroSignal,
                "signal X*beta is constant; SNR calibration undefined");
  }
  return std::sqrt(variance / snr);
}

Vector gen_response(const Matrix& X, const Vector& beta, double sigma,
                    std::uint64_t seed) {
  if (beta.size() != X.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "beta length != design columns");
  }
  Rng rng(derive_seed(seed, stream::kNoise));
  Vector Y = X * beta;
  for (Index i = 0; i < Y.size(); ++i) Y(i) += sigma * rng.normal();
  return Y;
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const RunOptions& options,
                                const DesignData* fixed_design) {
  config.validate();
  if (fixed_design &&
      (fixed_design->n() != config.n || fixed_design->m() != config.m)) {
    throw Error(ErrorCode::DimensionMismatch,
                "fixed design shape disagrees with config n/m");
  }

  const auto start = std::chrono::steady_clock::now();
  const int R = config.replications;
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(R));

  auto run_replication = [&](int rep) {
    ReplicationRecord& record = records[static_cast<std::size_t>(rep)];
    const std::uint64_t rep_seed =
        derive_seed(config.seed, stream::kReplication,
                    static_cast<std::uint64_t>(rep));

    DesignData data;
    if (fixed_design) {
      data = *fixed_design;
    } else {
      data.X = gen_toeplitz_design(config.n, config.m, config.rho, rep_seed);
    }

    const std::vector<int> active = active_positions(config, rep_seed);
    const Vector beta = beta_at_positions(config.m, active, config.strength);
    const double sigma =
        config.m1 == 0 ? 1.0 : calibrate_sigma(data.X, beta, config.snr);
    data.Y = gen_response(data.X, beta, sigma, rep_seed);

    const Selector selector = build_selector(config, active);

    std::vector<int> rejected;
    try {
      if (config.method == StatsMethod::Multisplit) {
        rejected = multisplit_run(data, config.Q, selector, config.alpha,
                                  kDefaultGammaMin, rep_seed)
                       .rejected;
      } else {
        const SplitPlan plan =
            make_splits(config.n, config.Q, selector, data, rep_seed);
        const FlipSet flips = make_flips(config.n, config.B, rep_seed);
        const StatMatrix G = config.method == StatsMethod::Exact
                                 ? exact_stats(data, plan, flips)
                                 : approx_stats(data, plan, flips);
        if (options.unadjusted) {
          for (Index j = 0; j < config.m; ++j) {
            if (flip_test(G.values.col(j).cwiseAbs(), config.alpha).reject)
              rejected.push_back(static_cast<int>(j));
          }
        } else if (config.combiner == CombinerKind::Max) {
          rejected = maxt_adjusted(G, config.alpha).rejected;
        } else {
          // Global subset test over all variables; a rejection is counted
          // once and is false only under the complete null.
          std::vector<int> all(static_cast<std::size_t>(config.m));
          for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
          if (subset_test(G, all, Combiner::sum(), config.alpha).decision.reject)
            rejected.push_back(-1);  // marker: the global hypothesis
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularGram) throw;
      record.failed = true;
      return;
    }

    for (int j : rejected) {
      ++record.rejections;
      const bool is_active =
          j >= 0 ? std::binary_search(active.begin(), active.end(), j)
                 : config.m1 > 0;  // global test: false only under full null
      if (!is_active) ++record.false_rejections;
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (int rep = 0; rep < R; ++rep) run_replication(rep);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      int rep;
      while ((rep = next.fetch_add(1)) < R) run_replication(rep);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(threads, R); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentReport report;
  report.records = std::move(records);
  int ok = 0;
  for (const ReplicationRecord& record : report.records) {
    if (record.failed) {
      ++report.failed_replications;
      continue;
    }
    ++ok;
    report.mean_rejections += record.rejections;
    if (record.false_rejections > 0) report.fwer += 1.0;
  }
  if (report.failed_replications * 100 > R) {
    throw Error(ErrorCode::SingularGram,
                std::to_string(report.failed_replications) + " of " +
                    std::to_string(R) + " replications failed (>1%)");
  }
  if (ok > 0) {
    report.mean_rejections /= ok;
    report.fwer /= ok;
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

std::string to_string(BetaStrength v) {
  return v == BetaStrength::Uniform ? "uniform" : "increasing";
}
std::string to_string(SelectorKind v) {
  return v == SelectorKind::Oracle ? "oracle" : "lasso";
}
std::string to_string(StatsMethod v) {
  switch (v) {
    case StatsMethod::Exact: return "exact";
    case StatsMethod::Approximate: return "approximate";
    case StatsMethod::Multisplit: return "multisplit";
  }
  return "unknown";
}
std::string to_string(CombinerKind v) {
  return v == CombinerKind::Max ? "max" : "sum";
}

}  // namespace hdflip
