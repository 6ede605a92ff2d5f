#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "expu/channel.hpp"
#include "expu/ensembles.hpp"
#include "expu/exponents.hpp"
#include "expu/expurgation.hpp"
#include "expu/stats.hpp"

namespace expu {

/// Which rate enters the threshold E_ex - delta. Mother uses
/// log2(M'_n - 1) / n, the rate seen by the M'_n - 1 competitors of a codeword
/// in the union bound; Nominal uses the configured rate.
enum class RateConvention { Nominal, Mother };

enum class EnsembleType { Iid, ConstantComposition };

struct ExperimentConfig {
  std::string channel_path;
  std::optional<Channel> channel;  // takes precedence over channel_path
  InputDistribution q = InputDistribution::uniform(2);
  double rate = 0.05;
  double eps = 0.1;
  double eps1 = 0.05;
  GammaKind gamma = GammaKind::sqrt_exp();
  std::vector<std::size_t> n_grid;
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 1;
  Method method = Method::UnionBound;
  double rho_max = kDefaultRhoMax;
  RateConvention rate_convention = RateConvention::Mother;
  EnsembleType kind = EnsembleType::Iid;
  // Mother code of 2 M_n - 1 codewords instead of ceil(M_n (1 + eps)).
  bool classical_mother = false;

  /// Throws InvalidConfig on violated invariants.
  void validate() const;
  Channel resolve_channel() const;

  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  nlohmann::json to_json() const;
};

/// Everything about one block length that does not depend on the trial.
struct BlockContext {
  std::size_t n = 0;
  EnsembleSpec spec;
  double threshold_rate = 0.0;
  ExponentSolution solution;
  Schedule sched;
  double threshold = 0.0;  // e_ex - delta
  std::uint64_t block_seed = 0;
};

BlockContext prepare_block(const ExperimentConfig& cfg, const Channel& ch, const BhattMatrix& bm, std::size_t n);

/// Master seed used for block length n: trials at different n draw from
/// unrelated streams.
std::uint64_t block_seed(std::uint64_t master_seed, std::size_t n);

struct TrialRecord {
  std::uint64_t trial_id = 0;
  TrialCensus census;
  std::vector<double> exponents;
};

TrialRecord run_trial(const BlockContext& ctx, const ExperimentConfig& cfg, const Channel& ch, const BhattMatrix& bm,
                      std::uint64_t trial_id);
TrialCensus run_trial(const ExperimentConfig& cfg, std::size_t n, std::uint64_t trial_id);

/// Worker count from EXPU_THREADS, else hardware concurrency.
std::size_t worker_count();

struct TrialBlock {
  BlockContext ctx;
  std::vector<TrialRecord> trials;  // ordered by trial_id
};

/// Runs cfg.trials trials at block length n on `threads` workers (0 = worker_count()).
TrialBlock run_block(const ExperimentConfig& cfg, std::size_t n, std::size_t threads = 0);

struct LemmaReport {
  double lemma_rate;
  double lemma_bound;
  std::uint64_t samples;
};
LemmaReport lemma1_report(const TrialBlock& block);
LemmaReport lemma1_report(const ExperimentConfig& cfg, std::size_t n);

struct MeanPhiReport {
  double mean_phi;
  double bound;  // M'_n (1 - 1/gamma_n)
  double se;     // standard error of mean_phi
};
MeanPhiReport mean_phi_report(const TrialBlock& block);
MeanPhiReport mean_phi_report(const ExperimentConfig& cfg, std::size_t n);

struct Histogram {
  std::vector<double> edges;          // bins + 1 ascending edges; threshold is one of them
  std::vector<std::uint64_t> counts;  // finite exponents; a value equal to an edge goes to the lower bin
  std::uint64_t overflow = 0;         // +inf exponents
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double e_ex = 0.0;
  double delta = 0.0;
  double threshold = 0.0;
};

/// Pooled histogram of per-codeword exponents. The lower floor(bins/2) bins
/// cover [min, threshold], the rest (threshold, max].
Histogram concentration_histogram(const TrialBlock& block, std::size_t bins);
Histogram concentration_histogram(const ExperimentConfig& cfg, std::size_t n, std::size_t bins);

struct ContractCheck {
  std::string name;
  std::size_t n;
  double observed;
  double bound;
  double slack;  // allowed statistical slack (4 standard errors)
  bool ok;
};

struct BlockResult {
  std::size_t n = 0;
  std::uint64_t m_n = 0;
  std::uint64_t m_prime = 0;
  double rho_hat = 0.0;
  double e_ex = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double threshold = 0.0;
  std::uint64_t passes = 0;
  double p_hat = 0.0;
  Interval wilson_ci{0.0, 0.0};
  double mean_phi = 0.0;
  double mean_psi = 0.0;
  double mean_phi_se = 0.0;
  double lemma_rate = 0.0;
  double lemma_bound = 0.0;
  double theorem_bound = 0.0;
  double psi_tail_rate = 0.0;
  double psi_tail_bound = 0.0;
  std::optional<std::uint64_t> n0;
};

struct ExperimentResult {
  std::uint64_t trials = 0;
  std::vector<BlockResult> blocks;
  std::vector<ContractCheck> checks;

  bool all_ok() const;
};

ExperimentResult summarize(const ExperimentConfig& cfg, const std::vector<TrialBlock>& blocks);
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 0);

std::string to_csv(const ExperimentResult& result);
nlohmann::json to_json(const ExperimentResult& result);
nlohmann::json to_json(const TrialCensus& census);

/// Creates a fresh run directory under `out_dir` holding config.json,
/// results.csv and summary.json; returns its path.
std::filesystem::path write_run(const std::filesystem::path& out_dir, const ExperimentConfig& cfg,
                                const ExperimentResult& result);

}  // namespace expu
