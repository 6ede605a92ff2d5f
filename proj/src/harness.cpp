#include "expu/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "expu/error.hpp"
#include "expu/random.hpp"

namespace expu {

namespace {

constexpr double kSlackSe = 4.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

EnsembleKind ensemble_kind(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.kind == EnsembleType::Iid) return Iid{cfg.q};
  return ConstantComposition{nearest_composition(cfg.q, n)};
}

// Single-letter pmf the threshold is computed from: Q itself for i.i.d.
// codes, the realized type n_a / n for constant-composition codes.
InputDistribution threshold_distribution(const EnsembleKind& kind, std::size_t n) {
  if (const auto* iid = std::get_if<Iid>(&kind)) return iid->q;
  const auto& counts = std::get<ConstantComposition>(kind).counts;
  std::vector<double> pmf;
  for (auto c : counts) pmf.push_back(static_cast<double>(c) / static_cast<double>(n));
  // Re-normalize away the rounding of c / n so the pmf passes validation.
  double sum = 0.0;
  for (double p : pmf) sum += p;
  for (double& p : pmf) p /= sum;
  return InputDistribution(std::move(pmf));
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(eps1 > 0.0 && eps1 < eps)) fail("need 0 < eps1 < eps");
  if (trials < 1) fail("trials must be >= 1");
  if (n_grid.empty()) fail("n_grid must be nonempty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0) fail("block lengths must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) fail("n_grid must be strictly ascending");
  }
  if (!(rate >= 0.0)) fail("rate must be >= 0");
  if (!(rho_max >= 1.0)) throw Error(ErrorCode::RhoMaxTooSmall, "rho_max must be >= 1");
  if (!channel && channel_path.empty()) fail("no channel given");
}

Channel ExperimentConfig::resolve_channel() const {
  if (channel) return *channel;
  return load_channel(channel_path);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  try {
    const auto& ch = j.at("channel");
    if (ch.is_string()) {
      std::filesystem::path p = ch.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.channel_path = p.string();
    } else {
      cfg.channel = parse_channel_json(ch.dump());
    }
    const auto& q = j.at("q");
    cfg.q = q.is_string() ? InputDistribution::parse(q.get<std::string>())
                          : InputDistribution(q.get<std::vector<double>>());
    cfg.rate = j.at("rate").get<double>();
    cfg.eps = j.at("eps").get<double>();
    cfg.eps1 = j.at("eps1").get<double>();
    cfg.gamma = GammaKind::parse(j.value("gamma", std::string("sqrt-exp")));
    cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    cfg.trials = j.at("trials").get<std::uint64_t>();
    cfg.master_seed = j.value("seed", std::uint64_t{1});
    cfg.method = parse_method(j.value("method", std::string("ub")));
    cfg.rho_max = j.value("rho_max", kDefaultRhoMax);
    const std::string conv = j.value("rate_convention", std::string("mother"));
    if (conv == "mother") {
      cfg.rate_convention = RateConvention::Mother;
    } else if (conv == "nominal") {
      cfg.rate_convention = RateConvention::Nominal;
    } else {
      throw Error(ErrorCode::ParseError, "rate_convention must be mother or nominal");
    }
    const std::string kind = j.value("kind", std::string("iid"));
    if (kind == "iid") {
      cfg.kind = EnsembleType::Iid;
    } else if (kind == "cc") {
      cfg.kind = EnsembleType::ConstantComposition;
    } else {
      throw Error(ErrorCode::ParseError, "kind must be iid or cc");
    }
    cfg.classical_mother = j.value("classical_mother", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("experiment config: ") + e.what());
  }
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  if (channel) {
    std::vector<std::vector<double>> rows;
    for (std::size_t x = 0; x < channel->input_size(); ++x) {
      const auto r = channel->row(static_cast<Symbol>(x));
      rows.emplace_back(r.begin(), r.end());
    }
    j["channel"] = {{"inputs", channel->input_size()}, {"outputs", channel->output_size()}, {"matrix", rows}};
  } else {
    j["channel"] = channel_path;
  }
  j["q"] = std::vector<double>(q.pmf().begin(), q.pmf().end());
  j["rate"] = rate;
  j["eps"] = eps;
  j["eps1"] = eps1;
  j["gamma"] = gamma.to_string();
  j["n_grid"] = n_grid;
  j["trials"] = trials;
  j["seed"] = master_seed;
  j["method"] = to_string(method);
  j["rho_max"] = rho_max;
  j["rate_convention"] = rate_convention == RateConvention::Mother ? "mother" : "nominal";
  j["kind"] = kind == EnsembleType::Iid ? "iid" : "cc";
  j["classical_mother"] = classical_mother;
  return j;
}

std::uint64_t block_seed(std::uint64_t master_seed, std::size_t n) {
  return splitmix64(master_seed ^ splitmix64(0x6e2d626c6f636b00ULL + n));
}

BlockContext prepare_block(const ExperimentConfig& cfg, const Channel& ch, const BhattMatrix& bm, std::size_t n) {
  BlockContext ctx;
  ctx.n = n;
  auto kind = ensemble_kind(cfg, n);
  ctx.spec = cfg.classical_mother ? EnsembleSpec::classical(kind, n, cfg.rate)
                                  : EnsembleSpec::make(kind, n, cfg.rate, cfg.eps);
  if (ctx.spec.input_size() != ch.input_size()) {
    throw Error(ErrorCode::LengthMismatch, "input distribution and channel alphabets differ");
  }
  if (cfg.rate_convention == RateConvention::Mother) {
    const double competitors = static_cast<double>(std::max<std::uint64_t>(ctx.spec.m_prime, 2) - 1);
    ctx.threshold_rate = std::log2(competitors) / static_cast<double>(n);
  } else {
    ctx.threshold_rate = cfg.rate;
  }
  ctx.solution = optimize_rho(ctx.threshold_rate, threshold_distribution(kind, n), bm, cfg.rho_max);
  ctx.sched = schedule(n, ctx.solution.rho_hat, cfg.gamma);
  ctx.threshold = ctx.solution.e_ex - ctx.sched.delta;
  ctx.block_seed = block_seed(cfg.master_seed, n);
  return ctx;
}

TrialRecord run_trial(const BlockContext& ctx, const ExperimentConfig& cfg, const Channel& ch, const BhattMatrix& bm,
                      std::uint64_t trial_id) {
  const Codebook code = sample_codebook(ctx.spec, ctx.block_seed, trial_id);
  const auto evals = evaluate_codebook(code, ch, bm, cfg.method);
  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.census = census(evals, ctx.threshold, ctx.spec.m_n, cfg.eps1);
  rec.exponents.reserve(evals.size());
  for (const auto& e : evals) rec.exponents.push_back(e.exponent);
  return rec;
}

TrialCensus run_trial(const ExperimentConfig& cfg, std::size_t n, std::uint64_t trial_id) {
  cfg.validate();
  const Channel ch = cfg.resolve_channel();
  const BhattMatrix bm(ch);
  const auto ctx = prepare_block(cfg, ch, bm, n);
  return run_trial(ctx, cfg, ch, bm, trial_id).census;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("EXPU_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    throw Error(ErrorCode::InvalidConfig, std::string("EXPU_THREADS must be a positive integer, got ") + env);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TrialBlock run_block(const ExperimentConfig& cfg, std::size_t n, std::size_t threads) {
  cfg.validate();
  const Channel ch = cfg.resolve_channel();
  const BhattMatrix bm(ch);
  TrialBlock block;
  block.ctx = prepare_block(cfg, ch, bm, n);
  block.trials.resize(cfg.trials);

  if (threads == 0) threads = worker_count();
  threads = std::min<std::size_t>(threads, cfg.trials);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (std::uint64_t t = next++; t < cfg.trials && !failed; t = next++) {
        block.trials[t] = run_trial(block.ctx, cfg, ch, bm, t);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return block;
}

LemmaReport lemma1_report(const TrialBlock& block) {
  std::uint64_t good = 0;
  std::uint64_t total = 0;
  for (const auto& t : block.trials) {
    good += t.census.big_phi;
    total += t.census.phi.size();
  }
  return {static_cast<double>(good) / static_cast<double>(total), block.ctx.sched.lemma_bound, total};
}

LemmaReport lemma1_report(const ExperimentConfig& cfg, std::size_t n) { return lemma1_report(run_block(cfg, n)); }

MeanPhiReport mean_phi_report(const TrialBlock& block) {
  const double trials = static_cast<double>(block.trials.size());
  double sum = 0.0;
  for (const auto& t : block.trials) sum += static_cast<double>(t.census.big_phi);
  const double mean = sum / trials;
  double ss = 0.0;
  for (const auto& t : block.trials) {
    const double d = static_cast<double>(t.census.big_phi) - mean;
    ss += d * d;
  }
  const double sd = block.trials.size() > 1 ? std::sqrt(ss / (trials - 1.0)) : 0.0;
  const double bound = static_cast<double>(block.ctx.spec.m_prime) * block.ctx.sched.lemma_bound;
  return {mean, bound, sd / std::sqrt(trials)};
}

MeanPhiReport mean_phi_report(const ExperimentConfig& cfg, std::size_t n) { return mean_phi_report(run_block(cfg, n)); }

Histogram concentration_histogram(const TrialBlock& block, std::size_t bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidConfig, "histogram needs at least 2 bins");
  Histogram h;
  h.e_ex = block.ctx.solution.e_ex;
  h.delta = block.ctx.sched.delta;
  h.threshold = block.ctx.threshold;

  std::vector<double> pooled;
  for (const auto& t : block.trials) pooled.insert(pooled.end(), t.exponents.begin(), t.exponents.end());
  std::sort(pooled.begin(), pooled.end());
  h.median = sorted_quantile(pooled, 0.5);
  h.q1 = sorted_quantile(pooled, 0.25);
  h.q3 = sorted_quantile(pooled, 0.75);
  h.iqr = std::isinf(h.q3) ? kInf : h.q3 - h.q1;

  double lo = h.threshold;
  double hi = h.threshold;
  for (double e : pooled) {
    if (std::isinf(e)) continue;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const std::size_t lower_bins = bins / 2;
  const std::size_t upper_bins = bins - lower_bins;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= lower_bins; ++b) {
    h.edges[b] = lo + (h.threshold - lo) * static_cast<double>(b) / static_cast<double>(lower_bins);
  }
  for (std::size_t b = 1; b <= upper_bins; ++b) {
    h.edges[lower_bins + b] = h.threshold + (hi - h.threshold) * static_cast<double>(b) / static_cast<double>(upper_bins);
  }
  h.edges[lower_bins] = h.threshold;
  h.edges.back() = hi;

  h.counts.assign(bins, 0);
  for (double e : pooled) {
    if (std::isinf(e)) {
      ++h.overflow;
      continue;
    }
    // First bin whose upper edge is >= e; the threshold edge closes the
    // lower half so that bins [0, bins/2) hold exactly the Psi codewords.
    auto it = std::lower_bound(h.edges.begin() + 1, h.edges.end(), e);
    auto b = static_cast<std::size_t>(it - h.edges.begin()) - 1;
    if (e > h.threshold) b = std::max(b, lower_bins);
    if (e <= h.threshold) b = std::min(b, lower_bins - 1);
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

Histogram concentration_histogram(const ExperimentConfig& cfg, std::size_t n, std::size_t bins) {
  return concentration_histogram(run_block(cfg, n), bins);
}

bool ExperimentResult::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ContractCheck& c) { return c.ok; });
}

ExperimentResult summarize(const ExperimentConfig& cfg, const std::vector<TrialBlock>& blocks) {
  ExperimentResult out;
  out.trials = cfg.trials;
  std::optional<std::uint64_t> n0;
  try {
    n0 = n0_threshold(cfg.eps, cfg.eps1, cfg.gamma);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoConvergence) throw;
  }

  for (const auto& block : blocks) {
    const auto& ctx = block.ctx;
    BlockResult r;
    r.n = ctx.n;
    r.m_n = ctx.spec.m_n;
    r.m_prime = ctx.spec.m_prime;
    r.rho_hat = ctx.solution.rho_hat;
    r.e_ex = ctx.solution.e_ex;
    r.delta = ctx.sched.delta;
    r.gamma = ctx.sched.gamma;
    r.threshold = ctx.threshold;
    r.lemma_bound = ctx.sched.lemma_bound;
    r.theorem_bound = ctx.sched.theorem_bound;
    r.n0 = n0;

    const auto T = static_cast<std::uint64_t>(block.trials.size());
    const double psi_cut = static_cast<double>(r.m_n) * (1.0 + cfg.eps) * std::exp2(-0.5 * ctx.sched.log2_gamma);
    std::uint64_t psi_tail = 0;
    for (const auto& t : block.trials) {
      r.passes += t.census.pass ? 1 : 0;
      psi_tail += static_cast<double>(t.census.big_psi) > psi_cut ? 1 : 0;
    }
    r.p_hat = static_cast<double>(r.passes) / static_cast<double>(T);
    r.wilson_ci = wilson_interval(r.passes, T);
    r.psi_tail_rate = static_cast<double>(psi_tail) / static_cast<double>(T);
    r.psi_tail_bound = std::exp2(-0.5 * ctx.sched.log2_gamma);

    const auto lemma = lemma1_report(block);
    r.lemma_rate = lemma.lemma_rate;
    const auto phi = mean_phi_report(block);
    r.mean_phi = phi.mean_phi;
    r.mean_phi_se = phi.se;
    r.mean_psi = static_cast<double>(r.m_prime) - r.mean_phi;

    auto check = [&](std::string name, double observed, double bound, double slack, bool ok) {
      out.checks.push_back({std::move(name), r.n, observed, bound, slack, ok});
    };
    const double lemma_slack = kSlackSe * binomial_se(r.lemma_bound, lemma.samples);
    check("lemma1", r.lemma_rate, r.lemma_bound, lemma_slack, r.lemma_rate >= r.lemma_bound - lemma_slack);
    const double phi_slack = kSlackSe * phi.se;
    check("mean_phi", r.mean_phi, phi.bound, phi_slack, r.mean_phi >= phi.bound - phi_slack);
    const double psi_slack = kSlackSe * binomial_se(r.psi_tail_bound, T);
    check("psi_tail", r.psi_tail_rate, r.psi_tail_bound, psi_slack, r.psi_tail_rate <= r.psi_tail_bound + psi_slack);
    if (n0 && r.n >= *n0) {
      const double thm_slack = kSlackSe * binomial_se(r.theorem_bound, T);
      check("theorem", r.p_hat, r.theorem_bound, thm_slack, r.p_hat >= r.theorem_bound - thm_slack);
    }
    if (!out.blocks.empty()) {
      const auto& prev = out.blocks.back();
      check("monotone", r.wilson_ci.hi, prev.wilson_ci.lo, 0.0, r.wilson_ci.hi >= prev.wilson_ci.lo);
    }
    out.blocks.push_back(r);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
  cfg.validate();
  std::vector<TrialBlock> blocks;
  for (std::size_t n : cfg.n_grid) blocks.push_back(run_block(cfg, n, threads));
  return summarize(cfg, blocks);
}

std::string to_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "n,m_n,m_prime,rho_hat,e_ex,delta,gamma,threshold,p_hat,ci_lo,ci_hi,mean_phi,mean_psi,"
        "lemma_rate,lemma_bound,theorem_bound,psi_tail_rate,psi_tail_bound,n0\n";
  for (const auto& r : result.blocks) {
    const double fields[] = {r.rho_hat,      r.e_ex,        r.delta,         r.gamma,         r.threshold,
                             r.p_hat,        r.wilson_ci.lo, r.wilson_ci.hi, r.mean_phi,      r.mean_psi,
                             r.lemma_rate,   r.lemma_bound, r.theorem_bound, r.psi_tail_rate, r.psi_tail_bound};
    os << r.n << ',' << r.m_n << ',' << r.m_prime;
    for (double f : fields) os << ',' << format_number(f);
    os << ',' << (r.n0 ? static_cast<long long>(*r.n0) : -1LL) << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const ExperimentResult& result) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& r : result.blocks) {
    blocks.push_back({{"n", r.n},
                      {"m_n", r.m_n},
                      {"m_prime", r.m_prime},
                      {"rho_hat", r.rho_hat},
                      {"e_ex", r.e_ex},
                      {"delta", r.delta},
                      {"gamma", number_json(r.gamma)},
                      {"threshold", r.threshold},
                      {"p_hat", r.p_hat},
                      {"wilson_ci", {r.wilson_ci.lo, r.wilson_ci.hi}},
                      {"mean_phi", r.mean_phi},
                      {"mean_psi", r.mean_psi},
                      {"lemma_rate", r.lemma_rate},
                      {"lemma_bound", r.lemma_bound},
                      {"theorem_bound", r.theorem_bound},
                      {"psi_tail_rate", r.psi_tail_rate},
                      {"psi_tail_bound", r.psi_tail_bound},
                      {"n0", r.n0 ? nlohmann::json(*r.n0) : nlohmann::json(nullptr)}});
  }
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : result.checks) {
    checks.push_back({{"name", c.name}, {"n", c.n}, {"observed", c.observed}, {"bound", c.bound},
                      {"slack", c.slack}, {"ok", c.ok}});
  }
  return {{"trials", result.trials}, {"blocks", blocks}, {"checks", checks}, {"all_ok", result.all_ok()}};
}

nlohmann::json to_json(const TrialCensus& c) {
  std::vector<int> phi(c.phi.begin(), c.phi.end());
  return {{"threshold", c.threshold}, {"phi", phi},         {"big_phi", c.big_phi}, {"big_psi", c.big_psi},
          {"m_n", c.m_n},             {"eps1", c.eps1},     {"pass", c.pass}};
}

std::filesystem::path write_run(const std::filesystem::path& out_dir, const ExperimentConfig& cfg,
                                const ExperimentResult& result) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "run-%Y%m%dT%H%M%SZ", &tm);
  std::filesystem::create_directories(out_dir);
  std::filesystem::path dir = out_dir / stamp;
  for (int k = 1; std::filesystem::exists(dir); ++k) dir = out_dir / (std::string(stamp) + "-" + std::to_string(k));
  std::filesystem::create_directory(dir);

  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + (dir / name).string());
    f << text;
  };
  write("config.json", cfg.to_json().dump(2) + "\n");
  write("results.csv", to_csv(result));
  write("summary.json", to_json(result).dump(2) + "\n");
  return dir;
}

}  // namespace expu
