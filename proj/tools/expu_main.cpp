// expu: expurgated-exponent calculator and Monte-Carlo expurgation experiments.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "expu/error.hpp"
#include "expu/harness.hpp"
#include "expu/kernels.hpp"

namespace {

using namespace expu;

std::vector<double> parse_rates(const std::string& text) {
  std::vector<double> rates;
  const auto first = text.find(':');
  if (first == std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) rates.push_back(std::stod(item));
    return rates;
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) throw Error(ErrorCode::ParseError, "rates must be start:stop:step or a list");
  const double start = std::stod(text.substr(0, first));
  const double stop = std::stod(text.substr(first + 1, second - first - 1));
  const double step = std::stod(text.substr(second + 1));
  if (!(step > 0.0) || stop < start) throw Error(ErrorCode::ParseError, "bad rate range " + text);
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) rates.push_back(start + static_cast<double>(i) * step);
  return rates;
}

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json exponent_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

// Flags shared by sample / trial / exact-check.
struct CodeArgs {
  std::string channel;
  std::string q;
  double rate = 0.05;
  std::size_t n = 20;
  double eps = 0.1;
  double eps1 = 0.05;
  std::string gamma = "sqrt-exp";
  std::string kind = "iid";
  std::string method = "ub";
  std::string convention = "mother";
  double rho_max = kDefaultRhoMax;
  std::uint64_t seed = 1;
  std::uint64_t trial = 0;

  void add_to(CLI::App* app, bool census_flags) {
    app->add_option("--channel", channel, "Channel JSON file")->required();
    app->add_option("--q", q, "Input distribution, e.g. 0.5,0.5 (default uniform)");
    app->add_option("--rate", rate, "Rate in bits per channel use");
    app->add_option("--n", n, "Block length");
    app->add_option("--eps", eps, "Mother-code oversizing epsilon");
    app->add_option("--kind", kind, "Ensemble: iid or cc")->check(CLI::IsMember({"iid", "cc"}));
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--trial", trial, "Trial id");
    if (census_flags) {
      app->add_option("--eps1", eps1, "Theorem slack epsilon_1 (0 < eps1 < eps)");
      app->add_option("--gamma", gamma, "sqrt-exp, poly:k or fixed:g");
      app->add_option("--method", method, "ub or exact")->check(CLI::IsMember({"ub", "exact"}));
      app->add_option("--rate-convention", convention, "mother or nominal")
          ->check(CLI::IsMember({"mother", "nominal"}));
      app->add_option("--rho-max", rho_max, "Upper end of the rho search");
    }
  }

  ExperimentConfig config() const {
    ExperimentConfig cfg;
    cfg.channel = load_channel(channel);
    cfg.q = q.empty() ? InputDistribution::uniform(cfg.channel->input_size()) : InputDistribution::parse(q);
    cfg.rate = rate;
    cfg.eps = eps;
    cfg.eps1 = eps1;
    cfg.gamma = GammaKind::parse(gamma);
    cfg.n_grid = {n};
    cfg.trials = 1;
    cfg.master_seed = seed;
    cfg.method = parse_method(method);
    cfg.rho_max = rho_max;
    cfg.rate_convention = convention == "mother" ? RateConvention::Mother : RateConvention::Nominal;
    cfg.kind = kind == "iid" ? EnsembleType::Iid : EnsembleType::ConstantComposition;
    return cfg;
  }
};

nlohmann::json context_json(const BlockContext& ctx) {
  return {{"n", ctx.n},
          {"rate", ctx.spec.rate},
          {"m_n", ctx.spec.m_n},
          {"m_prime", ctx.spec.m_prime},
          {"threshold_rate", ctx.threshold_rate},
          {"rho_hat", ctx.solution.rho_hat},
          {"e_ex", ctx.solution.e_ex},
          {"capped", ctx.solution.capped},
          {"delta", ctx.sched.delta},
          {"gamma", exponent_json(ctx.sched.gamma)},
          {"threshold", ctx.threshold}};
}

Codebook draw(const ExperimentConfig& cfg, const BlockContext& ctx, std::uint64_t trial) {
  return sample_codebook(ctx.spec, ctx.block_seed, trial);
}

int cmd_exponents(const std::string& channel_path, const std::string& q_text, const std::string& rates_text,
                  double rho_max, const std::string& gamma) {
  GammaKind::parse(gamma);  // validated for interface symmetry; the CSV has no schedule columns
  const Channel ch = load_channel(channel_path);
  const BhattMatrix bm(ch);
  const auto q = q_text.empty() ? InputDistribution::uniform(ch.input_size()) : InputDistribution::parse(q_text);
  std::cout << "rate,rho_star_rc,e_r,rho_hat,e_ex,capped\n";
  for (double rate : parse_rates(rates_text)) {
    const auto rc = random_coding_exponent(rate, q, ch);
    const auto ex = optimize_rho(rate, q, bm, rho_max);
    std::cout << fmt(rate) << ',' << fmt(rc.rho_star) << ',' << fmt(rc.e_r) << ',' << fmt(ex.rho_hat) << ','
              << fmt(ex.e_ex) << ',' << (ex.capped ? "true" : "false") << '\n';
  }
  return 0;
}

int cmd_sample(const CodeArgs& args) {
  auto cfg = args.config();
  cfg.eps1 = cfg.eps / 2;
  const Channel ch = cfg.resolve_channel();
  const BhattMatrix bm(ch);
  const auto ctx = prepare_block(cfg, ch, bm, args.n);
  const auto code = draw(cfg, ctx, args.trial);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t m = 0; m < code.size(); ++m) {
    const auto r = code.row(m);
    rows.push_back(std::vector<Symbol>(r.begin(), r.end()));
  }
  nlohmann::json out = {{"n", args.n},           {"rate", args.rate}, {"eps", args.eps},
                        {"kind", args.kind},     {"m_n", code.spec().m_n}, {"m_prime", code.spec().m_prime},
                        {"seed", args.seed},     {"trial", args.trial}, {"rows", rows}};
  if (const auto* cc = std::get_if<ConstantComposition>(&code.spec().kind)) out["composition"] = cc->counts;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_trial(const CodeArgs& args) {
  const auto cfg = args.config();
  cfg.validate();
  const Channel ch = cfg.resolve_channel();
  const BhattMatrix bm(ch);
  const auto ctx = prepare_block(cfg, ch, bm, args.n);
  const auto code = draw(cfg, ctx, args.trial);
  const auto evals = evaluate_codebook(code, ch, bm, cfg.method);
  const auto c = census(evals, ctx.threshold, ctx.spec.m_n, cfg.eps1);
  nlohmann::json codewords = nlohmann::json::array();
  for (const auto& e : evals) {
    nlohmann::json item = {{"m", e.m}, {"pe_bound", e.pe_bound}, {"exponent", exponent_json(e.exponent)}};
    if (e.pe_exact) item["pe_exact"] = *e.pe_exact;
    codewords.push_back(item);
  }
  const auto kept = expurgate(code, evals, ctx.spec.m_n);
  nlohmann::json out = {{"context", context_json(ctx)},
                        {"method", args.method},
                        {"seed", args.seed},
                        {"trial", args.trial},
                        {"census", to_json(c)},
                        {"good_mother_code", is_good_mother_code(c)},
                        {"expurgated", {{"kept", kept.kept},
                                        {"min_exponent", exponent_json(kept.min_exponent)},
                                        {"achieved_rate", kept.achieved_rate}}},
                        {"codewords", codewords}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_exact_check(const CodeArgs& args) {
  auto cfg = args.config();
  cfg.eps1 = cfg.eps / 2;
  const Channel ch = cfg.resolve_channel();
  const BhattMatrix bm(ch);
  const auto ctx = prepare_block(cfg, ch, bm, args.n);
  const auto code = draw(cfg, ctx, args.trial);
  const auto evals = evaluate_codebook(code, ch, bm, Method::ExactMl);
  double max_ratio = 0.0;
  std::size_t violations = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : evals) {
    const double exact = *e.pe_exact;
    if (exact > e.pe_bound + 1e-12) ++violations;
    const double ratio = e.pe_bound > 0.0 ? exact / e.pe_bound : 0.0;
    max_ratio = std::max(max_ratio, ratio);
    rows.push_back({{"m", e.m},
                    {"pe_exact", exact},
                    {"pe_bound", e.pe_bound},
                    {"exponent_exact", exponent_json(e.exponent)},
                    {"exponent_ub", exponent_json(codeword_exponent(e.pe_bound, args.n))}});
  }
  nlohmann::json out = {{"context", context_json(ctx)}, {"max_ratio", max_ratio},
                        {"violations", violations},     {"codewords", rows}};
  std::cout << out.dump(2) << '\n';
  return violations == 0 ? 0 : 1;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  const auto cfg = ExperimentConfig::from_json(j, std::filesystem::path(config_path).parent_path());
  cfg.validate();
  const auto result = run_experiment(cfg);
  std::cout << to_csv(result);
  for (const auto& c : result.checks) {
    std::cerr << (c.ok ? "ok   " : "FAIL ") << c.name << " n=" << c.n << " observed=" << fmt(c.observed)
              << " bound=" << fmt(c.bound) << " slack=" << fmt(c.slack) << '\n';
  }
  if (!out_dir.empty()) std::cerr << "wrote " << write_run(out_dir, cfg, result).string() << '\n';
  return result.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expurgated error exponents and Monte-Carlo expurgation experiments"};
  app.require_subcommand(1);
  app.add_flag_callback("--kernel-info", [] {
    std::cout << "active kernel: " << kernels::to_string(kernels::active_backend()) << '\n';
    std::exit(0);
  }, "Print the selected arithmetic kernel and exit");

  std::string channel, q, rates = "0.01:0.5:0.01", gamma = "sqrt-exp";
  double rho_max = kDefaultRhoMax;
  auto* exps = app.add_subcommand("exponents", "Tabulate random-coding and expurgated exponents");
  exps->add_option("--channel", channel, "Channel JSON file")->required();
  exps->add_option("--q", q, "Input distribution (default uniform)");
  exps->add_option("--rates", rates, "start:stop:step or comma list");
  exps->add_option("--rho-max", rho_max, "Upper end of the rho search");
  exps->add_option("--gamma", gamma, "sqrt-exp, poly:k or fixed:g");

  CodeArgs sample_args, trial_args, check_args;
  auto* sample = app.add_subcommand("sample", "Print one sampled mother code as JSON");
  sample_args.add_to(sample, false);
  auto* trial = app.add_subcommand("trial", "Evaluate one sampled code and print its census");
  trial_args.add_to(trial, true);
  auto* check = app.add_subcommand("exact-check", "Compare union bound and exact ML error on a sampled code");
  check_args.add_to(check, false);

  std::string config_path, out_dir;
  auto* exp = app.add_subcommand("experiment", "Run a Monte-Carlo experiment from a JSON config");
  exp->add_option("--config", config_path, "Experiment config JSON")->required();
  exp->add_option("--out", out_dir, "Directory for the run outputs");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*exps) return cmd_exponents(channel, q, rates, rho_max, gamma);
    if (*sample) return cmd_sample(sample_args);
    if (*trial) return cmd_trial(trial_args);
    if (*check) return cmd_exact_check(check_args);
    if (*exp) return cmd_experiment(config_path, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
