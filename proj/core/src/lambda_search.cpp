#include "clipforge/lambda_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clipforge/optimize.hpp"
#include "clipforge/scale.hpp"
#include "clipforge/thread_pool.hpp"
#include "json.hpp"

namespace clipforge {

const char* proxy_strategy_name(ProxyStrategy s) {
  switch (s) {
    case ProxyStrategy::kNone: return "none";
    case ProxyStrategy::kDownsample: return "downsample";
    case ProxyStrategy::kFastPreset: return "fast_preset";
  }
  return "?";
}

ProxyStrategy proxy_strategy_from_name(const std::string& name) {
  if (name == "none") return ProxyStrategy::kNone;
  if (name == "downsample") return ProxyStrategy::kDownsample;
  if (name == "fast_preset") return ProxyStrategy::kFastPreset;
  throw LambdaSearchError("unknown proxy strategy '" + name + "'");
}

void LambdaSearchConfig::validate() const {
  if (!(k_min > 0) || !(k_min <= 1.0) || !(k_max >= 1.0))
    throw LambdaSearchError("lambda config: need 0 < k_min <= 1 <= k_max");
  if (dims != 1 && dims != 2) throw LambdaSearchError("lambda config: dims must be 1 or 2");
  if (early_stop.patience < 1) throw LambdaSearchError("lambda config: patience must be >= 1");
  if (!(x_tol > 0)) throw LambdaSearchError("lambda config: x_tol must be positive");
}

StopDecision should_continue(const std::vector<double>& bd_history,
                             const EarlyStopPolicy& policy, int encodes_used) {
  if (bd_history.empty()) throw LambdaSearchError("should_continue: empty history");
  if (encodes_used > policy.encode_budget) return StopDecision::kStopBudget;
  const size_t n = bd_history.size();
  if (n <= static_cast<size_t>(policy.patience)) return StopDecision::kContinue;
  double best_now = bd_history[0];
  double best_before = bd_history[0];
  for (size_t i = 0; i < n; ++i) {
    best_now = std::min(best_now, bd_history[i]);
    if (i < n - static_cast<size_t>(policy.patience))
      best_before = std::min(best_before, bd_history[i]);
  }
  const double improvement = best_before - best_now;
  return improvement < policy.min_improvement_pct ? StopDecision::kStopConverged
                                                  : StopDecision::kContinue;
}

double bd_cost(CodecGateway& gateway, const Clip& clip, const std::vector<double>& k_vector,
               const RDCurve& baseline_curve, const LambdaSearchConfig& config,
               ThreadPool* pool) {
  try {
    const RDCurve test =
        gateway_rd_curve(gateway, clip, config.metric, k_vector, config.preset, pool);
    return bd_rate(test, baseline_curve);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace {

// Shared state of one search: the baseline curve, the k-cost closure, the
// per-evaluation history and the encode accounting.
struct SearchContext {
  CodecGateway& gateway;
  const Clip& clip;
  const LambdaSearchConfig& config;
  ThreadPool* pool;

  std::optional<RDCurve> baseline;
  std::vector<IterationRecord> history;
  std::vector<double> bd_only;
  int encodes = 0;
  double wall = 0.0;
  StopDecision stop = StopDecision::kContinue;

  SearchContext(CodecGateway& gw, const Clip& c, const LambdaSearchConfig& cfg, ThreadPool* p)
      : gateway(gw), clip(c), config(cfg), pool(p) {
    CurveWithCost base =
        gateway_rd_curve_timed(gateway, clip, config.metric, {}, config.preset, pool);
    encodes += base.encodes;
    wall += base.encode_seconds;
    baseline.emplace(std::move(base.curve));
  }

  double cost_at_lnk(const std::vector<double>& ln_k) {
    std::vector<double> k(ln_k.size());
    for (size_t i = 0; i < ln_k.size(); ++i) k[i] = std::exp(ln_k[i]);
    double bd = std::numeric_limits<double>::infinity();
    try {
      CurveWithCost test =
          gateway_rd_curve_timed(gateway, clip, config.metric, k, config.preset, pool);
      encodes += test.encodes;
      wall += test.encode_seconds;
      bd = bd_rate(test.curve, *baseline);
    } catch (const std::exception&) {
      encodes += static_cast<int>(gateway.qp_list().size());
    }
    history.push_back({k, bd});
    bd_only.push_back(bd);
    stop = should_continue(bd_only, config.early_stop, encodes);
    return bd;
  }

  bool want_stop() const { return stop != StopDecision::kContinue; }
};

}  // namespace

LambdaSearchOutcome optimize_k(CodecGateway& gateway, const Clip& clip,
                               const LambdaSearchConfig& config, ThreadPool* pool) {
  config.validate();
  const size_t groups = gateway.frame_group_count();
  if (config.dims == 2 && groups < 2)
    throw LambdaSearchError("optimize_k: 2-D search needs a gateway with 2 frame groups");

  SearchContext ctx(gateway, clip, config, pool);
  const double lo = std::log(config.k_min), hi = std::log(config.k_max);

  MinimizeOptions opt;
  opt.x_tol = config.x_tol;
  opt.max_iter = config.max_iter;
  opt.line_step = config.line_step;
  opt.should_stop = [&ctx] { return ctx.want_stop(); };

  LambdaSearchOutcome out;
  out.proxy_used = ProxyStrategy::kNone;

  if (config.dims == 1) {
    auto g = [&ctx](double x) { return ctx.cost_at_lnk({x}); };
    const BracketOutcome br = bracket_minimum(g, 0.0, config.line_step, lo, hi);
    if (br.bracketed && !ctx.want_stop()) {
      const SearchReport rep = brent_min(g, br.bracket, opt);
      out.optimizer_iterations = rep.iterations;
    } else {
      out.optimizer_iterations = br.evaluations;
    }
  } else {
    opt.lower.assign(2, lo);
    opt.upper.assign(2, hi);
    auto g = [&ctx](const std::vector<double>& x) { return ctx.cost_at_lnk(x); };
    const SearchReport rep = powell_min(g, std::vector<double>(2, 0.0), opt);
    out.optimizer_iterations = rep.iterations;
  }

  // Best evaluated point wins; ties keep the earliest record.
  size_t best = 0;
  for (size_t i = 1; i < ctx.history.size(); ++i)
    if (ctx.history[i].bd_rate < ctx.history[best].bd_rate) best = i;

  out.history = std::move(ctx.history);
  out.iterations = static_cast<int>(out.history.size());
  out.total_encodes = ctx.encodes;
  out.wall_seconds = ctx.wall;

  if (out.history.empty() || !(out.history[best].bd_rate < 0.0)) {
    out.k_opt.assign(static_cast<size_t>(config.dims), 1.0);
    out.bd_rate_gain = 0.0;
    out.terminated_early = true;
    out.termination_reason = "no improvement";
  } else {
    out.k_opt = out.history[best].k;
    out.bd_rate_gain = out.history[best].bd_rate;
  }
  if (ctx.stop == StopDecision::kStopBudget) {
    out.terminated_early = true;
    out.termination_reason = "encode budget exhausted";
  } else if (ctx.stop == StopDecision::kStopConverged) {
    out.terminated_early = true;
    if (out.termination_reason.empty())
      out.termination_reason = "improvement below threshold";
  }
  return out;
}

ProxyClipProfile make_proxy(const Clip& clip, const EncoderProfile& profile,
                            ProxyStrategy strategy) {
  if (strategy == ProxyStrategy::kNone)
    throw LambdaSearchError("make_proxy: strategy must not be 'none'");
  ProxyClipProfile out{clip, profile, false, {}};
  if (strategy == ProxyStrategy::kDownsample) {
    const auto [tw, th] = proxy_resolution(clip.width(), clip.height());
    if (tw == clip.width() && th == clip.height()) {
      out.identity = true;
      out.warning = "clip already at or below the proxy resolution";
      return out;
    }
    out.clip = resize_box(clip, tw, th);
  } else {
    out.profile.preset_ladder = {profile.fastest_preset()};
  }
  return out;
}

LambdaSearchOutcome optimize_with_proxy(CodecGateway& gateway, const Clip& clip,
                                        const LambdaSearchConfig& config, ThreadPool* pool,
                                        CodecGateway* proxy_gateway) {
  config.validate();
  if (config.proxy == ProxyStrategy::kNone)
    throw LambdaSearchError("optimize_with_proxy: config.proxy must be set");
  CodecGateway& pg = proxy_gateway ? *proxy_gateway : gateway;

  LambdaSearchConfig proxy_cfg = config;
  proxy_cfg.proxy = ProxyStrategy::kNone;
  Clip proxy_clip = clip;
  if (config.proxy == ProxyStrategy::kDownsample) {
    const auto [tw, th] = proxy_resolution(clip.width(), clip.height());
    if (tw != clip.width() || th != clip.height()) proxy_clip = resize_box(clip, tw, th);
  } else {
    proxy_cfg.preset = pg.fastest_preset();
  }

  LambdaSearchOutcome out = optimize_k(pg, proxy_clip, proxy_cfg, pool);
  out.proxy_used = config.proxy;
  out.proxy_wall_seconds = out.wall_seconds;

  // One full-fidelity pricing of the proxied k: baseline + test curve.
  CurveWithCost base =
      gateway_rd_curve_timed(gateway, clip, config.metric, {}, config.preset, pool);
  double full_wall = base.encode_seconds;
  int full_encodes = base.encodes;
  double full_gain = 0.0;
  try {
    CurveWithCost test =
        gateway_rd_curve_timed(gateway, clip, config.metric, out.k_opt, config.preset, pool);
    full_wall += test.encode_seconds;
    full_encodes += test.encodes;
    full_gain = bd_rate(test.curve, base.curve);
  } catch (const std::exception&) {
    full_gain = std::numeric_limits<double>::infinity();
  }

  if (!(full_gain < 0.0)) {
    out.k_opt.assign(out.k_opt.size(), 1.0);
    out.bd_rate_gain = 0.0;
    if (out.termination_reason.empty()) out.termination_reason = "no improvement";
    out.terminated_early = true;
  } else {
    out.bd_rate_gain = full_gain;
  }
  out.full_eval_wall_seconds = full_wall;
  out.total_encodes += full_encodes;
  out.wall_seconds += full_wall;
  return out;
}

std::string LambdaSearchOutcome::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["k_opt"] = k_opt;
  j["bd_rate_gain_pct"] = bd_rate_gain;
  j["iterations"] = iterations;
  j["optimizer_iterations"] = optimizer_iterations;
  j["total_encodes"] = total_encodes;
  j["wall_seconds"] = wall_seconds;
  j["terminated_early"] = terminated_early;
  j["termination_reason"] = termination_reason;
  j["proxy"] = proxy_strategy_name(proxy_used);
  if (proxy_used != ProxyStrategy::kNone) {
    j["proxy_wall_seconds"] = proxy_wall_seconds;
    j["full_eval_wall_seconds"] = full_eval_wall_seconds;
  }
  auto& hist = j["history"] = nlohmann::json::array();
  for (const auto& h : history) {
    nlohmann::json e;
    e["k"] = h.k;
    if (std::isfinite(h.bd_rate))
      e["bd_rate_pct"] = h.bd_rate;
    else
      e["bd_rate_pct"] = "inf";
    hist.push_back(std::move(e));
  }
  return j.dump(2);
}

}  // namespace clipforge
