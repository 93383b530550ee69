#ifndef CLIPFORGE_LAMBDA_SEARCH_HPP
#define CLIPFORGE_LAMBDA_SEARCH_HPP

#include <optional>
#include <string>
#include <vector>

#include "clipforge/codec.hpp"

namespace clipforge {

class ThreadPool;

struct LambdaSearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProxyStrategy { kNone, kDownsample, kFastPreset };
const char* proxy_strategy_name(ProxyStrategy s);
ProxyStrategy proxy_strategy_from_name(const std::string& name);

struct EarlyStopPolicy {
  double min_improvement_pct = 0.05;  // BD-rate points
  int patience = 3;
  int encode_budget = 6 * 50;
};

enum class StopDecision { kContinue, kStopConverged, kStopBudget };

// Stop once the best BD-rate improved by less than min_improvement_pct over
// the last `patience` evaluations, or the encode budget is spent.
StopDecision should_continue(const std::vector<double>& bd_history, const EarlyStopPolicy& policy,
                             int encodes_used);

// The multiplier search runs in ln(k); bounds default to [1/16, 16] so the
// largest multipliers seen in practice (k near 10) stay interior.
struct LambdaSearchConfig {
  double k_min = 1.0 / 16.0;
  double k_max = 16.0;
  int dims = 1;
  double x_tol = 1e-2;  // in ln(k)
  int max_iter = 50;
  double line_step = 0.5;  // initial ln(k) probe step
  QualityMetric metric = QualityMetric::kPsnr;
  ProxyStrategy proxy = ProxyStrategy::kNone;
  EarlyStopPolicy early_stop;
  std::string preset;  // empty = gateway default

  void validate() const;
};

struct IterationRecord {
  std::vector<double> k;
  double bd_rate = 0.0;
};

struct LambdaSearchOutcome {
  std::vector<double> k_opt;
  double bd_rate_gain = 0.0;  // vs k=1; never positive
  int iterations = 0;         // cost evaluations == history.size()
  int optimizer_iterations = 0;
  int total_encodes = 0;
  double wall_seconds = 0.0;  // summed encode wall time
  std::vector<IterationRecord> history;
  bool terminated_early = false;
  std::string termination_reason;

  // Proxy runs: search-phase vs full-fidelity evaluation time.
  double proxy_wall_seconds = 0.0;
  double full_eval_wall_seconds = 0.0;
  ProxyStrategy proxy_used = ProxyStrategy::kNone;

  std::string to_json() const;
};

// BD-rate of the k_vector curve against a k=1 baseline built with the same
// QP list and metric. Encode or curve failures surface as +infinity so a
// surrounding line search can retreat.
double bd_cost(CodecGateway& gateway, const Clip& clip, const std::vector<double>& k_vector,
               const RDCurve& baseline_curve, const LambdaSearchConfig& config,
               ThreadPool* pool = nullptr);

// Brent (1-D) / Powell (2-D) search over ln(k) starting from the codec
// default k=1. A search that finds nothing below 0 collapses to k=1.
LambdaSearchOutcome optimize_k(CodecGateway& gateway, const Clip& clip,
                               const LambdaSearchConfig& config, ThreadPool* pool = nullptr);

struct ProxyClipProfile {
  Clip clip;
  EncoderProfile profile;
  bool identity = false;
  std::string warning;
};

// Profile-level proxy construction: downsample shrinks the clip to the
// proxy_resolution target; fast_preset collapses the preset ladder to its
// fastest entry.
ProxyClipProfile make_proxy(const Clip& clip, const EncoderProfile& profile,
                            ProxyStrategy strategy);

// Runs optimize_k on the proxy, then spends one baseline + one test curve
// at full fidelity to price the found k. proxy_gateway defaults to the main
// gateway (shared k*); tests may plant a diverging proxy.
LambdaSearchOutcome optimize_with_proxy(CodecGateway& gateway, const Clip& clip,
                                        const LambdaSearchConfig& config,
                                        ThreadPool* pool = nullptr,
                                        CodecGateway* proxy_gateway = nullptr);

}  // namespace clipforge

#endif  // CLIPFORGE_LAMBDA_SEARCH_HPP
