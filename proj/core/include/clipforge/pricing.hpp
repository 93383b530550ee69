#ifndef CLIPFORGE_PRICING_HPP
#define CLIPFORGE_PRICING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clipforge/frame.hpp"

namespace clipforge {

struct PricingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rates are stored in integer micro-dollars so itemized totals reproduce
// published figures exactly (no binary-fraction drift).
using MicroDollars = int64_t;

MicroDollars micro_from_dollars(double dollars);
std::string dollars_string(MicroDollars amount);  // "0.15", "3.3", "1"

// Billing classes. The published axes name no boundaries; these are fixed
// here: SD <= 576 lines, HD <= 1080, UHD above; framerate <= 30 / <= 60 /
// above.
std::string resolution_class(int height);
std::string framerate_class(double fps);

struct PricingTable {
  struct PerMinuteKey {
    std::string tier;      // basic, professional-speed, professional-quality
    std::string codec;     // h264, hevc, ...
    std::string res_class; // sd, hd, uhd
    std::string fps_class; // le30, le60, gt60
    std::string region;
    auto operator<=>(const PerMinuteKey&) const = default;
  };

  std::map<PerMinuteKey, MicroDollars> per_minute;        // per output minute
  std::map<std::string, MicroDollars> compute_hourly;     // per instance class
  MicroDollars reserved_flat = 0;                         // per slot
  std::string note;

  MicroDollars per_minute_rate(const PerMinuteKey& key) const;  // throws, names the key

  std::string to_json() const;
  static PricingTable from_json(const std::string& text);
};

// The cloud list prices quoted for February 2023: a 10-minute HD 30 fps
// H.264 job costs $0.15 basic or $0.24/$0.42 professional speed/quality;
// HEVC (professional only) $0.48/$3.3; reserved slots $400 flat.
const PricingTable& default_pricing_table();

enum class CostMode { kPerMinute, kComputeTime };

struct CostJob {
  double output_minutes = 0.0;
  std::vector<std::string> codecs;
  std::string tier;
  std::string region = "us-east";
  int height = 1080;
  double fps = 30.0;
  std::string instance_class;  // compute_time mode
};

struct CostEstimate {
  MicroDollars total = 0;
  struct Item {
    std::string label;
    MicroDollars amount = 0;
  };
  std::vector<Item> items;

  std::string to_json() const;
};

CostEstimate estimate_cost(const CostJob& job, const PricingTable& pricing, CostMode mode,
                           double predicted_seconds = 0.0);

}  // namespace clipforge

#endif  // CLIPFORGE_PRICING_HPP
