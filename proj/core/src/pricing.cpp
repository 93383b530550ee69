#include "clipforge/pricing.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace clipforge {

MicroDollars micro_from_dollars(double dollars) {
  return static_cast<MicroDollars>(std::llround(dollars * 1e6));
}

std::string dollars_string(MicroDollars amount) {
  const bool negative = amount < 0;
  if (negative) amount = -amount;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%lld.%06lld", static_cast<long long>(amount / 1000000),
                static_cast<long long>(amount % 1000000));
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return negative ? "-" + s : s;
}

std::string resolution_class(int height) {
  if (height <= 576) return "sd";
  if (height <= 1080) return "hd";
  return "uhd";
}

std::string framerate_class(double fps) {
  if (fps <= 30.0) return "le30";
  if (fps <= 60.0) return "le60";
  return "gt60";
}

MicroDollars PricingTable::per_minute_rate(const PerMinuteKey& key) const {
  const auto it = per_minute.find(key);
  if (it == per_minute.end())
    throw PricingError("no pricing entry for (tier=" + key.tier + ", codec=" + key.codec +
                       ", resolution=" + key.res_class + ", framerate=" + key.fps_class +
                       ", region=" + key.region + ")");
  return it->second;
}

const PricingTable& default_pricing_table() {
  static const PricingTable table = [] {
    PricingTable t;
    t.note = "AWS MediaConvert list prices as of February 2023";
    const std::string region = "us-east";
    auto add = [&](const std::string& tier, const std::string& codec, double per_10min) {
      for (const char* rc : {"sd", "hd", "uhd"})
        for (const char* fc : {"le30", "le60", "gt60"})
          t.per_minute[{tier, codec, rc, fc, region}] = micro_from_dollars(per_10min / 10.0);
    };
    add("basic", "h264", 0.15);
    add("professional-speed", "h264", 0.24);
    add("professional-quality", "h264", 0.42);
    add("professional-speed", "hevc", 0.48);  // HEVC has no basic tier
    add("professional-quality", "hevc", 3.30);
    t.compute_hourly["lambda"] = micro_from_dollars(0.50);
    t.compute_hourly["fargate"] = micro_from_dollars(0.40);
    t.reserved_flat = micro_from_dollars(400.0);
    return t;
  }();
  return table;
}

CostEstimate estimate_cost(const CostJob& job, const PricingTable& pricing, CostMode mode,
                           double predicted_seconds) {
  CostEstimate est;
  if (mode == CostMode::kPerMinute) {
    if (!(job.output_minutes > 0)) throw PricingError("estimate_cost: output minutes required");
    if (job.codecs.empty()) throw PricingError("estimate_cost: at least one codec required");
    if (job.tier.empty()) throw PricingError("estimate_cost: tier required");
    for (const auto& codec : job.codecs) {
      const PricingTable::PerMinuteKey key{job.tier, codec, resolution_class(job.height),
                                           framerate_class(job.fps), job.region};
      const MicroDollars rate = pricing.per_minute_rate(key);
      const auto amount =
          static_cast<MicroDollars>(std::llround(rate * job.output_minutes));
      est.items.push_back({codec + " @ " + job.tier + " (" + key.res_class + "/" +
                               key.fps_class + "/" + key.region + ")",
                           amount});
      est.total += amount;
    }
    return est;
  }

  if (!(predicted_seconds > 0))
    throw PricingError("estimate_cost: compute_time mode needs predicted seconds");
  const auto it = pricing.compute_hourly.find(job.instance_class);
  if (it == pricing.compute_hourly.end())
    throw PricingError("no pricing entry for instance class '" + job.instance_class + "'");
  const auto amount =
      static_cast<MicroDollars>(std::llround(it->second * (predicted_seconds / 3600.0)));
  est.items.push_back({job.instance_class + " compute x " + std::to_string(predicted_seconds) +
                           "s",
                       amount});
  est.total = amount;
  return est;
}

std::string CostEstimate::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["total_usd"] = dollars_string(total);
  auto& items_json = j["items"] = nlohmann::json::array();
  for (const auto& item : items)
    items_json.push_back({{"label", item.label}, {"usd", dollars_string(item.amount)}});
  return j.dump(2);
}

std::string PricingTable::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["note"] = note;
  auto& rows = j["per_minute"] = nlohmann::json::array();
  for (const auto& [key, rate] : per_minute) {
    rows.push_back({{"tier", key.tier},
                    {"codec", key.codec},
                    {"resolution", key.res_class},
                    {"framerate", key.fps_class},
                    {"region", key.region},
                    {"usd_per_minute", dollars_string(rate)}});
  }
  auto& hourly = j["compute_hourly"] = nlohmann::json::object();
  for (const auto& [cls, rate] : compute_hourly) hourly[cls] = dollars_string(rate);
  j["reserved_flat_usd"] = dollars_string(reserved_flat);
  return j.dump(2);
}

PricingTable PricingTable::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PricingTable t;
  t.note = j.value("note", "");
  for (const auto& row : j.at("per_minute")) {
    const PerMinuteKey key{row.at("tier").get<std::string>(), row.at("codec").get<std::string>(),
                           row.at("resolution").get<std::string>(),
                           row.at("framerate").get<std::string>(),
                           row.at("region").get<std::string>()};
    const MicroDollars rate =
        micro_from_dollars(std::stod(row.at("usd_per_minute").get<std::string>()));
    if (rate < 0) throw PricingError("pricing table: negative rate for codec " + key.codec);
    t.per_minute[key] = rate;
  }
  if (j.contains("compute_hourly"))
    for (const auto& [cls, rate] : j["compute_hourly"].items())
      t.compute_hourly[cls] = micro_from_dollars(std::stod(rate.get<std::string>()));
  if (j.contains("reserved_flat_usd"))
    t.reserved_flat = micro_from_dollars(std::stod(j["reserved_flat_usd"].get<std::string>()));
  return t;
}

}  // namespace clipforge
