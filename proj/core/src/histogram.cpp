#include "repfreq/histogram.hpp"

#include <sstream>

#include "repfreq/error.hpp"

#include <json.hpp>

namespace repfreq {

FrequencyHistogram FrequencyHistogram::from_bins(
    std::map<std::uint64_t, std::uint64_t> bins, std::string source) {
  FrequencyHistogram hist;
  hist.bins = std::move(bins);
  hist.source = std::move(source);
  for (const auto& [k, n] : hist.bins) {
    if (k < 1) throw InputError("histogram bin with k < 1");
    if (n < 1) throw InputError("histogram bin with zero count");
    hist.total_types += n;
    hist.total_tokens += k * n;
  }
  if (hist.bins.empty()) throw InputError("empty corpus");
  return hist;
}

void FrequencyHistogram::validate() const {
  if (bins.empty()) throw InputError("empty corpus");
  std::uint64_t types = 0, tokens = 0;
  for (const auto& [k, n] : bins) {
    if (k < 1) throw InputError("histogram bin with k < 1");
    if (n < 1) throw InputError("histogram bin with zero count");
    types += n;
    tokens += k * n;
  }
  if (types != total_types || tokens != total_tokens)
    throw InputError("histogram totals do not match bins");
}

std::uint64_t FrequencyHistogram::min_k() const {
  if (bins.empty()) throw InputError("empty corpus");
  return bins.begin()->first;
}

std::uint64_t FrequencyHistogram::max_k() const {
  if (bins.empty()) throw InputError("empty corpus");
  return bins.rbegin()->first;
}

double FrequencyHistogram::low_frequency_share() const {
  if (total_types == 0) return 0.0;
  std::uint64_t low = 0;
  if (auto it = bins.find(1); it != bins.end()) low += it->second;
  if (auto it = bins.find(2); it != bins.end()) low += it->second;
  return static_cast<double>(low) / static_cast<double>(total_types);
}

std::string histogram_to_json(const FrequencyHistogram& hist) {
  hist.validate();
  nlohmann::ordered_json doc;
  nlohmann::ordered_json bins = nlohmann::ordered_json::object();
  for (const auto& [k, n] : hist.bins) bins[std::to_string(k)] = n;
  doc["bins"] = std::move(bins);
  doc["total_types"] = hist.total_types;
  doc["total_tokens"] = hist.total_tokens;
  doc["source"] = hist.source;
  return doc.dump(2) + "\n";
}

FrequencyHistogram histogram_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid histogram JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("bins") || !doc["bins"].is_object())
    throw InputError("histogram JSON must contain a \"bins\" object");

  FrequencyHistogram hist;
  try {
    for (const auto& [key, value] : doc["bins"].items()) {
      std::size_t used = 0;
      std::uint64_t k = 0;
      try {
        k = std::stoull(key, &used);
      } catch (const std::exception&) {
        throw InputError("histogram bin key is not an integer: \"" + key + "\"");
      }
      if (used != key.size())
        throw InputError("histogram bin key is not an integer: \"" + key + "\"");
      hist.bins[k] = value.get<std::uint64_t>();
    }
    hist.total_types = doc.at("total_types").get<std::uint64_t>();
    hist.total_tokens = doc.at("total_tokens").get<std::uint64_t>();
    hist.source = doc.value("source", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid histogram JSON: ") + e.what());
  }
  hist.validate();
  return hist;
}

}  // namespace repfreq
