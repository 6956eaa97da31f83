#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace repfreq {

/// Frequency-of-frequencies table: occurrence number k mapped to the number
/// of distinct word-forms that occur exactly k times.
///
/// Invariants: every k >= 1, every count >= 1 (absent bins mean zero),
/// total_types = sum of counts, total_tokens = sum of k * count.
struct FrequencyHistogram {
  std::map<std::uint64_t, std::uint64_t> bins;
  std::uint64_t total_types = 0;
  std::uint64_t total_tokens = 0;
  std::string source;

  /// Builds a histogram from bins, computing the totals. Throws InputError
  /// on empty or invalid bins.
  static FrequencyHistogram from_bins(std::map<std::uint64_t, std::uint64_t> bins,
                                      std::string source = {});

  /// Re-checks all invariants; throws InputError on violation.
  void validate() const;

  std::uint64_t min_k() const;
  std::uint64_t max_k() const;
  std::size_t distinct_k() const { return bins.size(); }

  /// Share of types seen once or twice: (n_1 + n_2) / total_types.
  double low_frequency_share() const;
};

std::string histogram_to_json(const FrequencyHistogram& hist);
FrequencyHistogram histogram_from_json(std::string_view text);

}  // namespace repfreq
