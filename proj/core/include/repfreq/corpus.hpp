#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "repfreq/histogram.hpp"

namespace repfreq {

using TokenList = std::vector<std::string>;

/// Splits text into lowercase word-forms. A token is a maximal run of
/// alphabetic characters plus internal apostrophes and hyphens; leading and
/// trailing apostrophes/hyphens are stripped, digits and other punctuation
/// separate tokens. Input is treated as UTF-8 with lossy replacement of
/// invalid bytes. No stemming: distinct word-forms stay distinct.
TokenList tokenize(std::string_view text);

/// Extracts human-readable text from a hypertext document: tags are removed,
/// script/style/head contents dropped, character entities decoded, anchor
/// text kept. Best-effort on malformed markup; never throws. Whitespace in
/// the result is collapsed to single spaces.
std::string strip_markup(std::string_view html);

/// Word-form -> occurrence count. Counts pool across documents, so a corpus
/// spanning several files accumulates into one map before the histogram is
/// built.
using WordCounts = std::unordered_map<std::string, std::uint64_t>;

void count_tokens(const TokenList& tokens, WordCounts& counts);
FrequencyHistogram histogram_from_counts(const WordCounts& counts,
                                         std::string source = {});

/// Counts the tokens and inverts them into a frequency-of-frequencies
/// histogram. Throws InputError on an empty stream.
FrequencyHistogram build_histogram(const TokenList& tokens);

}  // namespace repfreq
