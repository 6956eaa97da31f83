#include "repfreq/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "repfreq/error.hpp"

namespace repfreq {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one UTF-8 code point at i, advancing i. Malformed sequences yield
// U+FFFD and advance by a single byte (lossy decode, never fails).
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t j) -> unsigned char {
    return static_cast<unsigned char>(s[j]);
  };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacement;
  }
  if (i + len > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int j = 1; j < len; ++j) {
    const unsigned char c = byte(i + j);
    if ((c & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  // reject overlong encodings and surrogates
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
      cp > 0x10FFFF) {
    ++i;
    return kReplacement;
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct Range {
  char32_t lo, hi;
};

// Letter ranges for the scripts that show up in practice. Not a full Unicode
// category table, but covers Latin with diacritics, Greek, Cyrillic, and the
// common non-European blocks.
constexpr Range kLetterRanges[] = {
    {0x00AA, 0x00AA}, {0x00B5, 0x00B5}, {0x00BA, 0x00BA},
    {0x00C0, 0x00D6}, {0x00D8, 0x00F6}, {0x00F8, 0x02AF},
    {0x0370, 0x0373}, {0x0376, 0x0377}, {0x037B, 0x037D},
    {0x0386, 0x0386}, {0x0388, 0x03FF}, {0x0400, 0x0481},
    {0x048A, 0x052F}, {0x0531, 0x0556}, {0x0561, 0x0587},
    {0x05D0, 0x05EA}, {0x0620, 0x064A}, {0x0660, 0x0669},
    {0x1E00, 0x1FFF}, {0x3041, 0x3096}, {0x30A1, 0x30FA},
    {0x4E00, 0x9FFF}, {0xAC00, 0xD7A3},
};

bool is_letter(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  for (const Range& r : kLetterRanges)
    if (cp >= r.lo && cp <= r.hi) return true;
  return false;
}

bool is_apostrophe(char32_t cp) {
  return cp == '\'' || cp == 0x2019;  // typographic right single quote
}

bool is_hyphen(char32_t cp) {
  return cp == '-' || cp == 0x2010 || cp == 0x2011;
}

// Lowercases the cased scripts covered above; caseless code points pass
// through unchanged.
char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  if (cp == 0x0130) return 'i';  // dotted capital I
  if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x0178) return 0x00FF;
  if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x0386 && cp <= 0x038F) {
    // accented Greek capitals
    switch (cp) {
      case 0x0386: return 0x03AC;
      case 0x0388: return 0x03AD;
      case 0x0389: return 0x03AE;
      case 0x038A: return 0x03AF;
      case 0x038C: return 0x03CC;
      case 0x038E: return 0x03CD;
      case 0x038F: return 0x03CE;
      default: return cp;
    }
  }
  if (cp >= 0x0391 && cp <= 0x03A1) return cp + 0x20;
  if (cp >= 0x03A3 && cp <= 0x03AB) return cp + 0x20;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;
  return cp;
}

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::vector<char32_t> run;

  auto flush = [&] {
    if (run.empty()) return;
    std::size_t lo = 0, hi = run.size();
    while (lo < hi && !is_letter(run[lo])) ++lo;
    while (hi > lo && !is_letter(run[hi - 1])) --hi;
    if (lo < hi) {
      std::string token;
      for (std::size_t j = lo; j < hi; ++j) append_utf8(token, run[j]);
      tokens.push_back(std::move(token));
    }
    run.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = next_code_point(text, i);
    if (is_letter(cp)) {
      run.push_back(to_lower(cp));
    } else if (!run.empty() && (is_apostrophe(cp) || is_hyphen(cp))) {
      run.push_back(is_apostrophe(cp) ? U'\'' : U'-');
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

// Case-insensitive find of an ASCII needle; npos when absent.
std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i)
    if (iequals(hay.substr(i, needle.size()), needle)) return i;
  return std::string_view::npos;
}

// Tags whose markup does not separate words.
bool is_inline_tag(std::string_view name) {
  static constexpr std::string_view kInline[] = {
      "a",    "abbr", "acronym", "b",    "bdi",  "bdo",  "cite", "code",
      "data", "dfn",  "em",      "font", "i",    "ins",  "kbd",  "label",
      "mark", "q",    "s",       "samp", "small", "span", "strike", "strong",
      "sub",  "sup",  "time",    "tt",   "u",    "var",  "wbr",
  };
  for (std::string_view t : kInline)
    if (iequals(name, t)) return true;
  return false;
}

struct Entity {
  std::string_view name;
  char32_t cp;
};

constexpr Entity kEntities[] = {
    {"amp", '&'},     {"lt", '<'},      {"gt", '>'},      {"quot", '"'},
    {"apos", '\''},   {"nbsp", ' '},    {"copy", 0xA9},   {"reg", 0xAE},
    {"trade", 0x2122},{"deg", 0xB0},    {"middot", 0xB7}, {"bull", 0x2022},
    {"hellip", 0x2026}, {"mdash", 0x2014}, {"ndash", 0x2013},
    {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
    {"rdquo", 0x201D}, {"laquo", 0xAB},  {"raquo", 0xBB},
    {"times", 0xD7},  {"divide", 0xF7}, {"shy", 0xAD},    {"sect", 0xA7},
    {"para", 0xB6},   {"pound", 0xA3},  {"euro", 0x20AC}, {"cent", 0xA2},
};

// Decodes the entity starting at s[i] == '&'. On success appends the decoded
// character and returns the index past the ';'. On failure returns i.
std::size_t decode_entity(std::string_view s, std::size_t i, std::string& out) {
  const std::size_t semi = s.find(';', i + 1);
  if (semi == std::string_view::npos || semi - i > 32) return i;
  const std::string_view body = s.substr(i + 1, semi - i - 1);
  if (body.empty()) return i;
  if (body[0] == '#') {
    char32_t cp = 0;
    bool ok = false;
    if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
      for (std::size_t j = 2; j < body.size(); ++j) {
        const char c = body[j];
        int digit;
        if (c >= '0' && c <= '9') digit = c - '0';
        else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
        else return i;
        cp = cp * 16 + digit;
        ok = true;
      }
    } else {
      for (std::size_t j = 1; j < body.size(); ++j) {
        if (body[j] < '0' || body[j] > '9') return i;
        cp = cp * 10 + (body[j] - '0');
        ok = true;
      }
    }
    if (!ok || cp > 0x10FFFF) return i;
    append_utf8(out, cp == 0xA0 ? U' ' : cp);
    return semi + 1;
  }
  for (const Entity& e : kEntities) {
    if (body == e.name) {
      append_utf8(out, e.cp == 0xA0 ? U' ' : e.cp);
      return semi + 1;
    }
  }
  return i;
}

// Reads the tag name starting after '<' (and optional '/').
std::string_view tag_name(std::string_view s, std::size_t i) {
  std::size_t j = i;
  while (j < s.size() &&
         (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == ':'))
    ++j;
  return s.substr(i, j - i);
}

// Finds the end of a tag opened at '<', honouring quoted attribute values.
// Returns the index just past '>', or npos when the tag never closes.
std::size_t skip_tag(std::string_view s, std::size_t i) {
  char quote = 0;
  for (std::size_t j = i; j < s.size(); ++j) {
    const char c = s[j];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return j + 1;
    }
  }
  return std::string_view::npos;
}

// Skips past the closing tag of `name`, starting the search at `from`.
// Falls back to the end of input when the element never closes.
std::size_t skip_element(std::string_view s, std::size_t from, std::string_view name) {
  std::string needle = "</";
  needle.append(name);
  const std::size_t pos = find_ci(s, needle, from);
  if (pos == std::string_view::npos) return s.size();
  const std::size_t end = skip_tag(s, pos);
  return end == std::string_view::npos ? s.size() : end;
}

}  // namespace

std::string strip_markup(std::string_view html) {
  std::string raw;
  raw.reserve(html.size() / 2);

  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      if (html.substr(i, 4) == "<!--") {
        const std::size_t end = html.find("-->", i + 4);
        i = (end == std::string_view::npos) ? html.size() : end + 3;
        raw.push_back(' ');
        continue;
      }
      if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
        const std::size_t end = skip_tag(html, i);
        i = (end == std::string_view::npos) ? html.size() : end;
        raw.push_back(' ');
        continue;
      }
      const bool closing = i + 1 < html.size() && html[i + 1] == '/';
      const std::string_view name = tag_name(html, i + 1 + (closing ? 1 : 0));
      if (name.empty()) {
        // bare '<' in text, e.g. "a < b"
        raw.push_back(c);
        ++i;
        continue;
      }
      std::size_t end = skip_tag(html, i);
      if (end == std::string_view::npos) end = html.size();
      if (!closing && (iequals(name, "script") || iequals(name, "style"))) {
        i = skip_element(html, end, name);
      } else if (!closing && iequals(name, "head")) {
        // Drop the document head. If it never closes, resume at <body>.
        std::size_t close = find_ci(html, "</head", end);
        if (close != std::string_view::npos) {
          const std::size_t after = skip_tag(html, close);
          i = (after == std::string_view::npos) ? html.size() : after;
        } else {
          const std::size_t body = find_ci(html, "<body", end);
          i = (body == std::string_view::npos) ? end : body;
        }
      } else {
        i = end;
      }
      if (!is_inline_tag(name)) raw.push_back(' ');
      continue;
    }
    if (c == '&') {
      const std::size_t next = decode_entity(html, i, raw);
      if (next != i) {
        i = next;
        continue;
      }
      raw.push_back('&');
      ++i;
      continue;
    }
    raw.push_back(c);
    ++i;
  }

  // collapse whitespace runs to single spaces and trim
  std::string out;
  out.reserve(raw.size());
  bool in_space = true;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

void count_tokens(const TokenList& tokens, WordCounts& counts) {
  for (const std::string& token : tokens) ++counts[token];
}

FrequencyHistogram histogram_from_counts(const WordCounts& counts,
                                         std::string source) {
  if (counts.empty()) throw InputError("empty corpus");
  std::map<std::uint64_t, std::uint64_t> bins;
  for (const auto& [word, count] : counts) ++bins[count];
  return FrequencyHistogram::from_bins(std::move(bins), std::move(source));
}

FrequencyHistogram build_histogram(const TokenList& tokens) {
  WordCounts counts;
  count_tokens(tokens, counts);
  return histogram_from_counts(counts);
}

}  // namespace repfreq
