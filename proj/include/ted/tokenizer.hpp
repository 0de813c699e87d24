#pragma once

// Tweet-aware tokenizer following the Twokenize rule set (O'Connor et al.,
// ARK TweetNLP): URLs, emoticons, hashtags, @-mentions, e-mail addresses,
// numbers, abbreviations and punctuation runs survive as single tokens;
// everything else splits on whitespace after edge punctuation is detached.
//
// The protected-pattern alternation is evaluated leftmost-first, so the
// order of alternatives below is significant. Matching runs over UTF-32
// with ICU character classes so \w, \s and \b follow Unicode semantics.

#include <boost/regex/icu.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ted {

namespace detail {

/// Decodes UTF-8; invalid or truncated sequences become U+FFFD.
inline std::wstring utf8_to_wide(std::string_view in) {
  static_assert(sizeof(wchar_t) == 4, "UTF-32 wchar_t required");
  std::wstring out;
  out.reserve(in.size());
  const auto* s = reinterpret_cast<const unsigned char*>(in.data());
  const std::size_t n = in.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = s[i];
    std::uint32_t cp = 0xFFFD;
    std::size_t len = 1;
    std::size_t extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      cp = c & 0x07;
      extra = 3;
    }
    if (extra > 0) {
      bool ok = false;
      if (i + extra < n) {
        ok = true;
        for (std::size_t k = 1; k <= extra; ++k) {
          if ((s[i + k] & 0xC0) != 0x80) {
            ok = false;
            break;
          }
          cp = (cp << 6) | (s[i + k] & 0x3F);
        }
        if (ok && ((extra == 2 && (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF))) ||
                   (extra == 3 && (cp < 0x10000 || cp > 0x10FFFF)))) {
          ok = false;
        }
      }
      if (ok) {
        len = extra + 1;
      } else {
        cp = 0xFFFD;
      }
    }
    out.push_back(static_cast<wchar_t>(cp));
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
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

inline std::string wide_to_utf8(std::wstring_view in) {
  std::string out;
  out.reserve(in.size());
  for (wchar_t c : in) append_utf8(out, static_cast<std::uint32_t>(c));
  return out;
}

inline std::string regex_or(std::initializer_list<std::string> items) {
  std::string out = "(?:";
  bool first = true;
  for (const auto& item : items) {
    if (!first) out += '|';
    out += item;
    first = false;
  }
  out += ')';
  return out;
}

struct TwokenizePatterns {
  std::string whitespace;
  std::string edge_left;
  std::string edge_right;
  std::string protected_tokens;
};

inline TwokenizePatterns build_twokenize_patterns() {
  const std::string punct_chars = R"(['"“”‘’.?!…,:;])";
  const std::string punct_seq = R"(['"“”‘’]+|[.?!,…]+|[:;]+)";
  const std::string entity = R"(&(?:amp|lt|gt|quot);)";

  const std::string url_start1 = R"((?:https?://|\bwww\.))";
  const std::string common_tlds =
      "(?:com|org|edu|gov|net|mil|aero|asia|biz|cat|coop|info|int|jobs|mobi|museum|name|pro|"
      "tel|travel|xxx)";
  const std::string cc_tlds =
      "(?:ac|ad|ae|af|ag|ai|al|am|an|ao|aq|ar|as|at|au|aw|ax|az|ba|bb|bd|be|bf|bg|bh|bi|bj|bm|"
      "bn|bo|br|bs|bt|bv|bw|by|bz|ca|cc|cd|cf|cg|ch|ci|ck|cl|cm|cn|co|cr|cs|cu|cv|cx|cy|cz|dd|"
      "de|dj|dk|dm|do|dz|ec|ee|eg|eh|er|es|et|eu|fi|fj|fk|fm|fo|fr|ga|gb|gd|ge|gf|gg|gh|gi|gl|"
      "gm|gn|gp|gq|gr|gs|gt|gu|gw|gy|hk|hm|hn|hr|ht|hu|id|ie|il|im|in|io|iq|ir|is|it|je|jm|jo|"
      "jp|ke|kg|kh|ki|km|kn|kp|kr|kw|ky|kz|la|lb|lc|li|lk|lr|ls|lt|lu|lv|ly|ma|mc|md|me|mg|mh|"
      "mk|ml|mm|mn|mo|mp|mq|mr|ms|mt|mu|mv|mw|mx|my|mz|na|nc|ne|nf|ng|ni|nl|no|np|nr|nu|nz|om|"
      "pa|pe|pf|pg|ph|pk|pl|pm|pn|pr|ps|pt|pw|py|qa|re|ro|rs|ru|rw|sa|sb|sc|sd|se|sg|sh|si|sj|"
      "sk|sl|sm|sn|so|sr|ss|st|su|sv|sy|sz|tc|td|tf|tg|th|tj|tk|tl|tm|tn|to|tp|tr|tt|tv|tw|tz|"
      "ua|ug|uk|us|uy|uz|va|vc|ve|vg|vi|vn|vu|wf|ws|ye|yt|za|zm|zw)";
  const std::string url_start2 = R"(\b(?:[A-Za-z\d-])+(?:\.[A-Za-z0-9]+){0,3}\.)" +
                                 regex_or({common_tlds, cc_tlds}) + R"((?:\.)" + cc_tlds +
                                 R"()?(?=\W|$))";
  const std::string url_body = R"((?:[^\.\s<>][^\s<>]*?)?)";
  const std::string url_extra_before_end = regex_or({punct_chars, entity}) + "+?";
  const std::string url_end = R"((?:\.\.+|[<>]|\s|$))";
  const std::string url = regex_or({url_start1, url_start2}) + url_body + "(?=(?:" +
                          url_extra_before_end + ")?" + url_end + ")";

  const std::string time_like = R"(\d+(?::\d+){1,2})";
  const std::string number_with_commas = R"((?:(?<!\d)\d{1,3},)+?\d{3}(?=(?:[^,\d]|$)))";
  const std::string num_comb =
      R"([\x{0024}\x{058f}\x{060b}\x{09f2}\x{09f3}\x{09fb}\x{0af1}\x{0bf9}\x{0e3f}\x{17db})"
      R"(\x{a838}\x{fdfc}\x{fe69}\x{ff04}\x{ffe0}\x{ffe1}\x{ffe5}\x{ffe6}\x{00a2}-\x{00a5})"
      R"(\x{20a0}-\x{20b9}]?\d+(?:\.\d+)+%?)";

  const std::string boundary_not_dot = regex_or({"$", R"(\s)", R"([“"?!,:;])", entity});
  const std::string aa1 = R"((?:[A-Za-z]\.){2,}(?=)" + boundary_not_dot + ")";
  const std::string aa2 = R"([^A-Za-z](?:[A-Za-z]\.){1,}[A-Za-z](?=)" + boundary_not_dot + ")";
  const std::string standard_abbreviations =
      R"(\b(?:[Mm]r|[Mm]rs|[Mm]s|[Dd]r|[Ss]r|[Jj]r|[Rr]ep|[Ss]en|[Ss]t)\.)";
  const std::string arbitrary_abbrev = regex_or({aa1, aa2, standard_abbreviations});
  const std::string separators = "(?:--+|―|—|~|–|=)";
  const std::string decorations =
      R"((?:[♫♪]+|[★☆]+|[♥❤♡]+|[\x{2639}-\x{263b}]+|[\x{e001}-\x{ebbb}]+))";
  const std::string things_that_split_words = R"([^\s\.,?"])";
  const std::string embedded_apostrophe =
      things_that_split_words + "+['’′]" + things_that_split_words + "*";

  const std::string normal_eyes = "[:=]";
  const std::string wink = "[;]";
  const std::string nose_area = "(?:|-|[^a-zA-Z0-9 ])";
  const std::string happy_mouths = R"([D\)\]\}]+)";
  const std::string sad_mouths = R"([\(\[\{]+)";
  const std::string tongue = "[pPd3]+";
  const std::string other_mouths = R"((?:[oO]+|[/\\]+|[vV]+|[Ss]+|[|]+))";

  const std::string bf_left = R"((♥|0|[oO]|°|[vV]|\$|[tT]|[xX]|;|\x{0ca0}|@|ʘ|•|・|◕|\^|¬|\*))";
  const std::string bf_center = R"((?:[\.]|[_-]+))";
  const std::string s3 = R"((?:--['"]))";
  const std::string s4 = R"((?:<|&lt;|>|&gt;)[\._-]+(?:<|&lt;|>|&gt;))";
  const std::string s5 = "(?:[.][_]+[.])";
  // Group 1 is the left eye inside the east-asian form, group 2 inside the
  // standalone basic face; each right eye back-references its own left eye.
  const auto basic_face = [&](const char* backref) {
    return "(?:" + bf_left + bf_center + backref + ")|" + s3 + "|" + s4 + "|" + s5;
  };

  const std::string ee_left = R"([＼\\ƪԄ\(（<>;ヽ\-=~\*]+)";
  const std::string ee_right = R"([\-=\);'"<>ʃ）/／ノﾉ丿╯σっµ~\*]+)";
  const std::string ee_symbol = R"([^A-Za-z0-9\s\(\)\*:=-])";
  const std::string east_emote =
      ee_left + "(?:" + basic_face(R"(\1)") + "|" + ee_symbol + ")+" + ee_right;

  const std::string oo_emote = "(?:[oO]" + bf_center + "[oO])";

  const std::string emoticon = regex_or({
      "(?:>|&gt;)?" + regex_or({normal_eyes, wink}) + regex_or({nose_area, "[Oo]"}) +
          regex_or({tongue + R"((?=\W|$|RT|rt|Rt))", other_mouths + R"((?=\W|$|RT|rt|Rt))",
                    sad_mouths, happy_mouths}),
      regex_or({"(?<= )", "^"}) + regex_or({sad_mouths, happy_mouths, other_mouths}) +
          nose_area + regex_or({normal_eyes, wink}) + "(?:<|&lt;)?",
      east_emote,
      basic_face(R"(\2)"),
      oo_emote,
  });

  const std::string hearts = "(?:<+/?3+)+";
  const std::string arrows = regex_or({"(?:<*[-―—=]*>+|<+[-―—=]*>*)", R"([\x{2190}-\x{21ff}]+)"});
  const std::string hashtag = "#[a-zA-Z0-9_]+";
  const std::string at_mention = "[@＠][a-zA-Z0-9_]+";
  const std::string bound = R"((?:\W|^|$))";
  const std::string email = regex_or({R"((?<=\W))", "^"}) +
                            R"([a-zA-Z0-9._%+-]+@[a-zA-Z0-9.-]+\.[a-zA-Z]{2,4}(?=)" + bound + ")";

  TwokenizePatterns p;
  p.whitespace = R"([\s\x{0020}\x{00a0}\x{1680}\x{180e}\x{202f}\x{205f}\x{3000}\x{2000}-\x{200a}]+)";
  const std::string edge_punct_run = R"(['"“”‘’«»{}\(\)\[\]\*&]+)";
  const std::string not_edge_punct = "[a-zA-Z0-9]";
  const std::string off_edge = R"((^|$|:|;|\s|\.|,))";
  p.edge_left = off_edge + "(" + edge_punct_run + ")(" + not_edge_punct + ")";
  p.edge_right = "(" + not_edge_punct + ")(" + edge_punct_run + ")" + off_edge;
  p.protected_tokens = regex_or({hearts, url, email, time_like, number_with_commas, num_comb,
                                 emoticon, arrows, entity, punct_seq, arbitrary_abbrev,
                                 separators, decorations, embedded_apostrophe, hashtag,
                                 at_mention});
  return p;
}

} // namespace detail

/// Compiled tokenizer. Immutable after construction; `tokenize` may be called
/// concurrently from many threads.
class Tokenizer {
public:
  Tokenizer() {
    const auto p = detail::build_twokenize_patterns();
    constexpr auto flags = boost::regex_constants::perl | boost::regex_constants::no_mod_m;
    whitespace_ = boost::make_u32regex(p.whitespace, flags);
    edge_left_ = boost::make_u32regex(p.edge_left, flags);
    edge_right_ = boost::make_u32regex(p.edge_right, flags);
    protected_ = boost::make_u32regex(p.protected_tokens, flags);
  }

  std::vector<std::string> tokenize(std::string_view text) const {
    std::wstring s = squeeze_whitespace(detail::utf8_to_wide(text));
    s = boost::u32regex_replace(s, edge_left_, std::wstring(L"$1$2 $3"));
    s = boost::u32regex_replace(s, edge_right_, std::wstring(L"$1 $2$3"));

    std::vector<std::string> tokens;
    std::size_t good_begin = 0;
    auto it = boost::make_u32regex_iterator(s, protected_);
    for (decltype(it) end; it != end; ++it) {
      const auto& m = (*it)[0];
      const auto first = static_cast<std::size_t>(m.first - s.begin());
      const auto last = static_cast<std::size_t>(m.second - s.begin());
      if (first == last) continue;
      split_on_spaces(std::wstring_view(s).substr(good_begin, first - good_begin), tokens);
      add_trimmed(std::wstring_view(s).substr(first, last - first), tokens);
      good_begin = last;
    }
    split_on_spaces(std::wstring_view(s).substr(good_begin), tokens);
    return tokens;
  }

private:
  std::wstring squeeze_whitespace(const std::wstring& in) const {
    std::wstring out = boost::u32regex_replace(in, whitespace_, std::wstring(L" "));
    return std::wstring(strip(out));
  }

  // Mirrors Python's str.strip(): drops leading/trailing Unicode whitespace.
  static std::wstring_view strip(std::wstring_view s) {
    auto is_space = [](wchar_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
  }

  static void add_trimmed(std::wstring_view piece, std::vector<std::string>& out) {
    piece = strip(piece);
    if (!piece.empty()) out.push_back(detail::wide_to_utf8(piece));
  }

  static void split_on_spaces(std::wstring_view good, std::vector<std::string>& out) {
    good = strip(good);
    std::size_t pos = 0;
    while (pos <= good.size()) {
      const std::size_t next = good.find(L' ', pos);
      const std::size_t stop = next == std::wstring_view::npos ? good.size() : next;
      add_trimmed(good.substr(pos, stop - pos), out);
      if (next == std::wstring_view::npos) break;
      pos = next + 1;
    }
  }

  boost::u32regex whitespace_;
  boost::u32regex edge_left_;
  boost::u32regex edge_right_;
  boost::u32regex protected_;
};

/// Shared process-wide tokenizer instance.
inline const Tokenizer& default_tokenizer() {
  static const Tokenizer instance;
  return instance;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  return default_tokenizer().tokenize(text);
}

} // namespace ted
