#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "grantmatch/text.hpp"

namespace grantmatch {

struct StripOptions {
    // Drop a '<' that does not open a complete tag instead of keeping it.
    bool drop_unmatched_lt = false;
};

namespace detail {

// Length of the tag starting at s[pos] == '<' under the pattern
//   <("[^"]*"|'[^']*'|[^'">])*>
// or npos when no match starts there. The three alternatives start with
// disjoint characters, so the greedy walk below is the only path a
// backtracking engine can take to a match.
inline std::size_t match_tag(std::string_view s, std::size_t pos) {
    std::size_t j = pos + 1;
    while (j < s.size()) {
        const char c = s[j];
        if (c == '>') return j + 1 - pos;
        if (c == '"' || c == '\'') {
            const auto close = s.find(c, j + 1);
            if (close == std::string_view::npos) return std::string_view::npos;
            j = close + 1;
        } else {
            ++j;
        }
    }
    return std::string_view::npos;
}

} // namespace detail

// Replaces each tag with one space. Text outside tags is copied unchanged.
inline std::string remove_tags(std::string_view html, StripOptions opts = {}) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        const auto lt = html.find('<', i);
        out.append(html.substr(i, lt == std::string_view::npos ? std::string_view::npos : lt - i));
        if (lt == std::string_view::npos) break;
        if (const auto len = detail::match_tag(html, lt); len != std::string_view::npos) {
            out += ' ';
            i = lt + len;
        } else {
            if (!opts.drop_unmatched_lt) out += '<';
            i = lt + 1;
        }
    }
    return out;
}

// Decodes &amp; &lt; &gt; &quot; &apos; and numeric references (&#NN; &#xHH;)
// in a single left-to-right pass. Anything else is left as is.
inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        const auto semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        const auto name = s.substr(i + 1, semi - i - 1);
        std::string decoded;
        if (name == "amp") decoded = "&";
        else if (name == "lt") decoded = "<";
        else if (name == "gt") decoded = ">";
        else if (name == "quot") decoded = "\"";
        else if (name == "apos") decoded = "'";
        else if (name.size() >= 2 && name[0] == '#') {
            const bool hex = name[1] == 'x' || name[1] == 'X';
            const auto digits = name.substr(hex ? 2 : 1);
            char32_t cp = 0;
            bool ok = !digits.empty();
            for (const char c : digits) {
                int d = -1;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                if (d < 0 || cp > 0x10FFFF) {
                    ok = false;
                    break;
                }
                cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(d);
            }
            if (ok) decoded = text::encode_utf8(cp == 0 ? 0xFFFD : cp);
        }
        if (decoded.empty()) {
            out += s[i++];
        } else {
            out += decoded;
            i = semi + 1;
        }
    }
    return out;
}

inline std::string strip_html(std::string_view html, StripOptions opts = {}) {
    return decode_entities(remove_tags(html, opts));
}

} // namespace grantmatch
