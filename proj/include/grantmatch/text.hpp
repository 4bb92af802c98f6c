#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "grantmatch/errors.hpp"

namespace grantmatch::text {

inline bool is_valid_utf8(std::string_view s) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
    const auto len = static_cast<std::int32_t>(s.size());
    std::int32_t i = 0;
    while (i < len) {
        UChar32 c = 0;
        U8_NEXT(p, i, len, c);
        if (c < 0) return false;
    }
    return true;
}

namespace detail {

inline const icu::Normalizer2& nfc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr)
        throw Error(std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
    return *n;
}

inline icu::UnicodeString to_nfc(const icu::UnicodeString& s) {
    UErrorCode status = U_ZERO_ERROR;
    auto out = nfc().normalize(s, status);
    if (U_FAILURE(status)) throw Error(std::string("NFC normalization failed: ") + u_errorName(status));
    return out;
}

inline std::string to_utf8(const icu::UnicodeString& s) {
    std::string out;
    s.toUTF8String(out);
    return out;
}

} // namespace detail

// Casefold + NFC, no whitespace handling. Used for individual tokens.
inline std::string fold(std::string_view s) {
    auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<std::int32_t>(s.size())));
    u = detail::to_nfc(u);
    u.foldCase(U_FOLD_CASE_DEFAULT);
    return detail::to_utf8(detail::to_nfc(u));
}

// Keyword/item normalization: casefold + NFC, whitespace runs collapsed to a
// single U+0020, leading/trailing whitespace removed.
inline std::string normalize(std::string_view s) {
    const auto folded = fold(s);
    const auto u = icu::UnicodeString::fromUTF8(folded);
    icu::UnicodeString out;
    bool pending_space = false;
    for (std::int32_t i = 0; i < u.length();) {
        const UChar32 c = u.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c)) {
            pending_space = !out.isEmpty();
            continue;
        }
        if (pending_space) out.append(static_cast<UChar>(0x20));
        pending_space = false;
        out.append(c);
    }
    return detail::to_utf8(out);
}

// UAX #29 word segmentation. Returns the raw (unnormalized) words in order,
// skipping segments made only of spaces or punctuation.
inline std::vector<std::string> unicode_words(std::string_view s) {
    auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<std::int32_t>(s.size())));
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw Error(std::string("ICU word break iterator unavailable: ") + u_errorName(status));
    it->setText(u);
    std::vector<std::string> words;
    std::int32_t start = it->first();
    for (std::int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
        if (it->getRuleStatus() == UBRK_WORD_NONE) continue;
        words.push_back(detail::to_utf8(u.tempSubStringBetween(start, end)));
    }
    return words;
}

inline std::size_t codepoint_length(std::string_view s) {
    std::size_t n = 0;
    for (const char ch : s)
        if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++n;
    return n;
}

// UTF-8 encoding of a single code point; invalid values become U+FFFD.
inline std::string encode_utf8(char32_t cp) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

} // namespace grantmatch::text
