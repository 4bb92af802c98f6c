#pragma once

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "grantmatch/errors.hpp"
#include "grantmatch/text.hpp"

extern char** environ;

namespace grantmatch {

struct TokenizerConfig {
    // "unicode" (UAX #29 words), "whitespace", or "external".
    std::string name = "unicode";
    // Shell command for "external": reads one paragraph per line on stdin and
    // answers each with one line of space-separated tokens.
    std::string command;
    std::size_t min_len = 2; // in code points
    std::set<std::string, std::less<>> stopwords; // normalized
    std::vector<std::string> phrases;             // normalized taxonomy keywords
};

// One word per line, '#' starts a comment. Entries are normalized.
inline std::set<std::string, std::less<>> load_stopwords(std::istream& in) {
    std::set<std::string, std::less<>> words;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (auto w = text::normalize(line); !w.empty()) words.insert(std::move(w));
    }
    return words;
}

class WordSplitter {
public:
    virtual ~WordSplitter() = default;
    // Raw words of `paragraph`, in order.
    virtual std::vector<std::string> split(std::string_view paragraph) = 0;
};

class UnicodeWordSplitter final : public WordSplitter {
public:
    std::vector<std::string> split(std::string_view paragraph) override { return text::unicode_words(paragraph); }
};

namespace detail {

inline std::vector<std::string> split_on_space(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r' || s[i] == '\f' || s[i] == '\v'))
            ++i;
        const auto start = i;
        while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r' || s[i] == '\f' || s[i] == '\v'))
            ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

} // namespace detail

class WhitespaceSplitter final : public WordSplitter {
public:
    std::vector<std::string> split(std::string_view paragraph) override { return detail::split_on_space(paragraph); }
};

// Runs `sh -c command` once and talks to it over a socket pair: one paragraph
// (newlines flattened to spaces) per request line, one token line per reply.
class ExternalSplitter final : public WordSplitter {
public:
    explicit ExternalSplitter(std::string command) : command_(std::move(command)) {
        int fds[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
            throw ConfigError(std::string("cannot create tokenizer channel: ") + std::strerror(errno));
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
        std::string sh = "/bin/sh";
        std::string dash_c = "-c";
        char* argv[] = {sh.data(), dash_c.data(), command_.data(), nullptr};
        const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        if (rc != 0) {
            ::close(fds[0]);
            throw ConfigError("cannot start external tokenizer '" + command_ + "': " + std::strerror(rc));
        }
        fd_ = fds[0];
    }

    ExternalSplitter(const ExternalSplitter&) = delete;
    ExternalSplitter& operator=(const ExternalSplitter&) = delete;

    ~ExternalSplitter() override {
        ::shutdown(fd_, SHUT_WR);
        ::close(fd_);
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }

    std::vector<std::string> split(std::string_view paragraph) override {
        std::string request(paragraph);
        std::replace_if(request.begin(), request.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
        request += '\n';

        std::lock_guard lock(mutex_);
        for (std::size_t sent = 0; sent < request.size();) {
            const auto n = ::send(fd_, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw InputError("external tokenizer '" + command_ + "' stopped accepting input");
            }
            sent += static_cast<std::size_t>(n);
        }
        for (;;) {
            if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
                auto tokens = detail::split_on_space(std::string_view(buffer_).substr(0, nl));
                buffer_.erase(0, nl + 1);
                return tokens;
            }
            char chunk[4096];
            const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) throw InputError("external tokenizer '" + command_ + "' closed its output");
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    std::string command_;
    pid_t pid_ = -1;
    int fd_ = -1;
    std::string buffer_;
    std::mutex mutex_;
};

// Turns a paragraph into its item set: normalized words minus stopwords and
// short words, plus every configured phrase whose words occur contiguously.
// Phrase items bypass the stopword and length filters.
class Tokenizer {
public:
    explicit Tokenizer(TokenizerConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.name == "unicode") {
            splitter_ = std::make_shared<UnicodeWordSplitter>();
        } else if (cfg_.name == "whitespace") {
            splitter_ = std::make_shared<WhitespaceSplitter>();
        } else if (cfg_.name == "external") {
            if (cfg_.command.empty()) throw ConfigError("external tokenizer requires a command");
            splitter_ = std::make_shared<ExternalSplitter>(cfg_.command);
        } else {
            throw ConfigError("unknown tokenizer '" + cfg_.name + "'");
        }
        for (const auto& p : cfg_.phrases) {
            auto words = normalized_words(p);
            if (words.empty()) continue;
            const auto first = words.front();
            phrases_by_first_word_[first].push_back({text::normalize(p), std::move(words)});
        }
    }

    const TokenizerConfig& config() const noexcept { return cfg_; }

    // Normalized words of `paragraph` in order, before any filtering.
    std::vector<std::string> normalized_words(std::string_view paragraph) const {
        std::vector<std::string> words;
        for (const auto& raw : splitter_->split(paragraph))
            if (auto w = text::normalize(raw); !w.empty()) words.push_back(std::move(w));
        return words;
    }

    std::set<std::string> tokenize(std::string_view paragraph) const {
        const auto words = normalized_words(paragraph);
        std::set<std::string> items;
        for (const auto& w : words)
            if (!cfg_.stopwords.contains(w) && text::codepoint_length(w) >= cfg_.min_len) items.insert(w);
        for (std::size_t i = 0; i < words.size(); ++i) {
            const auto it = phrases_by_first_word_.find(words[i]);
            if (it == phrases_by_first_word_.end()) continue;
            for (const auto& phrase : it->second) {
                if (phrase.words.size() > words.size() - i) continue;
                if (std::equal(phrase.words.begin(), phrase.words.end(), words.begin() + static_cast<std::ptrdiff_t>(i)))
                    items.insert(phrase.item);
            }
        }
        return items;
    }

private:
    struct Phrase {
        std::string item;
        std::vector<std::string> words;
    };

    TokenizerConfig cfg_;
    std::shared_ptr<WordSplitter> splitter_;
    std::map<std::string, std::vector<Phrase>, std::less<>> phrases_by_first_word_;
};

inline std::set<std::string> tokenize(std::string_view paragraph, const TokenizerConfig& cfg) {
    return Tokenizer(cfg).tokenize(paragraph);
}

} // namespace grantmatch
