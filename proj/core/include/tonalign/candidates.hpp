#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tonalign/tones.hpp"

namespace tonalign {

/// Ordered token inventory for decoding: Mandarin syllable tokens,
/// punctuation tokens, and one end-of-line token. Every non-punctuation
/// token must carry a tone in the given lexicon.
class Vocabulary {
public:
    static Vocabulary build(std::vector<std::string> tokens, std::string eol_token,
                            const ToneLexicon& tone_lexicon);

    std::size_t size() const { return tokens_.size(); }
    const std::string& token(std::size_t id) const { return tokens_[id]; }
    std::span<const std::string> tokens() const { return tokens_; }
    std::size_t eol_id() const { return eol_id_; }
    bool is_punct(std::size_t id) const { return punct_[id]; }
    std::optional<std::size_t> id_of(const std::string& token) const;

private:
    std::vector<std::string> tokens_;
    std::vector<bool> punct_;
    std::unordered_map<std::string, std::size_t> ids_;
    std::size_t eol_id_ = 0;
};

/// Next-token distribution provider. Implementations must be deterministic
/// and return one log-probability per vocabulary token (aligned by id,
/// -inf allowed), summing to 1 +- 1e-6 in probability space.
class CandidateModel {
public:
    virtual ~CandidateModel() = default;
    virtual const Vocabulary& vocab() const = 0;
    virtual std::vector<double> next_logprobs(const std::string& source,
                                              std::span<const std::string> prefix) const = 0;
};

/// log(1/|V|) for every token, regardless of prefix.
std::unique_ptr<CandidateModel> make_uniform_model(Vocabulary vocab);

/// Add-k smoothed token n-gram trained on the corpus sequences (an implicit
/// end-of-line is appended to each sequence). The source side is ignored.
std::unique_ptr<CandidateModel> train_ngram(const std::vector<std::vector<std::string>>& corpus,
                                            int order, double smoothing_k, Vocabulary vocab);

/// Newline-delimited request/response byte channel (pipe, socket, loopback).
class LineTransport {
public:
    virtual ~LineTransport() = default;
    virtual void send_line(const std::string& line) = 0;
    /// One line without the trailing newline; nullopt on EOF/timeout.
    virtual std::optional<std::string> recv_line() = 0;
};

/// In-process transport for tests and embedding: each request line is
/// answered by the callback.
class CallbackTransport : public LineTransport {
public:
    explicit CallbackTransport(std::function<std::string(const std::string&)> handler);
    void send_line(const std::string& line) override;
    std::optional<std::string> recv_line() override;

private:
    std::function<std::string(const std::string&)> handler_;
    std::vector<std::string> pending_;
};

/// Bidirectional pipe to a spawned child process speaking the candidate
/// protocol. recv_line honors the timeout; the child is reaped on destruction.
class SubprocessTransport : public LineTransport {
public:
    explicit SubprocessTransport(const std::string& command, int timeout_ms = 30000);
    ~SubprocessTransport() override;
    SubprocessTransport(const SubprocessTransport&) = delete;
    SubprocessTransport& operator=(const SubprocessTransport&) = delete;

    void send_line(const std::string& line) override;
    std::optional<std::string> recv_line() override;

private:
    int in_fd_ = -1;   // child stdin (we write)
    int out_fd_ = -1;  // child stdout (we read)
    long pid_ = -1;
    int timeout_ms_;
    std::string buffer_;
};

/// Adapter for an external scorer. Requests are
/// `{"source": str, "prefix": [token, ...]}` and responses
/// `{"candidates": [[token, logprob], ...]}`, one JSON record per line.
/// Tokens the peer omits get -inf; distributions off by more than 1e-3 in
/// probability mass are renormalized with a warning to stderr.
std::unique_ptr<CandidateModel> make_external_stream_model(
    Vocabulary vocab, std::shared_ptr<LineTransport> transport);

}  // namespace tonalign
