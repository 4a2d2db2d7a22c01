#include "tonalign/candidates.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <mutex>

#include <json.hpp>

#include "tonalign/errors.hpp"
#include "tonalign/utf8.hpp"

namespace tonalign {

using nlohmann::json;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Vocabulary Vocabulary::build(std::vector<std::string> tokens, std::string eol_token,
                             const ToneLexicon& tone_lexicon) {
    Vocabulary vocab;
    bool has_eol = false;
    for (auto& tok : tokens) {
        if (tok == eol_token) has_eol = true;
    }
    if (!has_eol) tokens.push_back(eol_token);

    for (auto& tok : tokens) {
        if (vocab.ids_.contains(tok)) throw Error("duplicate vocabulary token: \"" + tok + "\"");
        const std::size_t id = vocab.tokens_.size();
        vocab.ids_.emplace(tok, id);
        const bool punct = is_punctuation_token(tok);
        if (tok != eol_token && !punct && !tone_lexicon.contains(tok)) {
            throw Error("vocabulary token \"" + tok + "\" has no tone entry");
        }
        vocab.punct_.push_back(punct);
        vocab.tokens_.push_back(std::move(tok));
    }
    vocab.eol_id_ = *vocab.id_of(eol_token);
    return vocab;
}

std::optional<std::size_t> Vocabulary::id_of(const std::string& token) const {
    const auto it = ids_.find(token);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

namespace {

class UniformModel : public CandidateModel {
public:
    explicit UniformModel(Vocabulary vocab)
        : vocab_(std::move(vocab)),
          logprob_(-std::log(static_cast<double>(vocab_.size()))) {}

    const Vocabulary& vocab() const override { return vocab_; }

    std::vector<double> next_logprobs(const std::string&,
                                      std::span<const std::string>) const override {
        return std::vector<double>(vocab_.size(), logprob_);
    }

private:
    Vocabulary vocab_;
    double logprob_;
};

class NgramModel : public CandidateModel {
public:
    NgramModel(const std::vector<std::vector<std::string>>& corpus, int order, double k,
               Vocabulary vocab)
        : vocab_(std::move(vocab)), order_(order), k_(k) {
        if (order < 1) throw Error("n-gram order must be >= 1");
        if (!(k > 0)) throw Error("smoothing k must be > 0");
        if (corpus.empty()) throw Error("n-gram training corpus is empty");
        for (const auto& seq : corpus) {
            std::vector<std::size_t> ids;
            ids.reserve(seq.size() + 1);
            for (const auto& tok : seq) {
                const auto id = vocab_.id_of(tok);
                if (!id) throw Error("corpus token \"" + tok + "\" not in vocabulary");
                ids.push_back(*id);
            }
            ids.push_back(vocab_.eol_id());
            for (std::size_t t = 0; t < ids.size(); ++t) {
                auto& slot = counts_[context_key(ids, t)];
                ++slot.total;
                ++slot.per_token[ids[t]];
            }
        }
    }

    const Vocabulary& vocab() const override { return vocab_; }

    std::vector<double> next_logprobs(const std::string&,
                                      std::span<const std::string> prefix) const override {
        std::vector<std::size_t> ids;
        ids.reserve(prefix.size());
        for (const auto& tok : prefix) {
            const auto id = vocab_.id_of(tok);
            ids.push_back(id ? *id : kBos);
        }
        const auto it = counts_.find(context_key(ids, ids.size()));
        const double vocab_size = static_cast<double>(vocab_.size());
        std::vector<double> out(vocab_.size());
        if (it == counts_.end()) {
            // Unseen context: add-k smoothing degenerates to uniform.
            const double lp = -std::log(vocab_size);
            for (auto& v : out) v = lp;
            return out;
        }
        const double denom = static_cast<double>(it->second.total) + k_ * vocab_size;
        for (std::size_t id = 0; id < out.size(); ++id) {
            const auto cit = it->second.per_token.find(id);
            const double count = cit == it->second.per_token.end()
                                     ? 0.0
                                     : static_cast<double>(cit->second);
            out[id] = std::log((count + k_) / denom);
        }
        return out;
    }

private:
    static constexpr std::size_t kBos = static_cast<std::size_t>(-1);

    struct Slot {
        std::uint64_t total = 0;
        std::unordered_map<std::size_t, std::uint64_t> per_token;
    };

    // Context of the token at position t: the previous order-1 ids, BOS padded.
    std::string context_key(const std::vector<std::size_t>& ids, std::size_t t) const {
        std::string key;
        for (int back = order_ - 1; back >= 1; --back) {
            const std::size_t pos = t >= static_cast<std::size_t>(back) ? t - back : kBos;
            const std::size_t id =
                pos == kBos ? kBos : ids[pos];
            key += std::to_string(id == kBos ? static_cast<long long>(-1)
                                             : static_cast<long long>(id));
            key += ',';
        }
        return key;
    }

    Vocabulary vocab_;
    int order_;
    double k_;
    std::unordered_map<std::string, Slot> counts_;
};

}  // namespace

std::unique_ptr<CandidateModel> make_uniform_model(Vocabulary vocab) {
    return std::make_unique<UniformModel>(std::move(vocab));
}

std::unique_ptr<CandidateModel> train_ngram(const std::vector<std::vector<std::string>>& corpus,
                                            int order, double smoothing_k, Vocabulary vocab) {
    return std::make_unique<NgramModel>(corpus, order, smoothing_k, std::move(vocab));
}

CallbackTransport::CallbackTransport(std::function<std::string(const std::string&)> handler)
    : handler_(std::move(handler)) {}

void CallbackTransport::send_line(const std::string& line) {
    pending_.push_back(handler_(line));
}

std::optional<std::string> CallbackTransport::recv_line() {
    if (pending_.empty()) return std::nullopt;
    std::string line = std::move(pending_.front());
    pending_.erase(pending_.begin());
    return line;
}

SubprocessTransport::SubprocessTransport(const std::string& command, int timeout_ms)
    : timeout_ms_(timeout_ms) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw Error("failed to create pipes for external model");
    }
    const pid_t pid = fork();
    if (pid < 0) throw Error("fork failed for external model");
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    pid_ = pid;
}

SubprocessTransport::~SubprocessTransport() {
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
    if (pid_ > 0) {
        int status = 0;
        for (int i = 0; i < 20; ++i) {
            if (waitpid(static_cast<pid_t>(pid_), &status, WNOHANG) != 0) return;
            usleep(50 * 1000);
        }
        kill(static_cast<pid_t>(pid_), SIGKILL);
        waitpid(static_cast<pid_t>(pid_), &status, 0);
    }
}

void SubprocessTransport::send_line(const std::string& line) {
    std::string payload = line;
    payload += '\n';
    std::size_t written = 0;
    while (written < payload.size()) {
        const ssize_t n = write(in_fd_, payload.data() + written, payload.size() - written);
        if (n <= 0) throw DecodeError("external model: write failed");
        written += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> SubprocessTransport::recv_line() {
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        pollfd pfd{out_fd_, POLLIN, 0};
        const int ready = poll(&pfd, 1, timeout_ms_);
        if (ready <= 0) return std::nullopt;  // timeout or error
        char chunk[4096];
        const ssize_t n = read(out_fd_, chunk, sizeof(chunk));
        if (n <= 0) return std::nullopt;  // EOF
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

namespace {

class ExternalStreamModel : public CandidateModel {
public:
    ExternalStreamModel(Vocabulary vocab, std::shared_ptr<LineTransport> transport)
        : vocab_(std::move(vocab)), transport_(std::move(transport)) {}

    const Vocabulary& vocab() const override { return vocab_; }

    std::vector<double> next_logprobs(const std::string& source,
                                      std::span<const std::string> prefix) const override {
        json request;
        request["source"] = source;
        request["prefix"] = std::vector<std::string>(prefix.begin(), prefix.end());

        std::lock_guard<std::mutex> lock(mutex_);
        transport_->send_line(request.dump());
        const auto reply = transport_->recv_line();
        if (!reply) throw DecodeError("external model: peer timeout or EOF");

        json parsed;
        try {
            parsed = json::parse(*reply);
        } catch (const json::parse_error& e) {
            throw DecodeError(std::string("external model: malformed response: ") + e.what());
        }
        if (!parsed.is_object() || !parsed.contains("candidates") ||
            !parsed["candidates"].is_array()) {
            throw DecodeError("external model: response missing candidates array");
        }

        std::vector<double> out(vocab_.size(), kNegInf);
        for (const auto& entry : parsed["candidates"]) {
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
                !entry[1].is_number()) {
                throw DecodeError("external model: candidate entries must be [token, logprob]");
            }
            const auto id = vocab_.id_of(entry[0].get<std::string>());
            if (!id) continue;  // outside our vocabulary, carries no mass for us
            out[*id] = entry[1].get<double>();
        }

        double mass = 0.0;
        for (const double lp : out) {
            if (lp > kNegInf) mass += std::exp(lp);
        }
        if (mass <= 0.0) throw DecodeError("external model: response carries no probability mass");
        if (std::abs(mass - 1.0) > 1e-3) {
            std::cerr << "tonalign: external model distribution sums to " << mass
                      << ", renormalizing\n";
            const double shift = std::log(mass);
            for (double& lp : out) {
                if (lp > kNegInf) lp -= shift;
            }
        }
        return out;
    }

private:
    Vocabulary vocab_;
    std::shared_ptr<LineTransport> transport_;
    mutable std::mutex mutex_;
};

}  // namespace

std::unique_ptr<CandidateModel> make_external_stream_model(
    Vocabulary vocab, std::shared_ptr<LineTransport> transport) {
    return std::make_unique<ExternalStreamModel>(std::move(vocab), std::move(transport));
}

}  // namespace tonalign
