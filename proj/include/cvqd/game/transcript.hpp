#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "../common.hpp"

namespace cvqd::game {

enum class MessageKind { SetupSets, BasisList, TeleportCorrections, MeasureOutcomes, TSubset, GadgetOutcome, ZBits, FinalAnswer, Verdict };

inline const char* to_string(MessageKind k) {
    switch (k) {
    case MessageKind::SetupSets: return "SetupSets";
    case MessageKind::BasisList: return "BasisList";
    case MessageKind::TeleportCorrections: return "TeleportCorrections";
    case MessageKind::MeasureOutcomes: return "MeasureOutcomes";
    case MessageKind::TSubset: return "TSubset";
    case MessageKind::GadgetOutcome: return "GadgetOutcome";
    case MessageKind::ZBits: return "ZBits";
    case MessageKind::FinalAnswer: return "FinalAnswer";
    case MessageKind::Verdict: return "Verdict";
    }
    return "?";
}

struct Message {
    int round = 0;
    int step = 0;
    std::string from, to;
    MessageKind kind = MessageKind::Verdict;
    nlohmann::json payload;
};

// Ordered message log of one run; recording can be switched off for bulk Monte Carlo.
class Transcript {
public:
    explicit Transcript(bool record = true) : record_(record) {}

    bool recording() const { return record_; }
    const std::vector<Message>& messages() const { return messages_; }

    void add(int round, int step, const std::string& from, const std::string& to, MessageKind kind,
             nlohmann::json payload = {}) {
        if (!record_ && kind != MessageKind::Verdict) return;
        if (!messages_.empty() && messages_.back().round == round && step < messages_.back().step)
            throw ProtocolError("message out of protocol order");
        messages_.push_back({round, step, from, to, kind, std::move(payload)});
    }

    // Same as add, with the payload built only when recording.
    template <class F>
    void add_lazy(int round, int step, const std::string& from, const std::string& to, MessageKind kind, F&& build) {
        if (!record_) return;
        add(round, step, from, to, kind, build());
    }

    bool has_verdict() const { return !messages_.empty() && messages_.back().kind == MessageKind::Verdict; }

    nlohmann::json messages_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& m : messages_)
            arr.push_back({{"round", m.round},
                           {"step", m.step},
                           {"from", m.from},
                           {"to", m.to},
                           {"kind", to_string(m.kind)},
                           {"payload", m.payload}});
        return arr;
    }

private:
    bool record_;
    std::vector<Message> messages_;
};

// Serializes concurrent appends of finished transcripts.
class TranscriptSink {
public:
    void append(nlohmann::json run) {
        std::lock_guard<std::mutex> lock(mu_);
        runs_.push_back(std::move(run));
    }
    std::vector<nlohmann::json> take() {
        std::lock_guard<std::mutex> lock(mu_);
        return std::move(runs_);
    }

private:
    std::mutex mu_;
    std::vector<nlohmann::json> runs_;
};

} // namespace cvqd::game
