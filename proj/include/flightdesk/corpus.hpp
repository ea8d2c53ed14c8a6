#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "flightdesk/domain.hpp"
#include "flightdesk/parallel.hpp"
#include "flightdesk/rng.hpp"
#include "flightdesk/vocab.hpp"

namespace flightdesk {

// ---------------------------------------------------------------------------
// Dialogue participants and the turn loop
// ---------------------------------------------------------------------------

struct TurnOutput {
    std::vector<TokenId> tokens;            // utterance tokens, no markers
    std::optional<FinalAction> action;      // set when the agent closes the task
    bool truncated = false;
};

struct Participant {
    virtual ~Participant() = default;
    virtual TurnOutput next_turn(const std::vector<Utterance>& history) = 0;
};

// A finished or truncated conversation. `action` is empty only on truncation.
struct DialogueRun {
    std::vector<Utterance> turns;
    std::optional<FinalAction> action;
    bool truncated = false;

    Dialogue to_dialogue() const {
        if (!action.has_value()) throw DataError("dialogue truncated without final action");
        return Dialogue{turns, *action};
    }
};

// Customer opens; utterances alternate until the agent emits a final action
// or the turn cap is hit.
inline DialogueRun run_dialogue(Participant& customer, Participant& agent, int max_turns) {
    DialogueRun run;
    for (int t = 0; t < max_turns; ++t) {
        const bool customer_turn = (t % 2 == 0);
        Participant& side = customer_turn ? customer : agent;
        TurnOutput out = side.next_turn(run.turns);
        if (out.truncated) {
            run.truncated = true;
            return run;
        }
        if (out.action.has_value()) {
            run.action = out.action;
            return run;
        }
        run.turns.push_back(
            Utterance{customer_turn ? Speaker::customer : Speaker::agent, std::move(out.tokens)});
    }
    run.truncated = true;
    return run;
}

// ---------------------------------------------------------------------------
// Scripted simulators
// ---------------------------------------------------------------------------

struct ScriptedAgentConfig {
    double error_rate_flight = 0.25;  // books a uniformly random non-valid flight
    double error_rate_status = 0.18;  // emits a wrong action kind
    int template_diversity = 2;       // utterance variants in use, 1..3

    void validate() const {
        if (error_rate_flight < 0 || error_rate_flight > 1 || error_rate_status < 0 ||
            error_rate_status > 1)
            throw ConfigError("error rates must lie in [0,1]");
        if (template_diversity < 1 || template_diversity > 3)
            throw ConfigError("template_diversity must be 1..3");
    }
};

namespace detail {

class TemplatePicker {
  public:
    TemplatePicker(Rng& rng, int diversity) : rng_(rng), diversity_(diversity) {}
    int pick() { return static_cast<int>(rng_.next_below(static_cast<std::uint64_t>(diversity_))); }

  private:
    Rng& rng_;
    int diversity_;
};

inline bool contains_token(const std::vector<TokenId>& toks, TokenId t) {
    return std::find(toks.begin(), toks.end(), t) != toks.end();
}

}  // namespace detail

// The customer side: greets, states name and goal, reveals every non-`any`
// requirement in random order, then reacts to the agent's resolution. Its
// utterances depend only on c_h and its own dice, never on the flight table.
class ScriptedCustomerPolicy : public Participant {
  public:
    ScriptedCustomerPolicy(const HiddenContext& hidden, const Vocabulary& vocab,
                           const ScriptedAgentConfig& style, std::uint64_t seed)
        : c_h_(hidden), v_(vocab), rng_(derive_seed(seed, 0xCU57)), pick_(rng_, style.template_diversity) {
        for (int s = 0; s < kNumSlots; ++s)
            if (c_h_.requirements[s].kind != ConstraintKind::any)
                reveal_order_.push_back(static_cast<Slot>(s));
        rng_.shuffle(reveal_order_);
    }

    TurnOutput next_turn(const std::vector<Utterance>& history) override {
        TurnOutput out;
        switch (phase_) {
            case Phase::greet:
                out.tokens = greeting();
                phase_ = Phase::name_goal;
                break;
            case Phase::name_goal:
                out.tokens = name_goal();
                phase_ = (c_h_.goal == Goal::cancel) ? Phase::react : Phase::reveal;
                break;
            case Phase::reveal:
                if (next_reveal_ < reveal_order_.size()) {
                    out.tokens = requirement_chunk();
                } else {
                    out.tokens = done_phrase();
                    phase_ = Phase::react;
                }
                break;
            case Phase::react:
                out.tokens = reaction(history);
                phase_ = Phase::finished;
                break;
            case Phase::finished:
                out.tokens = {v_.word("thanks")};
                break;
        }
        return out;
    }

  private:
    enum class Phase { greet, name_goal, reveal, react, finished };

    std::vector<TokenId> greeting() {
        switch (pick_.pick()) {
            case 0: return {v_.word("hello")};
            case 1: return {v_.word("hi")};
            default: return {v_.word("hey")};
        }
    }

    std::vector<TokenId> name_goal() {
        std::vector<TokenId> t;
        const int variant = pick_.pick();
        if (variant == 2)
            t = {v_.word("this"), v_.word("is")};
        else
            t = {v_.word("my"), v_.word("name"), v_.word("is")};
        t.push_back(v_.first_name(c_h_.first_name));
        t.push_back(v_.last_name(c_h_.last_name));
        t.push_back(v_.word("i"));
        t.push_back(v_.word(variant == 1 ? "need" : "want"));
        t.push_back(v_.word("to"));
        t.push_back(v_.goal_token(c_h_.goal));
        if (c_h_.goal == Goal::book) {
            t.push_back(v_.word("a"));
            t.push_back(v_.word("flight"));
        } else {
            t.push_back(v_.word("my"));
            t.push_back(v_.word("reservation"));
        }
        return t;
    }

    std::vector<TokenId> requirement_chunk() {
        std::vector<TokenId> t;
        switch (pick_.pick()) {
            case 0: t = {v_.word("i"), v_.word("want")}; break;
            case 1: t = {v_.word("i"), v_.word("need")}; break;
            default: t = {v_.word("i"), v_.word("would"), v_.word("like")}; break;
        }
        const std::size_t chunk_end = std::min(next_reveal_ + kChunkSize, reveal_order_.size());
        for (std::size_t i = next_reveal_; i < chunk_end; ++i) {
            if (i != next_reveal_) t.push_back(v_.word("and"));
            const Slot slot = reveal_order_[i];
            const Requirement& r = c_h_.requirement(slot);
            const auto marker = v_.slot_marker(slot);
            t.insert(t.end(), marker.begin(), marker.end());
            if (r.kind == ConstraintKind::at_most) {
                t.push_back(v_.word("at"));
                t.push_back(v_.word("most"));
            }
            const auto value = v_.render_slot_value(slot, r.value);
            t.insert(t.end(), value.begin(), value.end());
        }
        next_reveal_ = chunk_end;
        return t;
    }

    std::vector<TokenId> done_phrase() {
        switch (pick_.pick()) {
            case 0: return {v_.word("that"), v_.word("is"), v_.word("all")};
            case 1: return {v_.word("done")};
            default: return {v_.word("that"), v_.word("is"), v_.word("all"), v_.word("thanks")};
        }
    }

    std::vector<TokenId> reaction(const std::vector<Utterance>& history) {
        // A concrete flight offer always carries flight-number digits; every
        // negative resolution carries none.
        bool offer_with_flight = false;
        if (!history.empty()) {
            for (TokenId tok : history.back().tokens)
                if (v_.is_digit(tok)) offer_with_flight = true;
        }
        if (c_h_.goal != Goal::cancel && offer_with_flight) {
            std::vector<TokenId> t;
            if (pick_.pick() != 1) t.push_back(v_.word("yes"));
            t.push_back(v_.word("please"));
            t.push_back(v_.goal_token(c_h_.goal));
            t.push_back(v_.word("it"));
            return t;
        }
        switch (pick_.pick()) {
            case 0: return {v_.word("ok"), v_.word("thank"), v_.word("you")};
            case 1: return {v_.word("ok"), v_.word("thanks")};
            default: return {v_.word("thanks"), v_.word("bye")};
        }
    }

    static constexpr std::size_t kChunkSize = 3;

    HiddenContext c_h_;
    const Vocabulary& v_;
    Rng rng_;
    detail::TemplatePicker pick_;
    std::vector<Slot> reveal_order_;
    std::size_t next_reveal_ = 0;
    Phase phase_ = Phase::greet;
};

// The agent side of the scripted corpus. It consults the ground-truth oracle,
// then injects wrong-status / wrong-flight mistakes at the configured rates so
// the offline dataset is realistically sub-optimal.
class ScriptedAgentPolicy : public Participant {
  public:
    ScriptedAgentPolicy(const Scenario& scenario, const Vocabulary& vocab,
                        const ScriptedAgentConfig& cfg, std::uint64_t seed)
        : v_(vocab), rng_(derive_seed(seed, 0xA6E)), pick_(rng_, cfg.template_diversity) {
        decided_ = decide(scenario, cfg);
    }

    TurnOutput next_turn(const std::vector<Utterance>& history) override {
        TurnOutput out;
        switch (phase_) {
            case Phase::greet:
                out.tokens = greeting_reply();
                phase_ = Phase::serve;
                break;
            case Phase::serve: {
                const auto& last = history.back().tokens;
                // cancel needs no requirements, so resolve right after the goal
                const bool resolve_now =
                    (goal_is_cancel_ && states_goal(last)) || ends_requirements(last);
                if (resolve_now) {
                    out.tokens = resolution();
                    phase_ = Phase::close;
                } else {
                    out.tokens = ack();
                }
                break;
            }
            case Phase::close:
                out.action = decided_;
                break;
        }
        return out;
    }

    const FinalAction& decided_action() const { return decided_; }

  private:
    enum class Phase { greet, serve, close };

    FinalAction decide(const Scenario& sc, const ScriptedAgentConfig& cfg) {
        goal_is_cancel_ = sc.hidden.goal == Goal::cancel;
        const auto valid = valid_actions(sc.hidden, sc.observed);
        FinalAction a = valid[rng_.next_below(valid.size())];
        if (rng_.bernoulli(cfg.error_rate_status)) a = flip_status(a, sc);
        if (a.flight_number.has_value() && rng_.bernoulli(cfg.error_rate_flight)) {
            std::vector<int> wrong;
            for (const Flight& f : sc.observed.flights)
                if (!flight_matches(f, sc.hidden)) wrong.push_back(f.flight_number);
            if (!wrong.empty()) a.flight_number = wrong[rng_.next_below(wrong.size())];
        }
        return a;
    }

    FinalAction flip_status(FinalAction a, const Scenario& sc) {
        switch (a.kind) {
            case ActionKind::book:
            case ActionKind::change:
                a.kind = ActionKind::no_flight;
                a.flight_number.reset();
                break;
            case ActionKind::no_flight: {
                a.kind = sc.hidden.goal == Goal::book ? ActionKind::book : ActionKind::change;
                const auto& fl = sc.observed.flights;
                a.flight_number = fl[rng_.next_below(fl.size())].flight_number;
                break;
            }
            case ActionKind::cancel: a.kind = ActionKind::no_reservation; break;
            case ActionKind::no_reservation: a.kind = ActionKind::cancel; break;
        }
        return a;
    }

    bool states_goal(const std::vector<TokenId>& toks) const {
        return detail::contains_token(toks, v_.word("book")) ||
               detail::contains_token(toks, v_.word("cancel")) ||
               detail::contains_token(toks, v_.word("change"));
    }

    bool ends_requirements(const std::vector<TokenId>& toks) const {
        return detail::contains_token(toks, v_.word("all")) ||
               detail::contains_token(toks, v_.word("done"));
    }

    std::vector<TokenId> greeting_reply() {
        switch (pick_.pick()) {
            case 0:
                return {v_.word("hello"), v_.word("how"), v_.word("can"), v_.word("i"),
                        v_.word("help"), v_.word("you")};
            case 1:
                return {v_.word("hi"), v_.word("how"), v_.word("can"), v_.word("i"),
                        v_.word("help")};
            default:
                return {v_.word("hello"), v_.word("what"), v_.word("can"), v_.word("i"),
                        v_.word("do"), v_.word("for"), v_.word("you")};
        }
    }

    std::vector<TokenId> ack() {
        switch (pick_.pick()) {
            case 0: return {v_.word("ok")};
            case 1: return {v_.word("sure")};
            default: return {v_.word("noted")};
        }
    }

    std::vector<TokenId> resolution() {
        switch (decided_.kind) {
            case ActionKind::book:
            case ActionKind::change: {
                const auto digits = v_.render_number(*decided_.flight_number);
                std::vector<TokenId> t;
                switch (pick_.pick()) {
                    case 0: t = {v_.word("i"), v_.word("found"), v_.word("flight")}; break;
                    case 1: t = {v_.word("i"), v_.word("have"), v_.word("flight")}; break;
                    default: t = {v_.word("flight")}; break;
                }
                t.insert(t.end(), digits.begin(), digits.end());
                if (t.front() == v_.word("flight")) {
                    t.push_back(v_.word("is"));
                    t.push_back(v_.word("available"));
                }
                return t;
            }
            case ActionKind::no_flight:
                switch (pick_.pick()) {
                    case 0:
                        return {v_.word("sorry"), v_.word("no"), v_.word("flight"),
                                v_.word("matches")};
                    case 1: return {v_.word("sorry"), v_.word("nothing"), v_.word("matches")};
                    default:
                        return {v_.word("no"), v_.word("flight"), v_.word("is"),
                                v_.word("available")};
                }
            case ActionKind::cancel:
                switch (pick_.pick()) {
                    case 0:
                        return {v_.word("i"), v_.word("cancelled"), v_.word("your"),
                                v_.word("reservation")};
                    case 1:
                        return {v_.word("your"), v_.word("reservation"), v_.word("is"),
                                v_.word("cancelled")};
                    default: return {v_.word("ok"), v_.word("i"), v_.word("cancelled"), v_.word("it")};
                }
            case ActionKind::no_reservation:
                switch (pick_.pick()) {
                    case 0:
                        return {v_.word("you"), v_.word("have"), v_.word("no"),
                                v_.word("reservation")};
                    case 1:
                        return {v_.word("sorry"), v_.word("no"), v_.word("reservation"),
                                v_.word("exists")};
                    default:
                        return {v_.word("i"), v_.word("found"), v_.word("no"),
                                v_.word("reservation")};
                }
        }
        return {};
    }

    const Vocabulary& v_;
    Rng rng_;
    detail::TemplatePicker pick_;
    FinalAction decided_;
    bool goal_is_cancel_ = false;
    Phase phase_ = Phase::greet;
};

// ---------------------------------------------------------------------------
// Offline dataset generation and filtering
// ---------------------------------------------------------------------------

enum class Provenance : int { scripted = 0, relabeled = 1 };

struct CorpusRecord {
    Scenario scenario;
    Dialogue dialogue;
    int reward = 0;
    Provenance provenance = Provenance::scripted;

    bool operator==(const CorpusRecord&) const = default;
};

inline constexpr int kScriptedMaxTurns = 24;

inline CorpusRecord generate_record(std::uint64_t record_seed, const EnvConfig& env,
                                    const Vocabulary& vocab, const ScriptedAgentConfig& agent_cfg) {
    const Scenario sc = sample_scenario(record_seed, env);
    ScriptedCustomerPolicy customer(sc.hidden, vocab, agent_cfg, derive_seed(record_seed, 1));
    ScriptedAgentPolicy agent(sc, vocab, agent_cfg, derive_seed(record_seed, 2));
    const DialogueRun run = run_dialogue(customer, agent, kScriptedMaxTurns);
    CorpusRecord rec;
    rec.scenario = sc;
    rec.dialogue = run.to_dialogue();
    rec.reward = reward(rec.dialogue, sc.hidden, sc.observed);
    rec.provenance = Provenance::scripted;
    return rec;
}

inline std::vector<CorpusRecord> generate_corpus(std::size_t n, const EnvConfig& env,
                                                 const ScriptedAgentConfig& agent_cfg,
                                                 std::uint64_t seed, unsigned threads = 1) {
    env.validate();
    agent_cfg.validate();
    if (n < 1) throw ConfigError("corpus size must be >= 1");
    const Vocabulary vocab(env);
    std::vector<CorpusRecord> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        out[i] = generate_record(derive_seed(seed, i), env, vocab, agent_cfg);
    });
    return out;
}

inline bool turns_contain_subsequence(const Dialogue& d, const std::vector<TokenId>& needle) {
    for (const Utterance& u : d.turns) {
        if (u.tokens.size() < needle.size()) continue;
        for (std::size_t i = 0; i + needle.size() <= u.tokens.size(); ++i) {
            bool hit = true;
            for (std::size_t j = 0; j < needle.size(); ++j) {
                if (u.tokens[i + j] != needle[j]) {
                    hit = false;
                    break;
                }
            }
            if (hit) return true;
        }
    }
    return false;
}

// String-matching heuristic: the goal token and the value tokens of every
// constrained requirement must literally occur somewhere in the turns.
inline bool passes_string_heuristics(const CorpusRecord& rec, const Vocabulary& vocab) {
    const HiddenContext& c_h = rec.scenario.hidden;
    if (!turns_contain_subsequence(rec.dialogue, {vocab.goal_token(c_h.goal)})) return false;
    for (int s = 0; s < kNumSlots; ++s) {
        const Slot slot = static_cast<Slot>(s);
        const Requirement& r = c_h.requirement(slot);
        if (r.kind == ConstraintKind::any) continue;
        if (!turns_contain_subsequence(rec.dialogue, vocab.render_slot_value(slot, r.value)))
            return false;
    }
    return true;
}

// Keeps successful records whose dialogue also passes the string heuristics.
inline std::vector<CorpusRecord> filter_corpus(const std::vector<CorpusRecord>& records,
                                               const Vocabulary& vocab) {
    std::vector<CorpusRecord> out;
    out.reserve(records.size());
    for (const CorpusRecord& rec : records) {
        if (rec.reward != 1) continue;
        if (!passes_string_heuristics(rec, vocab)) continue;
        out.push_back(rec);
    }
    return out;
}

inline double corpus_success_rate(const std::vector<CorpusRecord>& records) {
    if (records.empty()) return 0.0;
    std::size_t ok = 0;
    for (const auto& r : records) ok += static_cast<std::size_t>(r.reward);
    return static_cast<double>(ok) / static_cast<double>(records.size());
}

}  // namespace flightdesk
