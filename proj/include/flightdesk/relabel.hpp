#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "flightdesk/corpus.hpp"
#include "flightdesk/domain.hpp"
#include "flightdesk/parallel.hpp"
#include "flightdesk/rng.hpp"

namespace flightdesk {

// Task relabeling: resample the observed context (table + reservation flag)
// under which the recorded dialogue is optimal, leaving the dialogue and the
// hidden context untouched. Wrong-status dialogues become optimal examples;
// already-successful ones are multiplied across distinct accepting tables.

enum class RelabelStatus : int {
    ok = 0,                // at least one accepting context found
    budget_exhausted = 1,  // proposals ran out before any acceptance
    infeasible = 2,        // no observed context can make this dialogue optimal
};

struct RelabelResult {
    std::vector<CorpusRecord> records;
    RelabelStatus status = RelabelStatus::ok;
    int proposals_used = 0;
};

inline constexpr int kDefaultRelabelBudget = 64;  // proposals per requested copy

namespace detail {

// Reasons a dialogue can be provably impossible to relabel, checked before
// spending any sampling budget.
inline bool relabel_feasible(const CorpusRecord& rec, std::string* why = nullptr) {
    const HiddenContext& c_h = rec.scenario.hidden;
    const FinalAction& a = rec.dialogue.final_action;
    const auto fail = [&](const char* msg) {
        if (why != nullptr) *why = msg;
        return false;
    };
    if (a.first_name != c_h.first_name || a.last_name != c_h.last_name)
        return fail("final action names the wrong customer");
    switch (c_h.goal) {
        case Goal::book:
            if (a.kind != ActionKind::book && a.kind != ActionKind::no_flight)
                return fail("action kind unreachable under goal=book");
            break;
        case Goal::cancel:
            if (a.kind != ActionKind::cancel && a.kind != ActionKind::no_reservation)
                return fail("action kind unreachable under goal=cancel");
            break;
        case Goal::change:
            if (a.kind == ActionKind::book || a.kind == ActionKind::cancel)
                return fail("action kind unreachable under goal=change");
            break;
    }
    if (a.flight_number.has_value()) {
        const Flight* f = rec.scenario.observed.find(*a.flight_number);
        if (f == nullptr) return fail("booked flight number absent from the original table");
        if (!flight_matches(*f, c_h))
            return fail("booked flight violates the stated requirements");
    }
    if (a.kind == ActionKind::no_flight && c_h.constrained_slot_count() == 0)
        return fail("vacuous requirements: every table has a matching flight");
    return true;
}

// One proposal from the conditional distribution for this dialogue's ending.
// For book/change the dialogue's booked flight is embedded verbatim at a
// random row, which keeps every flight-number mention in the dialogue
// consistent with the new table.
inline ObservedContext propose_context(const CorpusRecord& rec, const EnvConfig& cfg, Rng& rng) {
    const HiddenContext& c_h = rec.scenario.hidden;
    const FinalAction& a = rec.dialogue.final_action;
    ObservedContext c_o;
    c_o.reservation = rng.bernoulli(cfg.reservation_probability);
    switch (a.kind) {
        case ActionKind::cancel: c_o.reservation = true; break;
        case ActionKind::no_reservation: c_o.reservation = false; break;
        case ActionKind::change: c_o.reservation = true; break;
        case ActionKind::no_flight:
            if (c_h.goal == Goal::change) c_o.reservation = true;
            break;
        case ActionKind::book: break;
    }
    auto numbers = sample_distinct_flight_numbers(rng, cfg);
    if (a.flight_number.has_value() &&
        std::find(numbers.begin(), numbers.end(), *a.flight_number) == numbers.end()) {
        numbers[rng.next_below(numbers.size())] = *a.flight_number;
    }
    c_o.flights.reserve(cfg.table_size);
    for (int i = 0; i < cfg.table_size; ++i) {
        if (a.flight_number.has_value() && numbers[i] == *a.flight_number) {
            c_o.flights.push_back(*rec.scenario.observed.find(*a.flight_number));
        } else if (a.kind == ActionKind::no_flight) {
            // acceptance needs zero matches; propose from the non-matching slice
            c_o.flights.push_back(sample_nonmatching_flight(rng, cfg, c_h, numbers[i]));
        } else {
            c_o.flights.push_back(sample_flight(rng, cfg, numbers[i]));
        }
    }
    return c_o;
}

}  // namespace detail

// Produces up to `augment` relabeled copies of one record. Acceptance is the
// ground-truth reward oracle itself, so every emitted record scores 1.
inline RelabelResult relabel(const CorpusRecord& rec, const EnvConfig& cfg, int budget,
                             int augment, std::uint64_t rng_seed) {
    if (budget < 1) throw ConfigError("relabel budget must be >= 1");
    if (augment < 1) throw ConfigError("relabel augment count must be >= 1");
    RelabelResult result;
    if (!detail::relabel_feasible(rec)) {
        result.status = RelabelStatus::infeasible;
        return result;
    }
    Rng rng(derive_seed(rng_seed, 0x8E1A8E1));
    std::unordered_set<std::uint64_t> seen;
    const int max_proposals = budget * augment;
    for (int p = 0; p < max_proposals &&
                    result.records.size() < static_cast<std::size_t>(augment);
         ++p) {
        ++result.proposals_used;
        ObservedContext candidate = detail::propose_context(rec, cfg, rng);
        CorpusRecord out = rec;
        out.scenario.observed = std::move(candidate);
        if (reward(out.dialogue, out.scenario.hidden, out.scenario.observed) != 1) continue;
        if (!seen.insert(out.scenario.observed.structural_hash()).second) continue;
        out.reward = 1;
        out.provenance = Provenance::relabeled;
        result.records.push_back(std::move(out));
    }
    result.status = result.records.empty() ? RelabelStatus::budget_exhausted : RelabelStatus::ok;
    return result;
}

enum class RelabelPolicy : int { replace = 0, augment = 1 };

struct RelabelSummary {
    std::size_t input_records = 0;
    std::size_t output_records = 0;
    std::size_t feasible_records = 0;
    std::size_t infeasible_records = 0;
    std::size_t exhausted_records = 0;
    std::size_t proposals_used = 0;
};

struct RelabelCorpusResult {
    std::vector<CorpusRecord> records;
    RelabelSummary summary;
};

// Applies relabel() record by record with derived seeds; input order is
// preserved in the output. Infeasible and exhausted records are dropped and
// counted, never silently lost.
inline RelabelCorpusResult relabel_corpus(const std::vector<CorpusRecord>& records,
                                          const EnvConfig& cfg, RelabelPolicy policy,
                                          int augment, int budget, std::uint64_t rng_seed,
                                          unsigned threads = 1) {
    const int copies = policy == RelabelPolicy::replace ? 1 : augment;
    std::vector<RelabelResult> partial(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) {
        partial[i] = relabel(records[i], cfg, budget, copies, derive_seed(rng_seed, i));
    });
    RelabelCorpusResult out;
    out.summary.input_records = records.size();
    for (const RelabelResult& r : partial) {
        out.summary.proposals_used += static_cast<std::size_t>(r.proposals_used);
        switch (r.status) {
            case RelabelStatus::ok: ++out.summary.feasible_records; break;
            case RelabelStatus::infeasible: ++out.summary.infeasible_records; break;
            case RelabelStatus::budget_exhausted: ++out.summary.exhausted_records; break;
        }
        for (const CorpusRecord& rec : r.records) out.records.push_back(rec);
    }
    out.summary.output_records = out.records.size();
    return out;
}

}  // namespace flightdesk
