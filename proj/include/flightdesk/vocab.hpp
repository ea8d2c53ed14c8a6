#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "flightdesk/domain.hpp"
#include "flightdesk/errors.hpp"

namespace flightdesk {

// Token string <-> id bijection, deterministically derived from an EnvConfig.
// Ids are stable across runs: sentinels first, then digits, the fixed word
// list, and finally the config-dependent alphabets in declaration order.
class Vocabulary {
  public:
    // Sentinel ids are fixed by construction order.
    static constexpr TokenId kPad = 0;
    static constexpr TokenId kBeginDialogue = 1;
    static constexpr TokenId kEndDialogue = 2;
    static constexpr TokenId kEndUtterance = 3;
    static constexpr TokenId kAgentMarker = 4;
    static constexpr TokenId kCustomerMarker = 5;
    static constexpr TokenId kBeginAction = 6;
    static constexpr TokenId kComma = 7;

    explicit Vocabulary(const EnvConfig& cfg) : cfg_(cfg) {
        add("<pad>");
        add("<bod>");
        add("<eod>");
        add("<eou>");
        add("<agent>");
        add("<customer>");
        add("<boa>");
        add(",");
        digit0_ = next_id();
        for (int d = 0; d < 10; ++d) add(std::to_string(d));
        word0_ = next_id();
        for (const char* w : word_list()) add(w);
        city0_ = next_id();
        for (const auto& c : cfg.cities) add(c);
        airline0_ = next_id();
        for (const auto& a : cfg.airlines) add(a);
        month0_ = next_id();
        for (const char* m : {"jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep",
                              "oct", "nov", "dec"})
            add(m);
        day0_ = next_id();
        for (int d = 1; d <= kNumDays; ++d) add("d" + std::to_string(d));
        first0_ = next_id();
        for (const auto& n : cfg.first_names) add(n);
        last0_ = next_id();
        for (const auto& n : cfg.last_names) add(n);
    }

    int size() const { return static_cast<int>(strings_.size()); }

    const std::string& str(TokenId id) const { return strings_.at(static_cast<std::size_t>(id)); }

    TokenId id(const std::string& s) const {
        auto it = ids_.find(s);
        if (it == ids_.end()) throw DataError("unknown token: " + s);
        return it->second;
    }

    bool contains(const std::string& s) const { return ids_.count(s) != 0; }

    TokenId digit(int d) const { return digit0_ + d; }
    TokenId city(int index) const { return city0_ + index; }
    TokenId airline(int index) const { return airline0_ + index; }
    TokenId month(int m) const { return month0_ + (m - 1); }  // m in 1..12
    TokenId day(int d) const { return day0_ + (d - 1); }      // d in 1..28
    TokenId first_name(int index) const { return first0_ + index; }
    TokenId last_name(int index) const { return last0_ + index; }
    TokenId word(const char* w) const { return id(w); }

    bool is_digit(TokenId t) const { return t >= digit0_ && t < digit0_ + 10; }
    int digit_value(TokenId t) const { return t - digit0_; }
    bool is_city(TokenId t) const {
        return t >= city0_ && t < city0_ + static_cast<TokenId>(cfg_.cities.size());
    }
    int city_index(TokenId t) const { return t - city0_; }
    bool is_airline(TokenId t) const {
        return t >= airline0_ && t < airline0_ + static_cast<TokenId>(cfg_.airlines.size());
    }
    int airline_index(TokenId t) const { return t - airline0_; }
    bool is_month(TokenId t) const { return t >= month0_ && t < month0_ + kNumMonths; }
    int month_value(TokenId t) const { return t - month0_ + 1; }
    bool is_day(TokenId t) const { return t >= day0_ && t < day0_ + kNumDays; }
    int day_value(TokenId t) const { return t - day0_ + 1; }
    bool is_first_name(TokenId t) const {
        return t >= first0_ && t < first0_ + static_cast<TokenId>(cfg_.first_names.size());
    }
    int first_name_index(TokenId t) const { return t - first0_; }
    bool is_last_name(TokenId t) const {
        return t >= last0_ && t < last0_ + static_cast<TokenId>(cfg_.last_names.size());
    }
    int last_name_index(TokenId t) const { return t - last0_; }

    // Token rendering of an attribute value, as it appears in dialogue text.
    // Prices and flight numbers are spelled in digit tokens.
    std::vector<TokenId> render_slot_value(Slot s, int value) const {
        switch (s) {
            case Slot::dep_city:
            case Slot::ret_city: return {city(value)};
            case Slot::dep_month:
            case Slot::ret_month: return {month(value)};
            case Slot::dep_day:
            case Slot::ret_day: return {day(value)};
            case Slot::dep_time:
            case Slot::ret_time:
                return {word(value == 0 ? "morning" : value == 1 ? "afternoon" : "evening")};
            case Slot::fare: return {word(value == 0 ? "economy" : "business")};
            case Slot::price: return render_number(value);
            case Slot::connections: return {digit(value)};
            case Slot::airline: return {airline(value)};
        }
        return {};
    }

    std::vector<TokenId> render_number(int value) const {
        std::vector<TokenId> out;
        for (char c : std::to_string(value)) out.push_back(digit(c - '0'));
        return out;
    }

    // Marker words naming a slot in dialogue and in hidden-context listings.
    std::vector<TokenId> slot_marker(Slot s) const {
        switch (s) {
            case Slot::dep_city: return {word("departure"), word("city")};
            case Slot::ret_city: return {word("return"), word("city")};
            case Slot::dep_month: return {word("departure"), word("month")};
            case Slot::ret_month: return {word("return"), word("month")};
            case Slot::dep_day: return {word("departure"), word("day")};
            case Slot::ret_day: return {word("return"), word("day")};
            case Slot::dep_time: return {word("departure"), word("time")};
            case Slot::ret_time: return {word("return"), word("time")};
            case Slot::fare: return {word("class")};
            case Slot::price: return {word("price")};
            case Slot::connections: return {word("connections")};
            case Slot::airline: return {word("airline")};
        }
        return {};
    }

    TokenId goal_token(Goal g) const {
        switch (g) {
            case Goal::book: return word("book");
            case Goal::cancel: return word("cancel");
            case Goal::change: return word("change");
        }
        return kPad;
    }

    std::string detokenize(const std::vector<TokenId>& toks) const {
        std::string out;
        for (TokenId t : toks) {
            if (!out.empty()) out.push_back(' ');
            out += str(t);
        }
        return out;
    }

  private:
    static const std::vector<const char*>& word_list() {
        static const std::vector<const char*> kWords = {
            "hello",   "hi",      "hey",     "how",     "can",       "i",        "help",
            "you",     "today",   "what",    "do",      "for",       "my",       "name",
            "is",      "this",    "want",    "need",    "would",     "like",     "to",
            "a",       "the",     "book",    "cancel",  "change",    "flight",   "reservation",
            "no",      "yes",     "please",  "it",      "thanks",    "thank",    "anyway",
            "ok",      "sure",    "noted",   "found",   "have",      "sorry",    "matches",
            "nothing", "available", "that",  "all",     "done",      "and",      "departure",
            "return",  "city",    "month",   "day",     "time",      "class",    "airline",
            "price",   "connections", "at",  "most",    "morning",   "afternoon", "evening",
            "economy", "business", "your",   "cancelled", "changed", "exists",   "bye",
            "of"};
        return kWords;
    }

    TokenId next_id() const { return static_cast<TokenId>(strings_.size()); }

    void add(const std::string& s) {
        if (!ids_.emplace(s, next_id()).second)
            throw ConfigError("duplicate token string in vocabulary: " + s);
        strings_.push_back(s);
    }

    EnvConfig cfg_;
    std::vector<std::string> strings_;
    std::unordered_map<std::string, TokenId> ids_;
};

// Final-action wire grammar:
//   <boa> book  D+ FIRST LAST <eod>
//   <boa> change D+ FIRST LAST <eod>
//   <boa> no flight FIRST LAST <eod>
//   <boa> cancel FIRST LAST <eod>
//   <boa> no reservation FIRST LAST <eod>
inline std::vector<TokenId> render_final_action(const FinalAction& a, const Vocabulary& v) {
    std::vector<TokenId> out{Vocabulary::kBeginAction};
    switch (a.kind) {
        case ActionKind::book: out.push_back(v.word("book")); break;
        case ActionKind::no_flight:
            out.push_back(v.word("no"));
            out.push_back(v.word("flight"));
            break;
        case ActionKind::cancel: out.push_back(v.word("cancel")); break;
        case ActionKind::change: out.push_back(v.word("change")); break;
        case ActionKind::no_reservation:
            out.push_back(v.word("no"));
            out.push_back(v.word("reservation"));
            break;
    }
    if (a.flight_number.has_value()) {
        const auto digits = v.render_number(*a.flight_number);
        out.insert(out.end(), digits.begin(), digits.end());
    }
    out.push_back(v.first_name(a.first_name));
    out.push_back(v.last_name(a.last_name));
    out.push_back(Vocabulary::kEndDialogue);
    return out;
}

// Strict parse of the grammar above; rejects anything malformed.
inline std::optional<FinalAction> parse_final_action(const std::vector<TokenId>& toks,
                                                     const Vocabulary& v) {
    std::size_t i = 0;
    if (i < toks.size() && toks[i] == Vocabulary::kBeginAction) ++i;
    FinalAction a;
    bool expects_flight = false;
    if (i >= toks.size()) return std::nullopt;
    if (toks[i] == v.word("book")) {
        a.kind = ActionKind::book;
        expects_flight = true;
        ++i;
    } else if (toks[i] == v.word("change")) {
        a.kind = ActionKind::change;
        expects_flight = true;
        ++i;
    } else if (toks[i] == v.word("cancel")) {
        a.kind = ActionKind::cancel;
        ++i;
    } else if (toks[i] == v.word("no")) {
        ++i;
        if (i >= toks.size()) return std::nullopt;
        if (toks[i] == v.word("flight"))
            a.kind = ActionKind::no_flight;
        else if (toks[i] == v.word("reservation"))
            a.kind = ActionKind::no_reservation;
        else
            return std::nullopt;
        ++i;
    } else {
        return std::nullopt;
    }
    if (expects_flight) {
        int value = 0;
        bool seen = false;
        while (i < toks.size() && v.is_digit(toks[i])) {
            value = value * 10 + v.digit_value(toks[i]);
            seen = true;
            ++i;
        }
        if (!seen) return std::nullopt;
        a.flight_number = value;
    }
    if (i >= toks.size() || !v.is_first_name(toks[i])) return std::nullopt;
    a.first_name = v.first_name_index(toks[i]);
    ++i;
    if (i >= toks.size() || !v.is_last_name(toks[i])) return std::nullopt;
    a.last_name = v.last_name_index(toks[i]);
    ++i;
    if (i < toks.size() && toks[i] == Vocabulary::kEndDialogue) ++i;
    if (i != toks.size()) return std::nullopt;
    return a;
}

// Canonical token listing of a hidden context: "<goal> , <first> <last> ,
// <marker> <value> , ..." with one clause per constrained slot.
inline std::vector<TokenId> render_hidden_context(const HiddenContext& c_h, const Vocabulary& v) {
    std::vector<TokenId> out{v.goal_token(c_h.goal), Vocabulary::kComma,
                             v.first_name(c_h.first_name), v.last_name(c_h.last_name)};
    for (int s = 0; s < kNumSlots; ++s) {
        const Slot slot = static_cast<Slot>(s);
        const Requirement& r = c_h.requirement(slot);
        if (r.kind == ConstraintKind::any) continue;
        out.push_back(Vocabulary::kComma);
        const auto marker = v.slot_marker(slot);
        out.insert(out.end(), marker.begin(), marker.end());
        if (r.kind == ConstraintKind::at_most) {
            out.push_back(v.word("at"));
            out.push_back(v.word("most"));
        }
        const auto value = v.render_slot_value(slot, r.value);
        out.insert(out.end(), value.begin(), value.end());
    }
    return out;
}

}  // namespace flightdesk
