#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flightdesk/digest.hpp"
#include "flightdesk/errors.hpp"
#include "flightdesk/rng.hpp"

namespace flightdesk {

// ---------------------------------------------------------------------------
// Attribute alphabets
// ---------------------------------------------------------------------------

enum class TimeOfDay : int { morning = 0, afternoon = 1, evening = 2 };
enum class FareClass : int { economy = 0, business = 1 };
enum class Goal : int { book = 0, cancel = 1, change = 2 };

// One slot per flight attribute eligible for a customer requirement.
enum class Slot : int {
    dep_city = 0,
    ret_city,
    dep_month,
    ret_month,
    dep_day,
    ret_day,
    dep_time,
    ret_time,
    fare,
    price,
    connections,
    airline,
};
inline constexpr int kNumSlots = 12;
inline constexpr int kNumMonths = 12;
inline constexpr int kNumDays = 28;  // days capped at 28; month-length logic is out of scope
inline constexpr int kNumTimes = 3;
inline constexpr int kNumFares = 2;
inline constexpr int kMaxConnections = 2;

inline const char* slot_name(Slot s) {
    static const char* kNames[kNumSlots] = {
        "dep_city", "ret_city", "dep_month", "ret_month", "dep_day",     "ret_day",
        "dep_time", "ret_time", "fare",      "price",     "connections", "airline"};
    return kNames[static_cast<int>(s)];
}

// ---------------------------------------------------------------------------
// Environment configuration (the declared priors and alphabets)
// ---------------------------------------------------------------------------

struct GoalWeights {
    double book = 0.8;
    double cancel = 0.1;
    double change = 0.1;
};

struct EnvConfig {
    int table_size = 30;
    std::vector<std::string> cities = {"sea", "lax", "den", "atl", "chi", "mia"};
    std::vector<std::string> airlines = {"ua", "aa", "dl", "sw", "ba"};
    std::vector<std::string> first_names = {"alice", "bob",  "carol", "dave", "erin",
                                            "frank", "gina", "hank",  "iris", "jack"};
    std::vector<std::string> last_names = {"adams", "brown", "clark", "davis", "evans",
                                           "ford",  "gray",  "hall",  "irwin", "jones"};
    int price_min = 50;
    int price_max = 450;
    int price_step = 50;
    int price_buckets = 10;  // embedding bins for the model's table prefix
    int flight_number_min = 10;
    int flight_number_max = 99;
    double p_match = 0.7;              // P(at least one flight satisfies the requirements)
    double plant_probability = 0.8;    // default for the conditional table prior
    double constraint_probability = 0.3;  // per-slot P(requirement != any)
    double reservation_probability = 0.5;
    GoalWeights goal_weights;
    double gamma = 1.0;  // inert: only the terminal reward is nonzero

    int num_price_values() const {
        return (price_max - price_min) / price_step + 1;
    }
    int price_value(int index) const { return price_min + index * price_step; }

    int flight_number_digits() const {
        int digits = 1;
        for (int v = flight_number_max; v >= 10; v /= 10) ++digits;
        return digits;
    }

    void validate() const {
        if (table_size < 1) throw ConfigError("table_size must be >= 1");
        if (cities.empty()) throw ConfigError("cities alphabet must be nonempty");
        if (airlines.empty()) throw ConfigError("airlines alphabet must be nonempty");
        if (first_names.empty() || last_names.empty())
            throw ConfigError("name alphabets must be nonempty");
        if (price_min < 0 || price_step <= 0 || price_max < price_min)
            throw ConfigError("invalid price range");
        if (price_buckets < 1) throw ConfigError("price_buckets must be >= 1");
        if (flight_number_min < 0 || flight_number_max < flight_number_min)
            throw ConfigError("invalid flight number range");
        if (flight_number_max - flight_number_min + 1 < table_size)
            throw ConfigError("flight number range smaller than table_size");
        for (double p : {p_match, plant_probability, constraint_probability,
                         reservation_probability}) {
            if (p < 0.0 || p > 1.0) throw ConfigError("probability out of [0,1]");
        }
        if (goal_weights.book < 0 || goal_weights.cancel < 0 || goal_weights.change < 0 ||
            goal_weights.book + goal_weights.cancel + goal_weights.change <= 0)
            throw ConfigError("goal weights must be nonnegative and sum > 0");
    }
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Flight {
    int flight_number = 0;
    int dep_city = 0;  // index into EnvConfig::cities
    int ret_city = 0;
    int dep_month = 1;  // 1..12
    int ret_month = 1;
    int dep_day = 1;  // 1..28
    int ret_day = 1;
    TimeOfDay dep_time = TimeOfDay::morning;
    TimeOfDay ret_time = TimeOfDay::morning;
    FareClass fare = FareClass::economy;
    int price = 0;
    int connections = 0;  // 0..2
    int airline = 0;      // index into EnvConfig::airlines

    int slot_value(Slot s) const {
        switch (s) {
            case Slot::dep_city: return dep_city;
            case Slot::ret_city: return ret_city;
            case Slot::dep_month: return dep_month;
            case Slot::ret_month: return ret_month;
            case Slot::dep_day: return dep_day;
            case Slot::ret_day: return ret_day;
            case Slot::dep_time: return static_cast<int>(dep_time);
            case Slot::ret_time: return static_cast<int>(ret_time);
            case Slot::fare: return static_cast<int>(fare);
            case Slot::price: return price;
            case Slot::connections: return connections;
            case Slot::airline: return airline;
        }
        return 0;
    }

    void set_slot_value(Slot s, int v) {
        switch (s) {
            case Slot::dep_city: dep_city = v; break;
            case Slot::ret_city: ret_city = v; break;
            case Slot::dep_month: dep_month = v; break;
            case Slot::ret_month: ret_month = v; break;
            case Slot::dep_day: dep_day = v; break;
            case Slot::ret_day: ret_day = v; break;
            case Slot::dep_time: dep_time = static_cast<TimeOfDay>(v); break;
            case Slot::ret_time: ret_time = static_cast<TimeOfDay>(v); break;
            case Slot::fare: fare = static_cast<FareClass>(v); break;
            case Slot::price: price = v; break;
            case Slot::connections: connections = v; break;
            case Slot::airline: airline = v; break;
        }
    }

    bool operator==(const Flight&) const = default;
};

enum class ConstraintKind : int { any = 0, exact = 1, at_most = 2 };

struct Requirement {
    ConstraintKind kind = ConstraintKind::any;
    int value = 0;  // unused for `any`

    static Requirement any() { return {}; }
    static Requirement exact(int v) { return {ConstraintKind::exact, v}; }
    static Requirement at_most(int v) { return {ConstraintKind::at_most, v}; }

    bool operator==(const Requirement&) const = default;
};

// at_most is only meaningful on ordered numeric slots.
inline bool slot_allows_at_most(Slot s) {
    return s == Slot::price || s == Slot::connections;
}

struct ObservedContext {
    std::vector<Flight> flights;
    bool reservation = false;

    bool operator==(const ObservedContext&) const = default;

    const Flight* find(int flight_number) const {
        for (const Flight& f : flights)
            if (f.flight_number == flight_number) return &f;
        return nullptr;
    }

    std::uint64_t structural_hash() const {
        Fnv1a h;
        h.add_i32(reservation ? 1 : 0);
        for (const Flight& f : flights) {
            h.add_i32(f.flight_number);
            for (int s = 0; s < kNumSlots; ++s) h.add_i32(f.slot_value(static_cast<Slot>(s)));
        }
        return h.value();
    }
};

struct HiddenContext {
    Goal goal = Goal::book;
    int first_name = 0;  // index into EnvConfig::first_names
    int last_name = 0;
    std::array<Requirement, kNumSlots> requirements{};

    bool operator==(const HiddenContext&) const = default;

    const Requirement& requirement(Slot s) const { return requirements[static_cast<int>(s)]; }
    Requirement& requirement(Slot s) { return requirements[static_cast<int>(s)]; }

    int constrained_slot_count() const {
        int n = 0;
        for (const auto& r : requirements)
            if (r.kind != ConstraintKind::any) ++n;
        return n;
    }
};

enum class Speaker : int { agent = 0, customer = 1 };

using TokenId = std::int32_t;

struct Utterance {
    Speaker speaker = Speaker::customer;
    std::vector<TokenId> tokens;

    bool operator==(const Utterance&) const = default;
};

enum class ActionKind : int { book = 0, no_flight = 1, cancel = 2, change = 3, no_reservation = 4 };
inline constexpr int kNumActionKinds = 5;

inline const char* action_kind_name(ActionKind k) {
    static const char* kNames[kNumActionKinds] = {"book", "no_flight", "cancel", "change",
                                                  "no_reservation"};
    return kNames[static_cast<int>(k)];
}

inline bool action_kind_has_flight(ActionKind k) {
    return k == ActionKind::book || k == ActionKind::change;
}

struct FinalAction {
    ActionKind kind = ActionKind::no_flight;
    std::optional<int> flight_number;  // present iff kind is book/change
    int first_name = 0;
    int last_name = 0;

    bool operator==(const FinalAction&) const = default;

    void check_shape() const {
        if (action_kind_has_flight(kind) != flight_number.has_value())
            throw DataError("final action flight_number presence inconsistent with kind");
    }
};

struct Dialogue {
    std::vector<Utterance> turns;
    FinalAction final_action;

    bool operator==(const Dialogue&) const = default;
};

struct Scenario {
    HiddenContext hidden;
    ObservedContext observed;
    std::uint64_t seed = 0;

    bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------------------
// Constraint execution oracle
// ---------------------------------------------------------------------------

inline bool requirement_holds(const Requirement& r, int value) {
    switch (r.kind) {
        case ConstraintKind::any: return true;
        case ConstraintKind::exact: return value == r.value;
        case ConstraintKind::at_most: return value <= r.value;
    }
    return false;
}

inline bool flight_matches(const Flight& f, const HiddenContext& c_h) {
    for (int s = 0; s < kNumSlots; ++s) {
        const Slot slot = static_cast<Slot>(s);
        if (!requirement_holds(c_h.requirement(slot), f.slot_value(slot))) return false;
    }
    return true;
}

inline std::vector<int> matching_flight_numbers(const HiddenContext& c_h,
                                                const ObservedContext& c_o) {
    std::vector<int> out;
    for (const Flight& f : c_o.flights)
        if (flight_matches(f, c_h)) out.push_back(f.flight_number);
    return out;
}

inline std::vector<FinalAction> valid_actions(const HiddenContext& c_h,
                                              const ObservedContext& c_o) {
    std::vector<FinalAction> out;
    const auto with_name = [&](ActionKind k, std::optional<int> fn) {
        FinalAction a;
        a.kind = k;
        a.flight_number = fn;
        a.first_name = c_h.first_name;
        a.last_name = c_h.last_name;
        return a;
    };
    switch (c_h.goal) {
        case Goal::book: {
            for (int fn : matching_flight_numbers(c_h, c_o))
                out.push_back(with_name(ActionKind::book, fn));
            if (out.empty()) out.push_back(with_name(ActionKind::no_flight, std::nullopt));
            break;
        }
        case Goal::cancel: {
            out.push_back(c_o.reservation ? with_name(ActionKind::cancel, std::nullopt)
                                          : with_name(ActionKind::no_reservation, std::nullopt));
            break;
        }
        case Goal::change: {
            if (!c_o.reservation) {
                out.push_back(with_name(ActionKind::no_reservation, std::nullopt));
            } else {
                for (int fn : matching_flight_numbers(c_h, c_o))
                    out.push_back(with_name(ActionKind::change, fn));
                if (out.empty()) out.push_back(with_name(ActionKind::no_flight, std::nullopt));
            }
            break;
        }
    }
    return out;
}

inline bool action_in_set(const std::vector<FinalAction>& set, const FinalAction& a) {
    return std::find(set.begin(), set.end(), a) != set.end();
}

// Binary task reward: full success only. Intermediate rewards are all zero.
inline int reward(const Dialogue& d, const HiddenContext& c_h, const ObservedContext& c_o) {
    return action_in_set(valid_actions(c_h, c_o), d.final_action) ? 1 : 0;
}

struct SubMetrics {
    bool status_ok = false;
    bool flight_ok = false;
    bool name_ok = false;
    std::optional<double> constraint_fraction;  // only for a wrongly booked flight
};

inline SubMetrics sub_metrics(const Dialogue& d, const HiddenContext& c_h,
                              const ObservedContext& c_o) {
    const auto valid = valid_actions(c_h, c_o);
    const FinalAction& a = d.final_action;
    SubMetrics m;
    m.status_ok = std::any_of(valid.begin(), valid.end(),
                              [&](const FinalAction& v) { return v.kind == a.kind; });
    m.flight_ok = std::any_of(valid.begin(), valid.end(), [&](const FinalAction& v) {
        return v.flight_number == a.flight_number;
    });
    m.name_ok = a.first_name == c_h.first_name && a.last_name == c_h.last_name;
    if (a.flight_number.has_value() && !m.flight_ok) {
        const Flight* f = c_o.find(*a.flight_number);
        if (f == nullptr) {
            m.constraint_fraction = 0.0;  // booked a flight that is not even in the table
        } else {
            int satisfied = 0;
            for (int s = 0; s < kNumSlots; ++s) {
                const Slot slot = static_cast<Slot>(s);
                if (requirement_holds(c_h.requirement(slot), f->slot_value(slot))) ++satisfied;
            }
            m.constraint_fraction = static_cast<double>(satisfied) / kNumSlots;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Priors and samplers (pure functions of seed and config)
// ---------------------------------------------------------------------------

inline Flight sample_flight(Rng& rng, const EnvConfig& cfg, int flight_number) {
    Flight f;
    f.flight_number = flight_number;
    f.dep_city = static_cast<int>(rng.next_below(cfg.cities.size()));
    f.ret_city = static_cast<int>(rng.next_below(cfg.cities.size()));
    f.dep_month = rng.uniform_int(1, kNumMonths);
    f.ret_month = rng.uniform_int(1, kNumMonths);
    f.dep_day = rng.uniform_int(1, kNumDays);
    f.ret_day = rng.uniform_int(1, kNumDays);
    f.dep_time = static_cast<TimeOfDay>(rng.uniform_int(0, kNumTimes - 1));
    f.ret_time = static_cast<TimeOfDay>(rng.uniform_int(0, kNumTimes - 1));
    f.fare = static_cast<FareClass>(rng.uniform_int(0, kNumFares - 1));
    f.price = cfg.price_value(rng.uniform_int(0, cfg.num_price_values() - 1));
    f.connections = rng.uniform_int(0, kMaxConnections);
    f.airline = static_cast<int>(rng.next_below(cfg.airlines.size()));
    return f;
}

inline std::vector<int> sample_distinct_flight_numbers(Rng& rng, const EnvConfig& cfg) {
    // Floyd's algorithm keeps this O(N) draws without materializing the range.
    std::vector<int> out;
    out.reserve(cfg.table_size);
    const int lo = cfg.flight_number_min;
    const int hi = cfg.flight_number_max;
    const int range = hi - lo + 1;
    for (int j = range - cfg.table_size; j < range; ++j) {
        const int t = lo + rng.uniform_int(0, j);
        if (std::find(out.begin(), out.end(), t) != out.end())
            out.push_back(lo + j);
        else
            out.push_back(t);
    }
    rng.shuffle(out);
    return out;
}

inline int slot_alphabet_size(Slot s, const EnvConfig& cfg) {
    switch (s) {
        case Slot::dep_city:
        case Slot::ret_city: return static_cast<int>(cfg.cities.size());
        case Slot::dep_month:
        case Slot::ret_month: return kNumMonths;
        case Slot::dep_day:
        case Slot::ret_day: return kNumDays;
        case Slot::dep_time:
        case Slot::ret_time: return kNumTimes;
        case Slot::fare: return kNumFares;
        case Slot::price: return cfg.num_price_values();
        case Slot::connections: return kMaxConnections + 1;
        case Slot::airline: return static_cast<int>(cfg.airlines.size());
    }
    return 0;
}

// Maps an index in [0, slot_alphabet_size) to the concrete slot value.
inline int slot_value_from_index(Slot s, int index, const EnvConfig& cfg) {
    switch (s) {
        case Slot::dep_month:
        case Slot::ret_month:
        case Slot::dep_day:
        case Slot::ret_day: return index + 1;
        case Slot::price: return cfg.price_value(index);
        default: return index;
    }
}

inline int slot_index_from_value(Slot s, int value, const EnvConfig& cfg) {
    switch (s) {
        case Slot::dep_month:
        case Slot::ret_month:
        case Slot::dep_day:
        case Slot::ret_day: return value - 1;
        case Slot::price: return (value - cfg.price_min) / cfg.price_step;
        default: return value;
    }
}

// Requirement prior. At least one slot is always constrained: a customer with
// no requirements at all would make "no matching flight" unsatisfiable.
inline std::array<Requirement, kNumSlots> sample_requirements(Rng& rng, const EnvConfig& cfg) {
    std::array<Requirement, kNumSlots> reqs{};
    for (;;) {
        int constrained = 0;
        for (int s = 0; s < kNumSlots; ++s) {
            const Slot slot = static_cast<Slot>(s);
            if (!rng.bernoulli(cfg.constraint_probability)) {
                reqs[s] = Requirement::any();
                continue;
            }
            ++constrained;
            const int idx = rng.uniform_int(0, slot_alphabet_size(slot, cfg) - 1);
            const int value = slot_value_from_index(slot, idx, cfg);
            reqs[s] = slot_allows_at_most(slot) ? Requirement::at_most(value)
                                                : Requirement::exact(value);
        }
        if (constrained > 0) return reqs;
    }
}

// A flight satisfying every requirement; unconstrained slots come from the prior.
inline Flight sample_matching_flight(Rng& rng, const EnvConfig& cfg, const HiddenContext& c_h,
                                     int flight_number) {
    Flight f = sample_flight(rng, cfg, flight_number);
    for (int s = 0; s < kNumSlots; ++s) {
        const Slot slot = static_cast<Slot>(s);
        const Requirement& r = c_h.requirement(slot);
        switch (r.kind) {
            case ConstraintKind::any: break;
            case ConstraintKind::exact: f.set_slot_value(slot, r.value); break;
            case ConstraintKind::at_most: {
                // uniform over the grid values <= bound
                const int bound_idx = slot_index_from_value(slot, r.value, cfg);
                const int idx = rng.uniform_int(0, std::max(0, bound_idx));
                f.set_slot_value(slot, slot_value_from_index(slot, idx, cfg));
                break;
            }
        }
    }
    return f;
}

// Redraws (then minimally edits) a flight until it violates some requirement.
// Requires at least one constrained slot.
inline Flight sample_nonmatching_flight(Rng& rng, const EnvConfig& cfg, const HiddenContext& c_h,
                                        int flight_number) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Flight f = sample_flight(rng, cfg, flight_number);
        if (!flight_matches(f, c_h)) return f;
    }
    Flight f = sample_flight(rng, cfg, flight_number);
    for (int s = 0; s < kNumSlots; ++s) {
        const Slot slot = static_cast<Slot>(s);
        const Requirement& r = c_h.requirement(slot);
        if (r.kind == ConstraintKind::any) continue;
        const int n = slot_alphabet_size(slot, cfg);
        const int req_idx = slot_index_from_value(slot, r.value, cfg);
        if (r.kind == ConstraintKind::exact) {
            if (n < 2) continue;  // cannot violate a single-valued alphabet
            int idx = rng.uniform_int(0, n - 2);
            if (idx >= req_idx) ++idx;
            f.set_slot_value(slot, slot_value_from_index(slot, idx, cfg));
        } else {  // at_most: pick a value strictly above the bound, if one exists
            if (req_idx + 1 >= n) continue;
            const int idx = rng.uniform_int(req_idx + 1, n - 1);
            f.set_slot_value(slot, slot_value_from_index(slot, idx, cfg));
        }
        if (!flight_matches(f, c_h)) return f;
    }
    return f;  // only reachable when no constrained slot can be violated
}

inline ObservedContext sample_table(Rng& rng, const EnvConfig& cfg) {
    ObservedContext c_o;
    c_o.reservation = rng.bernoulli(cfg.reservation_probability);
    const auto numbers = sample_distinct_flight_numbers(rng, cfg);
    c_o.flights.reserve(cfg.table_size);
    for (int i = 0; i < cfg.table_size; ++i)
        c_o.flights.push_back(sample_flight(rng, cfg, numbers[i]));
    return c_o;
}

// Conditional table prior p(c_o | c_h): with probability plant_probability the
// table is guaranteed to contain at least one flight meeting every requirement.
inline ObservedContext sample_table_given_hidden(const HiddenContext& c_h, std::uint64_t rng_seed,
                                                 const EnvConfig& cfg,
                                                 std::optional<double> plant_probability = {}) {
    cfg.validate();
    Rng rng(derive_seed(rng_seed, 0xC0FFEE));
    ObservedContext c_o = sample_table(rng, cfg);
    const double plant = plant_probability.value_or(cfg.plant_probability);
    if (rng.bernoulli(plant) && matching_flight_numbers(c_h, c_o).empty()) {
        const int row = rng.uniform_int(0, cfg.table_size - 1);
        c_o.flights[row] =
            sample_matching_flight(rng, cfg, c_h, c_o.flights[row].flight_number);
    }
    return c_o;
}

inline Scenario sample_scenario(std::uint64_t rng_seed, const EnvConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(rng_seed, 0x5EED));
    Scenario sc;
    sc.seed = rng_seed;
    sc.hidden.goal = static_cast<Goal>(rng.weighted_choice(
        {cfg.goal_weights.book, cfg.goal_weights.cancel, cfg.goal_weights.change}));
    sc.hidden.first_name = static_cast<int>(rng.next_below(cfg.first_names.size()));
    sc.hidden.last_name = static_cast<int>(rng.next_below(cfg.last_names.size()));
    sc.hidden.requirements = sample_requirements(rng, cfg);
    sc.observed = sample_table(rng, cfg);

    // Enforce the configured marginal P(>=1 matching flight).
    const bool want_match = rng.bernoulli(cfg.p_match);
    if (want_match) {
        if (matching_flight_numbers(sc.hidden, sc.observed).empty()) {
            const int row = rng.uniform_int(0, cfg.table_size - 1);
            sc.observed.flights[row] = sample_matching_flight(
                rng, cfg, sc.hidden, sc.observed.flights[row].flight_number);
        }
    } else {
        for (Flight& f : sc.observed.flights) {
            if (flight_matches(f, sc.hidden))
                f = sample_nonmatching_flight(rng, cfg, sc.hidden, f.flight_number);
        }
    }
    return sc;
}

}  // namespace flightdesk
