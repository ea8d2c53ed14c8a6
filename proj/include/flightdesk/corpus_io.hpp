#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flightdesk/corpus.hpp"
#include "flightdesk/digest.hpp"
#include "flightdesk/domain.hpp"

namespace flightdesk {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON (de)serialization of domain values. Categorical fields are written as
// their string codes so files remain readable and stable across runs.
// ---------------------------------------------------------------------------

inline json env_config_to_json(const EnvConfig& c) {
    return json{{"table_size", c.table_size},
                {"cities", c.cities},
                {"airlines", c.airlines},
                {"first_names", c.first_names},
                {"last_names", c.last_names},
                {"price_min", c.price_min},
                {"price_max", c.price_max},
                {"price_step", c.price_step},
                {"price_buckets", c.price_buckets},
                {"flight_number_min", c.flight_number_min},
                {"flight_number_max", c.flight_number_max},
                {"p_match", c.p_match},
                {"plant_probability", c.plant_probability},
                {"constraint_probability", c.constraint_probability},
                {"reservation_probability", c.reservation_probability},
                {"goal_weights",
                 json{{"book", c.goal_weights.book},
                      {"cancel", c.goal_weights.cancel},
                      {"change", c.goal_weights.change}}},
                {"gamma", c.gamma}};
}

template <typename T>
void assign_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

inline EnvConfig env_config_from_json(const json& j) {
    EnvConfig c;
    static const std::vector<std::string> kKnown = {
        "table_size",         "cities",          "airlines",
        "first_names",        "last_names",      "price_min",
        "price_max",          "price_step",      "price_buckets",
        "flight_number_min",  "flight_number_max", "p_match",
        "plant_probability",  "constraint_probability", "reservation_probability",
        "goal_weights",       "gamma"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(kKnown.begin(), kKnown.end(), it.key()) == kKnown.end())
            throw ConfigError("unknown env config key: " + it.key());
    }
    assign_if_present(j, "table_size", c.table_size);
    assign_if_present(j, "cities", c.cities);
    assign_if_present(j, "airlines", c.airlines);
    assign_if_present(j, "first_names", c.first_names);
    assign_if_present(j, "last_names", c.last_names);
    assign_if_present(j, "price_min", c.price_min);
    assign_if_present(j, "price_max", c.price_max);
    assign_if_present(j, "price_step", c.price_step);
    assign_if_present(j, "price_buckets", c.price_buckets);
    assign_if_present(j, "flight_number_min", c.flight_number_min);
    assign_if_present(j, "flight_number_max", c.flight_number_max);
    assign_if_present(j, "p_match", c.p_match);
    assign_if_present(j, "plant_probability", c.plant_probability);
    assign_if_present(j, "constraint_probability", c.constraint_probability);
    assign_if_present(j, "reservation_probability", c.reservation_probability);
    if (j.contains("goal_weights")) {
        const json& g = j.at("goal_weights");
        assign_if_present(g, "book", c.goal_weights.book);
        assign_if_present(g, "cancel", c.goal_weights.cancel);
        assign_if_present(g, "change", c.goal_weights.change);
    }
    assign_if_present(j, "gamma", c.gamma);
    c.validate();
    return c;
}

inline std::string env_config_digest(const EnvConfig& c) {
    return sha256_hex(env_config_to_json(c).dump());
}

inline json flight_to_json(const Flight& f) {
    return json::array({f.flight_number, f.dep_city, f.ret_city, f.dep_month, f.ret_month,
                        f.dep_day, f.ret_day, static_cast<int>(f.dep_time),
                        static_cast<int>(f.ret_time), static_cast<int>(f.fare), f.price,
                        f.connections, f.airline});
}

inline Flight flight_from_json(const json& j) {
    if (!j.is_array() || j.size() != 13) throw DataError("flight record must have 13 fields");
    Flight f;
    f.flight_number = j[0].get<int>();
    f.dep_city = j[1].get<int>();
    f.ret_city = j[2].get<int>();
    f.dep_month = j[3].get<int>();
    f.ret_month = j[4].get<int>();
    f.dep_day = j[5].get<int>();
    f.ret_day = j[6].get<int>();
    f.dep_time = static_cast<TimeOfDay>(j[7].get<int>());
    f.ret_time = static_cast<TimeOfDay>(j[8].get<int>());
    f.fare = static_cast<FareClass>(j[9].get<int>());
    f.price = j[10].get<int>();
    f.connections = j[11].get<int>();
    f.airline = j[12].get<int>();
    return f;
}

inline json record_to_json(const CorpusRecord& rec) {
    json reqs = json::array();
    for (const Requirement& r : rec.scenario.hidden.requirements)
        reqs.push_back(json::array({static_cast<int>(r.kind), r.value}));
    json flights = json::array();
    for (const Flight& f : rec.scenario.observed.flights) flights.push_back(flight_to_json(f));
    json turns = json::array();
    for (const Utterance& u : rec.dialogue.turns)
        turns.push_back(json::array({static_cast<int>(u.speaker), u.tokens}));
    const FinalAction& a = rec.dialogue.final_action;
    json action{{"kind", static_cast<int>(a.kind)},
                {"first", a.first_name},
                {"last", a.last_name}};
    if (a.flight_number.has_value()) action["flight"] = *a.flight_number;
    return json{{"seed", rec.scenario.seed},
                {"hidden",
                 json{{"goal", static_cast<int>(rec.scenario.hidden.goal)},
                      {"first", rec.scenario.hidden.first_name},
                      {"last", rec.scenario.hidden.last_name},
                      {"reqs", reqs}}},
                {"observed",
                 json{{"reservation", rec.scenario.observed.reservation}, {"flights", flights}}},
                {"turns", turns},
                {"action", action},
                {"reward", rec.reward},
                {"provenance", rec.provenance == Provenance::scripted ? "scripted" : "relabeled"}};
}

inline CorpusRecord record_from_json(const json& j) {
    CorpusRecord rec;
    rec.scenario.seed = j.at("seed").get<std::uint64_t>();
    const json& h = j.at("hidden");
    rec.scenario.hidden.goal = static_cast<Goal>(h.at("goal").get<int>());
    rec.scenario.hidden.first_name = h.at("first").get<int>();
    rec.scenario.hidden.last_name = h.at("last").get<int>();
    const json& reqs = h.at("reqs");
    if (reqs.size() != kNumSlots) throw DataError("hidden context must carry 12 requirements");
    for (int s = 0; s < kNumSlots; ++s) {
        rec.scenario.hidden.requirements[s].kind =
            static_cast<ConstraintKind>(reqs[s][0].get<int>());
        rec.scenario.hidden.requirements[s].value = reqs[s][1].get<int>();
    }
    const json& o = j.at("observed");
    rec.scenario.observed.reservation = o.at("reservation").get<bool>();
    for (const json& fj : o.at("flights"))
        rec.scenario.observed.flights.push_back(flight_from_json(fj));
    for (const json& tj : j.at("turns")) {
        Utterance u;
        u.speaker = static_cast<Speaker>(tj[0].get<int>());
        u.tokens = tj[1].get<std::vector<TokenId>>();
        rec.dialogue.turns.push_back(std::move(u));
    }
    const json& aj = j.at("action");
    rec.dialogue.final_action.kind = static_cast<ActionKind>(aj.at("kind").get<int>());
    if (aj.contains("flight")) rec.dialogue.final_action.flight_number = aj.at("flight").get<int>();
    rec.dialogue.final_action.first_name = aj.at("first").get<int>();
    rec.dialogue.final_action.last_name = aj.at("last").get<int>();
    rec.dialogue.final_action.check_shape();
    rec.reward = j.at("reward").get<int>();
    const std::string prov = j.at("provenance").get<std::string>();
    if (prov == "scripted")
        rec.provenance = Provenance::scripted;
    else if (prov == "relabeled")
        rec.provenance = Provenance::relabeled;
    else
        throw DataError("unknown provenance: " + prov);
    return rec;
}

// ---------------------------------------------------------------------------
// Line-delimited corpus files: a header line, then one record per line.
// ---------------------------------------------------------------------------

inline constexpr int kCorpusFormatVersion = 1;

class CorpusWriter {
  public:
    CorpusWriter(const std::string& path, const std::string& env_digest) : out_(path) {
        if (!out_) throw DataError("cannot open corpus file for writing: " + path);
        out_ << json{{"format", "flightdesk-corpus"},
                     {"version", kCorpusFormatVersion},
                     {"env", env_digest}}
                    .dump()
             << '\n';
    }

    void write(const CorpusRecord& rec) { out_ << record_to_json(rec).dump() << '\n'; }

    void close() { out_.close(); }

  private:
    std::ofstream out_;
};

// Pull-based reader; holds one record in memory at a time.
class CorpusReader {
  public:
    explicit CorpusReader(const std::string& path) : in_(path), path_(path) {
        if (!in_) throw DataError("cannot open corpus file: " + path);
        std::string line;
        if (!std::getline(in_, line)) throw ParseError("missing corpus header", 1);
        ++line_;
        try {
            const json h = json::parse(line);
            if (h.at("format").get<std::string>() != "flightdesk-corpus")
                throw DataError("not a corpus file");
            if (h.at("version").get<int>() != kCorpusFormatVersion)
                throw DataError("unsupported corpus version");
            env_digest_ = h.at("env").get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad corpus header: ") + e.what(), 1);
        }
    }

    const std::string& env_digest() const { return env_digest_; }

    std::optional<CorpusRecord> next() {
        std::string line;
        if (!std::getline(in_, line)) return std::nullopt;
        ++line_;
        if (line.empty()) throw ParseError("empty corpus line", line_);
        try {
            return record_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad corpus record: ") + e.what(), line_);
        }
    }

  private:
    std::ifstream in_;
    std::string path_;
    std::string env_digest_;
    std::size_t line_ = 0;
};

inline void write_corpus(const std::string& path, const std::vector<CorpusRecord>& records,
                         const EnvConfig& env) {
    CorpusWriter w(path, env_config_digest(env));
    for (const auto& rec : records) w.write(rec);
}

// Loads a whole corpus; checks it was generated under the expected env config.
inline std::vector<CorpusRecord> read_corpus(const std::string& path, const EnvConfig& env) {
    CorpusReader r(path);
    if (r.env_digest() != env_config_digest(env))
        throw DataError("corpus " + path + " was generated under a different env config");
    std::vector<CorpusRecord> out;
    while (auto rec = r.next()) out.push_back(std::move(*rec));
    return out;
}

}  // namespace flightdesk
