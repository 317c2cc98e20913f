#include "klucb/family_io.hpp"

#include <fstream>

namespace klucb {

using nlohmann::json;

FamilySpec family_from_json(const json& j) {
    if (!j.is_object()) throw IoError("family spec must be a JSON object");
    if (j.contains("two_state")) {
        const json& ts = j.at("two_state");
        if (!ts.is_object() || !ts.contains("p") || !ts.contains("q"))
            throw IoError("two_state shorthand needs numeric fields p and q");
        return two_state_family(ts.at("p").get<double>(), ts.at("q").get<double>());
    }
    for (const char* key : {"states", "P", "f"})
        if (!j.contains(key)) throw IoError(std::string("family spec is missing \"") + key + "\"");
    const json& jstates = j.at("states");
    const json& jp = j.at("P");
    const json& jf = j.at("f");
    if (!jstates.is_array() || !jp.is_array() || !jf.is_array())
        throw IoError("family fields states, P and f must be arrays");
    const std::size_t n = jstates.size();
    std::vector<std::string> states(n);
    for (std::size_t i = 0; i < n; ++i)
        states[i] = jstates[i].is_string() ? jstates[i].get<std::string>() : jstates[i].dump();
    if (jp.size() != n) throw IoError("P must have one row per state");
    Matrix P(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (!jp[x].is_array() || jp[x].size() != n)
            throw IoError("P row " + std::to_string(x) + " must have one entry per state");
        for (std::size_t y = 0; y < n; ++y) P(x, y) = jp[x][y].get<double>();
    }
    if (jf.size() != n) throw IoError("f must have one value per state");
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = jf[i].get<double>();
    return build_family(std::move(states), std::move(P), std::move(f));
}

FamilySpec load_family_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open family file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
    return family_from_json(j);
}

nlohmann::json family_to_json(const FamilySpec& fam) {
    json j;
    j["states"] = fam.states;
    const std::size_t n = fam.size();
    json rows = json::array();
    for (std::size_t x = 0; x < n; ++x) {
        json row = json::array();
        for (std::size_t y = 0; y < n; ++y) row.push_back(fam.P(x, y));
        rows.push_back(row);
    }
    j["P"] = rows;
    j["f"] = fam.f;
    return j;
}

}  // namespace klucb
