#pragma once

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "setflex/set_system.hpp"

namespace setflex {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace detail

/// One member per line, comma-separated labels; `#` starts a comment.
inline SetSystem parse_set_system_text(std::string_view text,
                                       const std::vector<std::string>& extra_taxa = {}) {
    std::vector<std::vector<std::string>> sets;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        auto labels = detail::split(body, ',');
        for (const auto& l : labels)
            if (!TaxonTable::valid_label(l))
                throw InputError("line " + std::to_string(lineno) + ": invalid taxon label '" + l + "'");
        sets.push_back(std::move(labels));
    }
    return SetSystem::from_labels(sets, extra_taxa);
}

inline std::string write_set_system_text(const SetSystem& system) {
    std::string out;
    for (std::size_t i = 0; i < system.size(); ++i) out += system.member_label(i) + "\n";
    return out;
}

/// `{"sets": [["a","b","c"], ...], "taxa": [...]}`; `taxa` is optional and
/// lists the full universe (needed for taxa that occur in no member).
inline SetSystem parse_set_system_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("malformed set-system JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("sets") || !j["sets"].is_array())
        throw InputError("set-system JSON needs a \"sets\" array");
    std::vector<std::vector<std::string>> sets;
    for (const auto& s : j["sets"]) {
        if (!s.is_array()) throw InputError("each entry of \"sets\" must be an array of labels");
        std::vector<std::string> labels;
        for (const auto& l : s) {
            if (!l.is_string()) throw InputError("taxon labels must be strings");
            labels.push_back(l.get<std::string>());
        }
        sets.push_back(std::move(labels));
    }
    std::vector<std::string> extra;
    if (j.contains("taxa")) {
        if (!j["taxa"].is_array()) throw InputError("\"taxa\" must be an array of labels");
        for (const auto& l : j["taxa"]) {
            if (!l.is_string()) throw InputError("taxon labels must be strings");
            extra.push_back(l.get<std::string>());
        }
    }
    return SetSystem::from_labels(sets, extra);
}

inline nlohmann::json to_json(const SetSystem& system) {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& m : system.members()) {
        nlohmann::json s = nlohmann::json::array();
        for (auto x : m) s.push_back(system.universe().label(x));
        sets.push_back(std::move(s));
    }
    nlohmann::json j{{"sets", std::move(sets)}};
    if (system.leaf_set().size() != system.universe().size()) j["taxa"] = system.universe().labels();
    return j;
}

inline std::string write_set_system_json(const SetSystem& system) { return to_json(system).dump(); }

/// Dispatches on the first non-blank character: `{` selects JSON.
inline SetSystem parse_set_system(std::string_view text, const std::vector<std::string>& extra_taxa = {}) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
        auto sys = parse_set_system_json(text);
        if (extra_taxa.empty()) return sys;
        std::vector<std::vector<std::string>> sets;
        for (const auto& m : sys.members()) {
            std::vector<std::string> labels;
            for (auto x : m) labels.push_back(sys.universe().label(x));
            sets.push_back(std::move(labels));
        }
        auto extra = extra_taxa;
        extra.insert(extra.end(), sys.universe().labels().begin(), sys.universe().labels().end());
        return SetSystem::from_labels(sets, extra);
    }
    return parse_set_system_text(text, extra_taxa);
}

}  // namespace setflex
