#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace setflex {

// Error hierarchy shared by every module. The CLI maps these onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct SizeError : InputError {
    using InputError::InputError;
};
struct PreconditionError : Error {
    using Error::Error;
};
struct CapExceeded : Error {
    using Error::Error;
};
struct InternalError : Error {
    using Error::Error;
};

using TaxonId = int;

/// Sorted, duplicate-free list of taxon ids.
using TaxonSet = std::vector<TaxonId>;

inline void normalize(TaxonSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline TaxonSet set_union(const TaxonSet& a, const TaxonSet& b) {
    TaxonSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline TaxonSet set_difference(const TaxonSet& a, const TaxonSet& b) {
    TaxonSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline TaxonSet set_intersection(const TaxonSet& a, const TaxonSet& b) {
    TaxonSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool contains(const TaxonSet& s, TaxonId x) {
    return std::binary_search(s.begin(), s.end(), x);
}

inline bool is_subset(const TaxonSet& small, const TaxonSet& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

/// Interned taxon labels. Ids are dense and assigned in interning order.
class TaxonTable {
public:
    TaxonTable() = default;

    /// Interns the labels in lexicographic order, so that id order equals label order.
    static TaxonTable sorted(std::vector<std::string> labels) {
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        TaxonTable t;
        for (const auto& l : labels) t.intern(l);
        return t;
    }

    static bool valid_label(std::string_view label) {
        if (label.empty()) return false;
        return std::none_of(label.begin(), label.end(), [](char c) {
            return c == '(' || c == ')' || c == ',' || c == ';' || c == ':' || c == ' ' ||
                   c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        });
    }

    TaxonId intern(std::string_view label) {
        if (auto it = index_.find(std::string(label)); it != index_.end()) return it->second;
        if (!valid_label(label)) throw InputError("invalid taxon label '" + std::string(label) + "'");
        const auto id = static_cast<TaxonId>(labels_.size());
        labels_.emplace_back(label);
        index_.emplace(labels_.back(), id);
        return id;
    }

    std::optional<TaxonId> find(std::string_view label) const {
        if (auto it = index_.find(std::string(label)); it != index_.end()) return it->second;
        return std::nullopt;
    }

    TaxonId id(std::string_view label) const {
        if (auto found = find(label)) return *found;
        throw InputError("unknown taxon '" + std::string(label) + "'");
    }

    const std::string& label(TaxonId id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= labels_.size())
            throw InputError("taxon id " + std::to_string(id) + " out of range");
        return labels_[static_cast<std::size_t>(id)];
    }

    bool has(TaxonId id) const { return id >= 0 && static_cast<std::size_t>(id) < labels_.size(); }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    TaxonSet all() const {
        TaxonSet out(labels_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<TaxonId>(i);
        return out;
    }

    /// Comma-joined labels of a set, in the set's order.
    std::string join(const TaxonSet& s, std::string_view sep = ",") const {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out += sep;
            out += label(s[i]);
        }
        return out;
    }

    bool operator==(const TaxonTable& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, TaxonId> index_;
};

}  // namespace setflex
