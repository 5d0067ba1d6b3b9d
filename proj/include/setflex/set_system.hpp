#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "setflex/report.hpp"
#include "setflex/taxa.hpp"

namespace setflex {

inline constexpr std::size_t default_exhaustive_cap = 16;

/// A collection of distinct, non-empty taxon subsets over an interned universe.
///
/// Members are kept in canonical order (lexicographic on their sorted id
/// lists), so member positions and every derived report are deterministic.
/// Taxa that appear in no member are allowed; L(members) is always computed.
class SetSystem {
public:
    SetSystem() = default;

    SetSystem(TaxonTable universe, std::vector<TaxonSet> members)
        : universe_(std::move(universe)), members_(std::move(members)) {
        for (auto& m : members_) {
            if (m.empty()) throw InputError("set system member is empty");
            const auto before = m.size();
            normalize(m);
            if (m.size() != before) throw InputError("set system member repeats a taxon");
            for (auto x : m)
                if (!universe_.has(x)) throw InputError("member taxon id not in universe");
        }
        std::sort(members_.begin(), members_.end());
        if (auto it = std::adjacent_find(members_.begin(), members_.end()); it != members_.end())
            throw InputError("duplicate member {" + universe_.join(*it) + "}");
    }

    /// Builds a system from label lists. All labels (plus `extra_taxa`) are
    /// interned in lexicographic order.
    static SetSystem from_labels(const std::vector<std::vector<std::string>>& sets,
                                 const std::vector<std::string>& extra_taxa = {}) {
        std::vector<std::string> all(extra_taxa);
        for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
        auto table = TaxonTable::sorted(all);
        std::vector<TaxonSet> members;
        members.reserve(sets.size());
        for (const auto& s : sets) {
            TaxonSet m;
            for (const auto& l : s) m.push_back(table.id(l));
            members.push_back(std::move(m));
        }
        return SetSystem(std::move(table), std::move(members));
    }

    /// Same universe, a different member list.
    SetSystem with_members(std::vector<TaxonSet> members) const {
        return SetSystem(universe_, std::move(members));
    }

    SetSystem subsystem(const SubsetSelection& sel) const {
        sel.check_range(size());
        std::vector<TaxonSet> ms;
        for (auto i : sel) ms.push_back(members_[i]);
        return with_members(std::move(ms));
    }

    const TaxonTable& universe() const { return universe_; }
    std::span<const TaxonSet> members() const { return members_; }
    const TaxonSet& operator[](std::size_t i) const { return members_.at(i); }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    std::optional<std::size_t> find(const TaxonSet& member) const {
        auto it = std::lower_bound(members_.begin(), members_.end(), member);
        if (it != members_.end() && *it == member)
            return static_cast<std::size_t>(it - members_.begin());
        return std::nullopt;
    }

    /// Common member size, if every member has the same size.
    std::optional<std::size_t> uniform_size() const {
        if (members_.empty()) return std::nullopt;
        const auto r = members_.front().size();
        for (const auto& m : members_)
            if (m.size() != r) return std::nullopt;
        return r;
    }

    std::size_t min_member_size() const {
        std::size_t k = members_.empty() ? 0 : members_.front().size();
        for (const auto& m : members_) k = std::min(k, m.size());
        return k;
    }

    TaxonSet leaf_set() const {
        TaxonSet out;
        for (const auto& m : members_) out.insert(out.end(), m.begin(), m.end());
        normalize(out);
        return out;
    }

    std::string member_label(std::size_t i) const { return universe_.join(members_.at(i)); }

    bool operator==(const SetSystem& o) const {
        return universe_ == o.universe_ && members_ == o.members_;
    }

private:
    TaxonTable universe_;
    std::vector<TaxonSet> members_;
};

enum class Measure { sigma, gamma };

/// Minimum of a measure with the witness that attains it.
struct ExcessReport {
    long long value = 0;
    SubsetSelection witness;
    std::size_t leaf_count = 0;
};

inline TaxonSet leaf_union(const SetSystem& system, const SubsetSelection& selection) {
    selection.check_range(system.size());
    TaxonSet out;
    for (auto i : selection) out.insert(out.end(), system[i].begin(), system[i].end());
    normalize(out);
    return out;
}

inline long long sigma(const SetSystem& system, const SubsetSelection& selection) {
    if (selection.empty()) return 0;
    return static_cast<long long>(leaf_union(system, selection).size()) -
           static_cast<long long>(selection.size());
}

inline long long gamma(const SetSystem& system, const SubsetSelection& selection) {
    if (selection.empty()) return 0;
    long long weight = 0;
    for (auto i : selection) {
        selection.check_range(system.size());
        if (system[i].size() < 2)
            throw SizeError("gamma needs members of size at least 2, got {" +
                            system.member_label(i) + "}");
        weight += static_cast<long long>(system[i].size()) - 2;
    }
    return static_cast<long long>(leaf_union(system, selection).size()) - weight;
}

inline long long evaluate(Measure m, const SetSystem& system, const SubsetSelection& selection) {
    return m == Measure::sigma ? sigma(system, selection) : gamma(system, selection);
}

inline void require_uniform(const SetSystem& system, const SubsetSelection& selection, int r) {
    if (r < 2) throw InputError("member size r must be at least 2");
    for (auto i : selection)
        if (system[i].size() != static_cast<std::size_t>(r))
            throw SizeError("member {" + system.member_label(i) + "} does not have size " +
                            std::to_string(r));
}

/// exc = |L| - |sel| - (r - 1) for a uniform size-r selection.
inline long long excess_uniform(const SetSystem& system, const SubsetSelection& selection, int r) {
    selection.check_range(system.size());
    if (selection.empty()) throw InputError("excess is defined for non-empty selections only");
    require_uniform(system, selection, r);
    return sigma(system, selection) - (r - 1);
}

/// exc' = |L| - 2 - sum(|s| - 2), members of size at least 3.
inline long long excess_general(const SetSystem& system, const SubsetSelection& selection) {
    selection.check_range(system.size());
    if (selection.empty()) throw InputError("excess is defined for non-empty selections only");
    for (auto i : selection)
        if (system[i].size() < 3)
            throw SizeError("exc' needs members of size at least 3, got {" +
                            system.member_label(i) + "}");
    return gamma(system, selection) - 2;
}

inline long long occurrence_count(const SetSystem& system, TaxonId x) {
    if (!system.universe().has(x)) throw InputError("taxon not in universe");
    long long n = 0;
    for (const auto& m : system.members()) n += contains(m, x) ? 1 : 0;
    return n;
}

namespace detail {

inline void check_cap(const SetSystem& system, std::size_t cap, const char* polynomial) {
    if (cap > 62) throw InputError("exhaustive cap above 62 members is not supported");
    if (system.size() > cap)
        throw CapExceeded("exhaustive scan over " + std::to_string(system.size()) +
                          " members exceeds the cap of " + std::to_string(cap) + "; use " +
                          polynomial + " instead");
}

// Strict weak order used to pick witnesses: value, then cardinality, then
// lexicographic member positions.
inline bool better_witness(long long v, std::uint64_t mask, long long best_v, std::uint64_t best_mask) {
    if (v != best_v) return v < best_v;
    const int pa = std::popcount(mask), pb = std::popcount(best_mask);
    if (pa != pb) return pa < pb;
    // lexicographic on sorted index lists: the first differing index decides
    const std::uint64_t diff = mask ^ best_mask;
    if (!diff) return false;
    const std::uint64_t low = diff & (~diff + 1);
    return (mask & low) != 0;
}

/// Visits every non-empty subset in Gray-code order, maintaining |L| and
/// the selected weight incrementally. `visit(mask, leaf_count, card, weight)`.
template <class Visit>
void scan_subsets(const SetSystem& system, std::span<const long long> weights, Visit&& visit) {
    const std::size_t n = system.size();
    std::vector<int> cover(system.universe().size(), 0);
    long long leaf_count = 0, weight = 0, card = 0;
    std::uint64_t mask = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < total; ++step) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(step));
        const std::uint64_t b = std::uint64_t{1} << bit;
        const bool adding = !(mask & b);
        mask ^= b;
        for (auto x : system[bit]) {
            auto& c = cover[static_cast<std::size_t>(x)];
            if (adding) {
                if (c++ == 0) ++leaf_count;
            } else {
                if (--c == 0) --leaf_count;
            }
        }
        weight += adding ? weights[bit] : -weights[bit];
        card += adding ? 1 : -1;
        visit(mask, leaf_count, card, weight);
    }
}

}  // namespace detail

/// Exhaustive minimum of sigma or gamma over non-empty subsets.
inline ExcessReport exhaustive_minimum(Measure measure, const SetSystem& system,
                                       std::size_t cap = default_exhaustive_cap) {
    if (system.empty()) throw InputError("minimisation needs a non-empty set system");
    detail::check_cap(system, cap, "graphopt::sigma_star/gamma_star");
    std::vector<long long> w(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        if (measure == Measure::sigma) {
            w[i] = 1;
        } else {
            if (system[i].size() < 2) throw SizeError("gamma needs members of size at least 2");
            w[i] = static_cast<long long>(system[i].size()) - 2;
        }
    }
    long long best = 0;
    std::uint64_t best_mask = 0;
    long long best_leaves = 0;
    detail::scan_subsets(system, w, [&](std::uint64_t mask, long long leaves, long long, long long weight) {
        const long long v = leaves - weight;
        if (best_mask == 0 || detail::better_witness(v, mask, best, best_mask)) {
            best = v;
            best_mask = mask;
            best_leaves = leaves;
        }
    });
    return {best, SubsetSelection::from_mask(best_mask), static_cast<std::size_t>(best_leaves)};
}

inline CheckReport is_thin_exhaustive(const SetSystem& system, int r,
                                      std::size_t cap = default_exhaustive_cap) {
    if (system.empty()) throw InputError("thinness is defined for non-empty set systems");
    require_uniform(system, SubsetSelection::all(system.size()), r);
    detail::check_cap(system, cap, "graphopt::is_thin");
    const auto min = exhaustive_minimum(Measure::sigma, system, cap);
    CheckReport rep;
    rep.method = Method::exhaustive;
    rep.value = min.value - (r - 1);
    rep.verdict = *rep.value >= 0;
    if (!rep.verdict) rep.certificate = min.witness;
    rep.stats["subsets_scanned"] = static_cast<long long>((std::uint64_t{1} << system.size()) - 1);
    return rep;
}

inline CheckReport is_slim_exhaustive(const SetSystem& system,
                                      std::size_t cap = default_exhaustive_cap) {
    if (system.empty()) throw InputError("slimness is defined for non-empty set systems");
    for (std::size_t i = 0; i < system.size(); ++i)
        if (system[i].size() < 3)
            throw SizeError("slim needs members of size at least 3, got {" + system.member_label(i) + "}");
    detail::check_cap(system, cap, "graphopt::is_slim");
    const auto min = exhaustive_minimum(Measure::gamma, system, cap);
    CheckReport rep;
    rep.method = Method::exhaustive;
    rep.value = min.value - 2;
    rep.verdict = *rep.value >= 0;
    if (!rep.verdict) rep.certificate = min.witness;
    rep.stats["subsets_scanned"] = static_cast<long long>((std::uint64_t{1} << system.size()) - 1);
    return rep;
}

struct SubmodularCheck {
    bool holds = false;
    long long f_first = 0, f_second = 0, f_union = 0, f_intersection = 0;
};

/// f(A) + f(B) >= f(A u B) + f(A n B) for f in {sigma, gamma}.
inline SubmodularCheck check_submodular_pair(Measure measure, const SetSystem& system,
                                             const SubsetSelection& a, const SubsetSelection& b) {
    a.check_range(system.size());
    b.check_range(system.size());
    SubmodularCheck c;
    c.f_first = evaluate(measure, system, a);
    c.f_second = evaluate(measure, system, b);
    c.f_union = evaluate(measure, system, a.united(b));
    c.f_intersection = evaluate(measure, system, a.intersected(b));
    c.holds = c.f_first + c.f_second >= c.f_union + c.f_intersection;
    return c;
}

struct PatchworkReport {
    bool verdict = false;
    /// Non-empty sub-collections with exc' = 0, in canonical order.
    std::vector<SubsetSelection> family;
    std::optional<std::pair<SubsetSelection, SubsetSelection>> violation;
};

/// Checks that the zero-exc' sub-collections of a slim system are closed
/// under union and intersection of intersecting pairs.
inline PatchworkReport patchwork_check(const SetSystem& system,
                                       std::size_t cap = default_exhaustive_cap) {
    if (!is_slim_exhaustive(system, cap).verdict)
        throw PreconditionError("patchwork check requires a slim set system");
    std::vector<long long> w(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) w[i] = static_cast<long long>(system[i].size()) - 2;

    std::vector<std::uint64_t> zero;
    detail::scan_subsets(system, w, [&](std::uint64_t mask, long long leaves, long long, long long weight) {
        if (leaves - 2 - weight == 0) zero.push_back(mask);
    });
    const auto by_indices = [](std::uint64_t a, std::uint64_t b) {
        return SubsetSelection::from_mask(a) < SubsetSelection::from_mask(b);
    };
    std::sort(zero.begin(), zero.end(), by_indices);
    const std::unordered_set<std::uint64_t> in_family(zero.begin(), zero.end());

    PatchworkReport rep;
    rep.verdict = true;
    for (std::size_t i = 0; i < zero.size() && rep.verdict; ++i) {
        for (std::size_t j = i + 1; j < zero.size(); ++j) {
            const auto a = zero[i], b = zero[j];
            if (!(a & b)) continue;
            if (!in_family.count(a | b) || !in_family.count(a & b)) {
                rep.verdict = false;
                rep.violation = std::pair{SubsetSelection::from_mask(a), SubsetSelection::from_mask(b)};
                break;
            }
        }
    }
    rep.family.reserve(zero.size());
    for (auto m : zero) rep.family.push_back(SubsetSelection::from_mask(m));
    return rep;
}

}  // namespace setflex
