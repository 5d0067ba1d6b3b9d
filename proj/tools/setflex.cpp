#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "setflex/setflex.hpp"

using namespace setflex;
using nlohmann::json;

namespace {

enum Exit { ok = 0, negative = 1, usage = 2, over_budget = 3, internal = 4 };

struct Options {
    bool json = false;
    bool no_stats = false;
    std::string input = "-";
    std::string taxa;
};

std::string read_input(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> label_list(const std::string& csv) {
    std::vector<std::string> out;
    if (detail::trim(csv).empty()) return out;
    for (auto& l : detail::split(csv, ',')) {
        if (!TaxonTable::valid_label(l)) throw InputError("invalid taxon label '" + l + "'");
        out.push_back(l);
    }
    return out;
}

std::vector<std::string> content_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto body = detail::trim(line);
        if (!body.empty()) out.push_back(std::move(body));
    }
    return out;
}

json labels_json(const TaxonSet& s, const TaxonTable& taxa) {
    json out = json::array();
    for (auto x : s) out.push_back(taxa.label(x));
    return out;
}

json members_json(const SetSystem& sys, const SubsetSelection& sel) {
    json out = json::array();
    for (auto i : sel) out.push_back(labels_json(sys[i], sys.universe()));
    return out;
}

std::string members_text(const SetSystem& sys, const SubsetSelection& sel) {
    std::string out;
    for (auto i : sel) out += (out.empty() ? "{" : " {") + sys.member_label(i) + "}";
    return out;
}

void emit(const Options& opt, const json& j, const std::string& human) {
    if (opt.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << human;
}

long long budget_from(long long flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("SETFLEX_BUDGET")) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(env, &used);
            if (used == std::string(env).size() && v > 0) return v;
        } catch (const std::exception&) {
        }
        throw InputError(std::string("SETFLEX_BUDGET must be a positive integer, got '") + env + "'");
    }
    return default_flex_budget;
}

// Triples come as `a,b|c` lines or Newick trees (expanded to their triples).
struct TripleInput {
    TaxonTable taxa;
    TripleSet triples;
};

TripleInput read_triples(const std::string& text, const std::vector<std::string>& extra) {
    const auto lines = content_lines(text);
    std::vector<std::string> labels = extra;
    for (const auto& l : lines) {
        if (l.find('(') != std::string::npos) {
            auto ls = newick_labels(l);
            labels.insert(labels.end(), ls.begin(), ls.end());
        } else {
            for (auto& part : detail::split(l, ','))
                for (auto& p : detail::split(part, '|'))
                    if (!p.empty()) labels.push_back(p);
        }
    }
    for (const auto& l : labels)
        if (!TaxonTable::valid_label(l)) throw InputError("invalid taxon label '" + l + "'");
    TripleInput in{TaxonTable::sorted(labels), {}};
    std::vector<RootedTriple> all;
    for (const auto& l : lines) {
        if (l.find('(') != std::string::npos) {
            const auto tree = parse_newick(l, in.taxa);
            const auto ts = triples_of(tree);
            all.insert(all.end(), ts.begin(), ts.end());
        } else {
            all.push_back(parse_triple(l, in.taxa));
        }
    }
    in.triples = make_triple_set(std::move(all));
    return in;
}

SetSystem read_system(const Options& opt) { return parse_set_system(read_input(opt.input), label_list(opt.taxa)); }

json stats_json(const Options& opt, const std::map<std::string, long long>& stats) {
    if (opt.no_stats) return json::object();
    json out = json::object();
    for (const auto& [k, v] : stats) out[k] = v;
    return out;
}

std::string stats_text(const Options& opt, const std::map<std::string, long long>& stats, double ms) {
    if (opt.no_stats) return {};
    std::ostringstream out;
    for (const auto& [k, v] : stats) out << k << ": " << v << "\n";
    out << "wall_ms: " << ms << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------

int cmd_check(const Options& opt, const std::string& kind, const std::string& method_flag, int r_flag,
              long long budget_flag) {
    const auto start = std::chrono::steady_clock::now();
    const auto sys = read_system(opt);
    const auto& taxa = sys.universe();
    json j{{"command", "check"}, {"kind", kind}};
    std::ostringstream h;
    bool verdict = false;
    std::map<std::string, long long> stats;

    const auto method = [&](std::initializer_list<const char*> allowed) {
        if (method_flag.empty()) return std::string(*allowed.begin());
        for (auto a : allowed)
            if (method_flag == a) return method_flag;
        std::string list;
        for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        throw InputError("method '" + method_flag + "' is not available for '" + kind + "' (use " + list + ")");
    };

    if (kind == "thin" || kind == "slim") {
        const auto m = method({"mincut", "exhaustive"});
        CheckReport rep;
        const char* measure = kind == "thin" ? "sigma_star" : "gamma_star";
        long long star = 0;
        if (kind == "thin") {
            int r = r_flag;
            if (r <= 0) {
                const auto u = sys.uniform_size();
                if (!u) throw SizeError("members differ in size; pass --r or use 'check slim'");
                r = static_cast<int>(*u);
            }
            j["r"] = r;
            rep = m == "mincut" ? is_thin(sys, r) : is_thin_exhaustive(sys, r);
            star = m == "mincut" ? *rep.value : exhaustive_minimum(Measure::sigma, sys).value;
        } else {
            rep = m == "mincut" ? is_slim(sys) : is_slim_exhaustive(sys);
            star = m == "mincut" ? *rep.value : exhaustive_minimum(Measure::gamma, sys).value;
        }
        verdict = rep.verdict;
        stats = rep.stats;
        j["method"] = to_string(rep.method);
        j[measure] = star;
        if (rep.method == Method::exhaustive) j["minimum_excess"] = *rep.value;
        h << "verdict: " << (verdict ? "true" : "false") << "\nmethod: " << to_string(rep.method) << "\n"
          << (kind == "thin" ? "sigma*" : "gamma*") << ": " << star << "\n";
        if (const auto* w = rep.witness()) {
            j["certificate"] = {{"minimizing_subset", members_json(sys, *w)}};
            h << "minimizing subset: " << members_text(sys, *w) << "\n";
        }
        for (const auto& n : rep.notes) h << "note: " << n << "\n";
        if (!rep.notes.empty()) j["notes"] = rep.notes;
    } else if (kind == "flexible") {
        const auto m = method({"mincut", "bruteforce"});
        if (m == "mincut") {
            for (std::size_t i = 0; i < sys.size(); ++i)
                if (sys[i].size() < 3)
                    throw SizeError("flexibility needs members of size at least 3, got {" + sys.member_label(i) + "}");
            const auto rep = is_slim(sys);
            verdict = rep.verdict;
            stats = rep.stats;
            j["method"] = "mincut";
            j["gamma_star"] = *rep.value;
            h << "verdict: " << (verdict ? "true" : "false") << "\nmethod: mincut\ngamma*: " << *rep.value << "\n";
            if (const auto* w = rep.witness()) {
                j["certificate"] = {{"minimizing_subset", members_json(sys, *w)}};
                h << "minimizing subset: " << members_text(sys, *w) << "\n";
            }
        } else {
            const auto budget = budget_from(budget_flag);
            const auto rep = is_flexible_bruteforce(sys, budget);
            verdict = rep.verdict;
            stats["assignments_checked"] = rep.assignments_checked;
            j["method"] = "bruteforce";
            j["assignments_checked"] = rep.assignments_checked;
            h << "verdict: " << (verdict ? "true" : "false") << "\nmethod: bruteforce\nassignments checked: "
              << rep.assignments_checked << "\n";
            if (rep.counterexample) {
                json trees = json::array();
                json triples = json::array();
                h << "counterexample trees:\n";
                for (std::size_t i = 0; i < sys.size(); ++i) {
                    const auto nw = write_newick((*rep.counterexample)[i], taxa);
                    trees.push_back({{"member", labels_json(sys[i], taxa)}, {"tree", nw}});
                    h << "  " << nw << "\n";
                }
                h << "counterexample triples:\n";
                for (const auto& t : pooled_triples(*rep.counterexample)) {
                    triples.push_back(format_triple(t, taxa));
                    h << format_triple(t, taxa) << "\n";
                }
                const auto b = build_supertree(pooled_triples(*rep.counterexample), taxa.all());
                j["certificate"] = {{"assignment", trees},
                                    {"triples", triples},
                                    {"incompatible_leaf_set", labels_json(b.witness, taxa)}};
                h << "incompatible leaf set: " << taxa.join(b.witness, ",") << "\n";
            }
        }
    } else if (kind == "order-flexible") {
        const auto m = method({"forest", "bruteforce"});
        const auto rep = is_total_order_flexible(sys, m == "forest" ? OrderMode::forest : OrderMode::bruteforce);
        verdict = rep.verdict;
        stats = rep.stats;
        j["method"] = to_string(rep.method);
        h << "verdict: " << (verdict ? "true" : "false") << "\nmethod: " << to_string(rep.method) << "\n";
        if (const auto* cyc = std::get_if<std::vector<IncidenceVertex>>(&rep.certificate)) {
            const auto g = incidence_graph(sys);
            json c = json::array();
            std::string text;
            for (const auto& v : *cyc) {
                const auto label = v.is_member ? "{" + sys.member_label(static_cast<std::size_t>(v.index)) + "}"
                                               : taxa.label(g.right[static_cast<std::size_t>(v.index)]);
                c.push_back(label);
                text += (text.empty() ? "" : " - ") + label;
            }
            j["certificate"] = {{"incidence_cycle", c}};
            h << "cycle in G(tau): " << text << "\n";
        } else if (const auto* ow = std::get_if<OrderWitness>(&rep.certificate)) {
            json o = json::array();
            std::string text;
            for (const auto& [x, y] : ow->orientation) {
                o.push_back(taxa.label(x) + "<" + taxa.label(y));
                text += (text.empty() ? "" : ", ") + taxa.label(x) + "<" + taxa.label(y);
            }
            std::string cyc;
            for (auto x : ow->cycle) cyc += taxa.label(x) + "<";
            cyc += taxa.label(ow->cycle.front());
            j["certificate"] = {{"orientation", o}, {"cycle", labels_json(ow->cycle, taxa)}};
            h << "orientation: " << text << "\ncycle: " << cyc << "\n";
        }
    } else {
        throw InputError("unknown check kind '" + kind + "' (use thin, slim, flexible, order-flexible)");
    }

    j["verdict"] = verdict;
    j["stats"] = stats_json(opt, stats);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    emit(opt, j, h.str() + stats_text(opt, stats, ms));
    return verdict ? ok : negative;
}

int cmd_supertree(const Options& opt, bool binary) {
    const auto in = read_triples(read_input(opt.input), label_list(opt.taxa));
    const auto res = build_supertree(in.triples, in.taxa.all());
    json j{{"command", "supertree"}, {"compatible", res.compatible()}};
    if (!res.compatible()) {
        j["witness"] = labels_json(res.witness, in.taxa);
        emit(opt, j, "incompatible\nwitness: " + in.taxa.join(res.witness, ",") + "\n");
        return negative;
    }
    auto tree = binary ? make_binary(*res.tree) : *res.tree;
    const auto newick = write_newick(tree, in.taxa);
    TaxonTable check_taxa = in.taxa;
    const auto reparsed = parse_newick(newick, check_taxa);
    for (const auto& t : in.triples)
        if (!displays_triple(reparsed, t))
            throw InternalError("supertree does not display " + format_triple(t, in.taxa));
    j["newick"] = newick;
    j["binary"] = tree.is_binary();
    emit(opt, j, newick + "\n");
    return ok;
}

int cmd_represent(const Options& opt, const std::string& kind) {
    const auto sys = read_system(opt);
    const auto& taxa = sys.universe();
    json j{{"command", "represent"}, {"kind", kind}};
    std::ostringstream h;
    json map = json::array();
    if (kind == "median-caterpillar") {
        const auto rep = caterpillar_median_representation(sys);
        const auto newick = write_newick(rep.tree, taxa);
        j["newick"] = newick;
        j["spine_order"] = labels_json(rep.spine_order, taxa);
        j["verified"] = rep.verified;
        if (!rep.appended_taxa.empty()) j["appended_taxa"] = labels_json(rep.appended_taxa, taxa);
        h << newick << "\nspine order: " << taxa.join(rep.spine_order, ",") << "\n";
        for (std::size_t i = 0; i < sys.size(); ++i) {
            map.push_back({{"member", labels_json(sys[i], taxa)}, {"vertex", rep.vertex_map[i]}});
            h << "med{" << sys.member_label(i) << "} = " << rep.vertex_map[i] << "\n";
        }
        if (!opt.no_stats) {
            j["stats"] = {{"fallback_searches", rep.fallback_searches}, {"candidate_retries", rep.candidate_retries}};
        }
        h << "verified: " << (rep.verified ? "true" : "false") << "\n";
    } else if (kind == "lca-caterpillar") {
        const auto rep = lca_caterpillar_representation(sys);
        const auto newick = write_newick(rep.tree, taxa);
        j["newick"] = newick;
        j["leaf_order"] = labels_json(rep.leaf_order, taxa);
        j["verified"] = rep.verified;
        if (!rep.appended_taxa.empty()) j["appended_taxa"] = labels_json(rep.appended_taxa, taxa);
        h << newick << "\nleaf order (bottom up): " << taxa.join(rep.leaf_order, ",") << "\n";
        for (std::size_t i = 0; i < sys.size(); ++i) {
            map.push_back({{"member", labels_json(sys[i], taxa)}, {"vertex", rep.vertex_map[i]}});
            h << "lca{" << sys.member_label(i) << "} = " << rep.vertex_map[i] << "\n";
        }
        if (!rep.appended_taxa.empty()) h << "note: taxa outside L(tau) appended above the root\n";
        h << "verified: " << (rep.verified ? "true" : "false") << "\n";
    } else {
        throw InputError("unknown representation '" + kind + "' (use median-caterpillar, lca-caterpillar)");
    }
    j["vertex_map"] = map;
    emit(opt, j, h.str());
    return ok;
}

int cmd_count(const Options& opt, int formula_n, bool has_input) {
    json j{{"command", "count"}};
    std::ostringstream h;
    std::optional<long long> enumerated;
    std::optional<std::uint64_t> formula;
    std::optional<std::size_t> n_taxa;
    bool disjoint = false;
    if (has_input) {
        const auto in = read_triples(read_input(opt.input), label_list(opt.taxa));
        const auto x = in.taxa.all();
        enumerated = count_displaying(in.triples, x);
        n_taxa = x.size();
        const auto sets = leaf_sets(in.triples);
        disjoint = leaf_union(in.triples).size() == 3 * in.triples.size() && sets.size() == in.triples.size() &&
                   x.size() == 3 * in.triples.size();
        j["taxa"] = x.size();
        j["count"] = *enumerated;
        h << "count: " << *enumerated << "\n";
    }
    if (formula_n > 0) {
        formula = disjoint_count_formula(formula_n);
        j["formula_n"] = formula_n;
        j["formula"] = *formula;
        h << "formula(n=" << formula_n << "): " << *formula << "\n";
        if (!has_input && static_cast<std::size_t>(formula_n) <= default_enumeration_cap) {
            // k disjoint triples over n taxa: enumerate to cross-check
            TaxonTable taxa;
            std::vector<RootedTriple> ts;
            for (int k = 0; k < formula_n / 3; ++k) {
                const auto base = "t" + std::to_string(k) + "_";
                ts.push_back(RootedTriple::make(taxa.intern(base + "a"), taxa.intern(base + "b"),
                                                taxa.intern(base + "c")));
            }
            enumerated = count_displaying(ts, taxa.all());
            n_taxa = static_cast<std::size_t>(formula_n);
            disjoint = true;
            j["count"] = *enumerated;
            h << "enumerated: " << *enumerated << "\n";
        }
        if (enumerated && disjoint && n_taxa == static_cast<std::size_t>(formula_n)) {
            if (static_cast<std::uint64_t>(*enumerated) != *formula)
                throw InternalError("enumerated count " + std::to_string(*enumerated) +
                                    " disagrees with the formula value " + std::to_string(*formula));
            j["cross_checked"] = true;
            h << "cross-checked: enumeration = formula\n";
        }
    }
    emit(opt, j, h.str());
    return ok;
}

int cmd_sdr(const Options& opt, const std::string& b_flag) {
    const auto sys = read_system(opt);
    const auto& taxa = sys.universe();
    TaxonSet b;
    for (const auto& l : label_list(b_flag)) b.push_back(taxa.id(l));
    normalize(b);
    const auto res = sdr(sys, b);
    json j{{"command", "sdr"}, {"B", labels_json(b, taxa)}, {"success", res.success}};
    std::ostringstream h;
    json derived = json::array();
    for (const auto& d : res.derived) derived.push_back(labels_json(d, taxa));
    j["derived"] = derived;
    if (res.success) {
        json reps = json::array();
        h << "success\n";
        for (std::size_t i = 0; i < sys.size(); ++i) {
            reps.push_back({{"member", labels_json(sys[i], taxa)}, {"representative", taxa.label(res.representatives[i])}});
            h << "{" << sys.member_label(i) << "} -> " << taxa.label(res.representatives[i]) << "\n";
        }
        j["representatives"] = reps;
    } else {
        TaxonSet u;
        for (auto i : res.hall_violator) u = set_union(u, res.derived[i]);
        j["hall_violator"] = members_json(sys, res.hall_violator);
        j["hall_union"] = labels_json(u, taxa);
        h << "no system of distinct representatives\nhall violator: " << members_text(sys, res.hall_violator)
          << "\nunion after removing B: {" << taxa.join(u, ",") << "}\n";
    }
    emit(opt, j, h.str());
    return res.success ? ok : negative;
}

int cmd_order(const Options& opt) {
    const auto lines = content_lines(read_input(opt.input));
    std::vector<std::string> labels = label_list(opt.taxa);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& l : lines) {
        const auto parts = detail::split(l, '<');
        if (parts.size() != 2 || !TaxonTable::valid_label(parts[0]) || !TaxonTable::valid_label(parts[1]))
            throw InputError("malformed precedence '" + l + "', expected x<y");
        pairs.emplace_back(parts[0], parts[1]);
        labels.push_back(parts[0]);
        labels.push_back(parts[1]);
    }
    const auto taxa = TaxonTable::sorted(labels);
    Orientation o;
    for (const auto& [x, y] : pairs) o.emplace_back(taxa.id(x), taxa.id(y));
    const auto res = extend_to_total_order(taxa.all(), o);
    json j{{"command", "order"}, {"extends", res.order.has_value()}};
    if (res.order) {
        j["order"] = labels_json(*res.order, taxa);
        emit(opt, j, taxa.join(*res.order, "<") + "\n");
        return ok;
    }
    j["cycle"] = labels_json(res.cycle, taxa);
    emit(opt, j, "cycle: " + taxa.join(res.cycle, "<") + "<" + taxa.label(res.cycle.front()) + "\n");
    return negative;
}

int cmd_gen_defining(const Options& opt) {
    const auto text = read_input(opt.input);
    auto labels = newick_labels(text);
    for (const auto& l : labels)
        if (!TaxonTable::valid_label(l)) throw InputError("invalid taxon label '" + l + "'");
    auto taxa = TaxonTable::sorted(labels);
    const auto tree = parse_newick(detail::trim(text), taxa);
    const auto ts = defining_triples(tree);
    json arr = json::array();
    std::string h;
    for (const auto& t : ts) {
        arr.push_back(format_triple(t, taxa));
        h += format_triple(t, taxa) + "\n";
    }
    emit(opt, json{{"command", "gen-defining"}, {"triples", arr}}, h);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phylogenetic flexibility of set systems"};
    app.require_subcommand(1);
    Options opt;
    app.add_flag("--json", opt.json, "Machine-readable output");
    app.add_flag("--no-stats", opt.no_stats, "Omit counters and timings");

    std::string kind, method, b_flag;
    int r = 0, formula_n = 0;
    long long budget = 0;
    bool binary = false;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--taxa", opt.taxa, "Extra taxa (comma-separated) added to the universe");
        sub->add_flag("--json", opt.json, "Machine-readable output");
        sub->add_flag("--no-stats", opt.no_stats, "Omit counters and timings");
    };

    auto* check = app.add_subcommand("check", "Decide thin, slim, flexible or order-flexible");
    check->add_option("kind", kind, "thin | slim | flexible | order-flexible")->required();
    check->add_option("input", opt.input, "Set system file ('-' for stdin)");
    check->add_option("--r", r, "Member size for thinness (default: the uniform member size)");
    check->add_option("--method", method, "mincut | exhaustive | bruteforce | forest");
    check->add_option("--budget", budget, "Brute-force assignment budget");
    common(check);

    auto* supertree = app.add_subcommand("supertree", "Run BUILD on triples or trees");
    supertree->add_option("input", opt.input, "Triples (a,b|c) or Newick trees, one per line");
    supertree->add_flag("--binary", binary, "Refine the result to a binary tree");
    common(supertree);

    auto* represent = app.add_subcommand("represent", "Construct a caterpillar representation");
    represent->add_option("kind", kind, "median-caterpillar | lca-caterpillar")->required();
    represent->add_option("input", opt.input, "Set system file ('-' for stdin)");
    common(represent);

    auto* count = app.add_subcommand("count", "Count binary trees displaying a set of triples");
    auto* count_input = count->add_option("input", opt.input, "Triples (a,b|c) or Newick trees");
    count->add_option("--formula-n", formula_n, "Evaluate the disjoint-triples formula for n taxa");
    common(count);

    auto* sdr_cmd = app.add_subcommand("sdr", "Distinct representatives after removing B");
    sdr_cmd->add_option("input", opt.input, "Set system file ('-' for stdin)");
    sdr_cmd->add_option("--B", b_flag, "Taxa to remove (comma-separated)");
    common(sdr_cmd);

    auto* order = app.add_subcommand("order", "Extend precedences x<y to a total order");
    order->add_option("input", opt.input, "One precedence x<y per line");
    common(order);

    auto* gen = app.add_subcommand("gen-defining", "Defining triples of a binary tree");
    gen->add_option("input", opt.input, "Newick tree");
    common(gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*check) return cmd_check(opt, kind, method, r, budget);
        if (*supertree) return cmd_supertree(opt, binary);
        if (*represent) return cmd_represent(opt, kind);
        if (*count) {
            if (formula_n <= 0 && !*count_input && opt.input == "-") return cmd_count(opt, 0, true);
            return cmd_count(opt, formula_n, static_cast<bool>(*count_input));
        }
        if (*sdr_cmd) return cmd_sdr(opt, b_flag);
        if (*order) return cmd_order(opt);
        if (*gen) return cmd_gen_defining(opt);
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return over_budget;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return usage;
}
