#include "ascend/json_io.hpp"
#include "ascend/lifts.hpp"
#include "ascend/ramification.hpp"
#include "ascend/strata.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace ascend;
namespace fs = std::filesystem;

namespace {

/* Exit-code contract: 0 = success (one JSON document on stdout);
 * 1 = domain infeasibility (structured JSON report on stdout);
 * 2 = usage / unreadable input (message on stderr only). */

struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

void emit(const Json& doc) { std::cout << doc.dump() << "\n"; }

int emit_infeasible(const std::string& kind, const std::string& type, const std::string& what) {
    emit(make_document(kind, Json{{"error", what}, {"error_type", type}, {"feasible", false}}));
    std::cerr << "ascend " << kind << ": " << what << "\n";
    return 1;
}

/* A computation on well-formed input that throws reports infeasibility
 * (exit 1) with a structured document; it never takes the process down. */
template <typename Fn>
int compute_stage(const std::string& kind, Fn&& fn) {
    try {
        return fn();
    } catch (const precision_error& e) {
        return emit_infeasible(kind, "precision", e.what());
    } catch (const extension_needed& e) {
        return emit_infeasible(kind, "extension", e.what());
    } catch (const std::invalid_argument& e) {
        return emit_infeasible(kind, "domain", e.what());
    } catch (const std::domain_error& e) {
        return emit_infeasible(kind, "domain", e.what());
    } catch (const std::exception& e) {
        return emit_infeasible(kind, "internal", e.what());
    }
}

std::vector<unsigned> parse_unsigned_list(const std::string& csv, const char* what) {
    std::vector<unsigned> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw usage_error(std::string(what) + ": '" + tok + "' is not a non-negative integer");
        out.push_back(static_cast<unsigned>(std::stoul(tok)));
    }
    if (out.empty()) throw usage_error(std::string(what) + ": empty list");
    return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw usage_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

/* Input files may be bare payloads or stamped documents; a stamped
 * document must carry the supported schema version and matching kind. */
Json load_payload(const std::string& path, const std::string& kind) {
    Json j = load_json_file(path);
    if (j.is_object() && (j.contains("schema") || j.contains("kind")))
        return open_document(j, kind);
    return j;
}

ConductorType type_from_flags(unsigned p, const std::string& conductors) {
    if (p == 0) throw usage_error("--p is required");
    try {
        return make_type(p, parse_unsigned_list(conductors, "--conductors"));
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("--conductors: ") + e.what());
    }
}

fs::path make_run_dir(const std::string& base, const std::string& tag) {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    fs::path want = fs::path(base) / (std::string(buf) + "-" + tag);
    fs::path dir = want;
    for (int k = 1; fs::exists(dir); ++k) dir = want.string() + "-" + std::to_string(k);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

/* ---- residue-value literals for --alpha/--beta ----
 * Accepted forms: a base-p digit string, constant term first ("0", "1",
 * "01", ...), or "w"/"w<k>" for the k-th power of the field generator. */

unsigned literal_min_degree(const std::string& tok) {
    if (!tok.empty() && tok[0] == 'w') return 2;
    return std::max<size_t>(tok.size(), 1);
}

FFElem residue_literal(const FiniteField& k, const std::string& tok, const char* what) {
    if (!tok.empty() && tok[0] == 'w') {
        std::string rest = tok.substr(1);
        unsigned long pw = 1;
        if (!rest.empty()) {
            if (rest.find_first_not_of("0123456789") != std::string::npos)
                throw usage_error(std::string(what) + ": bad residue literal '" + tok + "'");
            pw = std::stoul(rest);
        }
        return k.pow(k.gen(), pw);
    }
    try {
        return ff_from_json(Json(tok), k);
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string(what) + ": " + e.what());
    }
}

/* ---- subcommand bodies ---- */

int cmd_jumps(unsigned p, const std::string& conductors) {
    ConductorType t = type_from_flags(p, conductors);
    return compute_stage("jumps", [&] {
        Json payload = jumps_to_json(lower_jumps(t));
        payload.update(different_to_json(generic_different(t)));
        payload["conductors"] = t.conductors;
        emit(make_document("jumps", payload));
        return 0;
    });
}

int cmd_different(unsigned p, const std::string& conductors) {
    ConductorType t = type_from_flags(p, conductors);
    return compute_stage("different", [&] {
        DifferentReport r = generic_different(t);
        Json payload = different_to_json(r);
        payload["conductors"] = t.conductors;
        payload["p"] = t.p;
        emit(make_document("different", payload));
        std::cerr << "ascend different: d_s = " << r.d_s << ", d_eta = " << r.d_eta
                  << (r.criterion_met ? "; criterion met" : "; criterion NOT met") << "\n";
        return r.criterion_met ? 0 : 1;
    });
}

int cmd_criterion(unsigned p, const std::string& conductors, const std::string& loci_path) {
    ConductorType t = type_from_flags(p, conductors);
    std::vector<std::vector<std::string>> loci;
    bool have_loci = false;
    if (!loci_path.empty()) {
        Json lj = load_payload(loci_path, "loci");
        const Json* arr = lj.is_object() && lj.contains("loci") ? &lj["loci"] : &lj;
        if (!arr->is_array()) throw usage_error("--loci: expected an array of label lists");
        for (const Json& locus : *arr) {
            std::vector<std::string> labels;
            for (const Json& l : locus) {
                if (!l.is_string()) throw usage_error("--loci: labels must be strings");
                labels.push_back(l.get<std::string>());
            }
            loci.push_back(std::move(labels));
        }
        have_loci = true;
    }
    return compute_stage("criterion", [&] {
        CongruenceReport cong = check_congruences(t);
        IntersectionSpec inter = required_intersections(t);
        InertiaResult inertia = solve_inertia_counts(t);
        bool satisfied = cong.ok && inter.feasible && inertia.feasible;
        Json payload{{"congruences", congruence_to_json(cong)},
                     {"inertia_counts", inertia_to_json(inertia)},
                     {"intersections", intersections_to_json(inter)}};
        if (have_loci) {
            LociReport lr = verify_branch_loci(inter, loci);
            satisfied = satisfied && lr.all_pass;
            payload["loci_report"] = loci_report_to_json(lr);
        }
        payload["satisfied"] = satisfied;
        emit(make_document("criterion", payload));
        std::cerr << "ascend criterion: " << (satisfied ? "satisfied" : "not satisfied") << "\n";
        return satisfied ? 0 : 1;
    });
}

int cmd_strata(unsigned p, long long d) {
    if (p == 0) throw usage_error("--p is required");
    if (d < 1) throw usage_error("--d must be positive");
    return compute_stage("strata", [&] {
        std::vector<Stratum> list = enumerate_strata(p, static_cast<unsigned>(d));
        Json arr = Json::array();
        for (const Stratum& s : list) arr.push_back(stratum_to_json(s));
        emit(make_document("strata", Json{{"d", d}, {"p", p}, {"strata", std::move(arr)}}));
        return 0;
    });
}

int cmd_stratum(const std::string& cover_path) {
    ASFunction f = [&] {
        try {
            return cover_from_json(load_payload(cover_path, "cover"));
        } catch (const std::invalid_argument& e) {
            throw usage_error(std::string("--cover: ") + e.what());
        }
    }();
    return compute_stage("stratum", [&] {
        CoverInvariants inv = cover_invariants(f);
        CoverStratum cs = stratum_of_cover(inv);
        Json payload = cover_stratum_to_json(cs);
        payload["invariants"] = invariants_to_json(inv);
        emit(make_document("stratum", payload));
        return 0;
    });
}

int cmd_trees(unsigned p, const std::string& conductors, const std::string& tree_path,
              bool top_level_only) {
    if (conductors.empty() == tree_path.empty())
        throw usage_error("give either --conductors (admissibility search) or --loci (tree check)");
    if (!tree_path.empty()) {
        UltrametricTree t = [&] {
            try {
                return tree_from_json(load_payload(tree_path, "tree"));
            } catch (const std::invalid_argument& e) {
                throw usage_error(std::string("--loci: ") + e.what());
            }
        }();
        return compute_stage("trees", [&] {
            bool ok = z2_admissible_tree(t, top_level_only);
            emit(make_document("trees", Json{{"admissible", ok},
                                             {"partition", branch_partition(t)},
                                             {"top_level_only", top_level_only}}));
            std::cerr << "ascend trees: " << (ok ? "admissible" : "not admissible") << "\n";
            return ok ? 0 : 1;
        });
    }
    if (top_level_only)
        throw usage_error("--top-level-only applies to the --loci tree check");
    ConductorType t = type_from_flags(p, conductors);
    return compute_stage("trees", [&] {
        SearchOutcome s = search_admissible(t);
        Json payload = search_to_json(s);
        payload["conductors"] = t.conductors;
        payload["p"] = t.p;
        emit(make_document("trees", payload));
        return 0;
    });
}

int cmd_lift(unsigned p, unsigned r, const std::string& alpha_csv, const std::string& beta_csv,
             const std::string& type_csv, long prec, const std::string& out_base) {
    if (p == 0) throw usage_error("--p is required");
    if (r == 0) throw usage_error("--r is required");
    std::vector<std::string> atoks = split_csv(alpha_csv);
    std::vector<std::string> btoks = split_csv(beta_csv);
    if (atoks.empty() || atoks.size() > 2) throw usage_error("--alpha takes one or two values");
    if (btoks.empty() || btoks.size() > 2) throw usage_error("--beta takes one or two values");
    if (!type_csv.empty()) {
        std::vector<std::string> ttoks = split_csv(type_csv);
        bool ok = ttoks.size() == 3 && ttoks[0] == "4" && ttoks[1] == "4" &&
                  (ttoks[2] == "2r" || ttoks[2] == std::to_string(2 * r));
        if (!ok)
            throw usage_error("--type must be 4,4,2r (or 4,4," + std::to_string(2 * r) +
                              " for --r " + std::to_string(r) + ")");
    }
    unsigned m = 1;
    for (const std::string& tok : atoks) m = std::max(m, literal_min_degree(tok));
    for (const std::string& tok : btoks) m = std::max(m, literal_min_degree(tok));
    if (p != 2) return emit_infeasible("lift", "domain", "lift construction requires p = 2");
    const FiniteField& k = FiniteField::get(p, m);
    FFElem a1 = residue_literal(k, atoks[0], "--alpha");
    FFElem a2 = atoks.size() == 2 ? residue_literal(k, atoks[1], "--alpha") : k.mul(a1, a1);
    FFElem b1 = residue_literal(k, btoks[0], "--beta");
    FFElem b2 = btoks.size() == 2 ? residue_literal(k, btoks[1], "--beta") : b1;
    return compute_stage("lift", [&] {
        std::vector<FFElem> extra;
        if (r > 3) {
            // deterministic extra centers: smallest-index nonzero elements
            // distinct from sqrt(alpha_1), sqrt(alpha_2)
            if (k.is_zero(a1) || k.is_zero(a2))
                throw std::invalid_argument("alpha values must be nonzero");
            FFElem s1 = *k.sqrt(a1), s2 = *k.sqrt(a2);
            for (unsigned long i = 1; i < k.q() && extra.size() < r - 3; ++i) {
                FFElem x = k.from_index(i);
                if (x == s1 || x == s2) continue;
                extra.push_back(x);
            }
            if (extra.size() < r - 3)
                throw std::invalid_argument(
                    "residue field F_" + std::to_string(k.q()) + " is too small for r = " +
                    std::to_string(r) + "; give field elements with longer digit strings");
        }
        AssembledLift a = assemble_442r_lift(k, a1, a2, b1, b2, r, extra, prec);
        Json doc = make_document("lift", assembled_to_json(a));
        emit(doc);
        fs::path dir = make_run_dir(out_base, "lift");
        write_file(dir / "lift.json", doc.dump(2) + "\n");
        std::ostringstream ts;
        ts << "lift (4,4," << 2 * r << ") over F_" << k.q() << "\n"
           << "distinct branch points: " << a.distinct_points << "\n"
           << "tree partition:";
        for (unsigned part : a.partition) ts << " " << part;
        ts << "\nintersection checks: " << (a.loci_report.all_pass ? "pass" : "FAIL") << "\n"
           << "d_s = " << a.d_s << ", d_eta = " << a.d_eta << ", |B| = " << a.branch_count << "\n"
           << "equidistant: " << (a.equidistant ? "yes" : "no") << "\n\n"
           << "point-search transcript:\n"
           << a.c3.transcript;
        write_file(dir / "transcript.txt", ts.str());
        std::cerr << "ascend lift: certified " << a.distinct_points
                  << " branch points; transcript in " << dir.string() << "\n";
        return 0;
    });
}

int cmd_reduce(const std::string& poly_path, long prec, const std::string& out_base) {
    Json pj = load_payload(poly_path, "poly");
    if (prec > 0) {
        if (!pj.is_object() || !pj.contains("tower"))
            throw usage_error("--poly: polynomial document lacks a tower record");
        pj["tower"]["prec"] = prec;
    }
    VPoly f = [&] {
        try {
            return vpoly_from_json(pj);
        } catch (const std::invalid_argument& e) {
            throw usage_error(std::string("--poly: ") + e.what());
        }
    }();
    return compute_stage("reduce", [&] {
        ReductionReport rep = check_good_reduction(*f.tower, f);
        Json doc = make_document("reduce", reduction_to_json(rep));
        emit(doc);
        fs::path dir = make_run_dir(out_base, "reduce");
        write_file(dir / "input.json", make_document("poly", vpoly_to_json(f)).dump(2) + "\n");
        write_file(dir / "report.json", doc.dump(2) + "\n");
        std::cerr << "ascend reduce: verdict "
                  << (rep.verdict == ReductionReport::Verdict::good         ? "good"
                      : rep.verdict == ReductionReport::Verdict::bad_model ? "bad_model"
                                                                           : "inconclusive")
                  << "; report in " << dir.string() << "\n";
        return rep.verdict == ReductionReport::Verdict::bad_model ? 1 : 0;
    });
}

int cmd_grid(const std::string& p_csv, unsigned max_conductor, unsigned max_n) {
    std::vector<unsigned> ps = parse_unsigned_list(p_csv, "--p");
    if (max_conductor < 2) throw usage_error("--conductors (maximum value) must be at least 2");
    if (max_n == 0) throw usage_error("--r (maximum tuple length) must be positive");
    std::vector<ConductorType> types;
    for (unsigned p : ps) {
        if (p < 2) throw usage_error("--p entries must be primes >= 2");
        std::vector<unsigned> stack;
        // ascending tuples of conductors c with c - 1 prime to p
        auto rec = [&](auto&& self, unsigned lo) -> void {
            if (!stack.empty()) types.push_back(make_type(p, stack));
            if (stack.size() == max_n) return;
            for (unsigned c = lo; c <= max_conductor; ++c) {
                if ((c - 1) % p == 0) continue;
                stack.push_back(c);
                self(self, c);
                stack.pop_back();
            }
        };
        rec(rec, 2);
    }
    std::vector<std::string> lines(types.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= types.size()) return;
            const ConductorType& t = types[i];
            JumpData jd = lower_jumps(t);
            DifferentReport dr = generic_different(t);
            Json payload{{"b_integral", dr.b_integral},
                         {"branch_count", dr.branch_count},
                         {"conductors", t.conductors},
                         {"congruences_ok", check_congruences(t).ok},
                         {"criterion_met", dr.criterion_met},
                         {"d_eta", dr.d_eta},
                         {"d_s", dr.d_s},
                         {"lower", jd.lower},
                         {"n", t.n},
                         {"p", t.p},
                         {"upper", jd.upper}};
            lines[i] = make_document("grid-line", payload).dump();
        }
    };
    unsigned nw = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    for (const std::string& line : lines) std::cout << line << "\n";
    std::cerr << "ascend grid: " << lines.size() << " conductor types\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);

    CLI::App app{"ascend: lifting invariants of elementary abelian p-covers\n"
                 "JSON on stdout, human logs on stderr; exit 0 = success,\n"
                 "1 = domain infeasibility (structured report), 2 = usage error."};
    app.require_subcommand(1);

    unsigned p = 0, r = 0, grid_maxc = 32, grid_maxn = 3;
    long long d = 0;
    long prec = 0;
    unsigned long long seed = 0;
    std::string conductors, alpha, beta = "0", type_csv, cover_path, loci_path, poly_path;
    std::string out_base = "out";
    bool top_level_only = false;

    auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", seed,
                        "Seed for randomized drivers (reserved; current commands are "
                        "deterministic)");
    };
    auto add_prec = [&](CLI::App* sub) {
        sub->add_option("--prec", prec,
                        "Working precision in pi-digit slots (env: ASCEND_PRECISION; "
                        "0 = library default)")
            ->envname("ASCEND_PRECISION");
    };

    CLI::App* jumps = app.add_subcommand("jumps", "Ramification jumps and different degrees");
    jumps->add_option("--p", p, "Residue characteristic")->required();
    jumps->add_option("--conductors", conductors, "Conductor list, e.g. 4,4,6")->required();
    add_seed(jumps);

    CLI::App* different = app.add_subcommand("different", "Different criterion d_s = d_eta");
    different->add_option("--p", p, "Residue characteristic")->required();
    different->add_option("--conductors", conductors, "Conductor list")->required();
    add_seed(different);

    CLI::App* criterion = app.add_subcommand("criterion", "Branch-cycle lifting criterion");
    criterion->add_option("--p", p, "Residue characteristic")->required();
    criterion->add_option("--conductors", conductors, "Conductor list")->required();
    criterion->add_option("--loci", loci_path, "Branch-loci JSON (label lists) to verify");
    add_seed(criterion);

    CLI::App* strata = app.add_subcommand("strata", "Moduli strata for invariant d");
    strata->add_option("--p", p, "Residue characteristic")->required();
    strata->add_option("--d", d, "Cover invariant d")->required();
    add_seed(strata);

    CLI::App* stratum = app.add_subcommand("stratum", "Stratum of a cover");
    stratum->add_option("--cover", cover_path, "Cover JSON file")->required();
    add_seed(stratum);

    CLI::App* trees = app.add_subcommand("trees", "Admissible tree geometries");
    trees->add_option("--p", p, "Residue characteristic");
    trees->add_option("--conductors", conductors, "Conductor list (admissibility search)");
    trees->add_option("--loci", loci_path, "Depth-annotated tree JSON to check");
    trees->add_flag("--top-level-only", top_level_only,
                    "Apply the degree-2 branch rule at the top level only");
    add_seed(trees);

    CLI::App* lift = app.add_subcommand("lift", "Construct and certify a (4,4,2r) lift");
    lift->add_option("--p", p, "Residue characteristic (must be 2)")->required();
    lift->add_option("--r", r, "Parameter r >= 3 (conductor type (4,4,2r))")->required();
    lift->add_option("--alpha", alpha,
                     "Residue alpha (one or two comma-separated values; digit strings or w, w2, ...)")
        ->required();
    lift->add_option("--beta", beta, "Residue beta (one or two values; default 0)");
    lift->add_option("--type", type_csv, "Conductor type, must equal 4,4,2r");
    lift->add_option("--out", out_base, "Transcript directory root (default: out)");
    add_prec(lift);
    add_seed(lift);

    CLI::App* reduce = app.add_subcommand("reduce", "Good-reduction check for Y^2 = F");
    reduce->add_option("--poly", poly_path, "Polynomial JSON file")->required();
    reduce->add_option("--out", out_base, "Transcript directory root (default: out)");
    add_prec(reduce);
    add_seed(reduce);

    std::string grid_p_csv;
    CLI::App* grid = app.add_subcommand("grid", "JSONL sweep over conductor types");
    grid->add_option("--p", grid_p_csv, "Characteristics to sweep, e.g. 2,3")->required();
    grid->add_option("--conductors", grid_maxc, "Largest conductor value (default 32)");
    grid->add_option("--r", grid_maxn, "Largest tuple length n (default 3)");
    add_seed(grid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cerr << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cerr << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "ascend: " << e.what() << "\n"
                  << "Run 'ascend --help' for usage.\n";
        return 2;
    }

    try {
        if (jumps->parsed()) return cmd_jumps(p, conductors);
        if (different->parsed()) return cmd_different(p, conductors);
        if (criterion->parsed()) return cmd_criterion(p, conductors, loci_path);
        if (strata->parsed()) return cmd_strata(p, d);
        if (stratum->parsed()) return cmd_stratum(cover_path);
        if (trees->parsed()) return cmd_trees(p, conductors, loci_path, top_level_only);
        if (lift->parsed()) return cmd_lift(p, r, alpha, beta, type_csv, prec, out_base);
        if (reduce->parsed()) return cmd_reduce(poly_path, prec, out_base);
        if (grid->parsed()) return cmd_grid(grid_p_csv, grid_maxc, grid_maxn);
    } catch (const usage_error& e) {
        std::cerr << "ascend: " << e.what() << "\n";
        return 2;
    } catch (const migration_error& e) {
        std::cerr << "ascend: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ascend: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ascend: unexpected failure: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "ascend: no subcommand\n";
    return 2;
}
