// pcwp: power circuits and the word problems built on them.
//
// Subcommand groups:
//   pc reduce|cmp        reduction to tree representation, marking compare
//   sdp eval|eq          the algebra Z[1/2] x| Z with swapping
//   wp baumslag|higman   word problem solvers
//   oracle ...           exact evaluation and generators
//   bench                CSV timing rows for the scaling families
//
// Exit codes: 0 trivial/equal/success, 1 nontrivial/unequal, 2 input error,
// 3 not a power circuit, 4 undefined swap.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "pc/baumslag.hpp"
#include "pc/higman.hpp"
#include "pc/io.hpp"
#include "pc/oracle.hpp"
#include "pc/reference.hpp"
#include "pc/treerep.hpp"
#include "pc/triple.hpp"
#include "pc/words.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_nontrivial = 1;
constexpr int exit_input = 2;
constexpr int exit_not_pc = 3;
constexpr int exit_undefined = 4;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "<word>" or "@file"
std::string word_text(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') return slurp(arg.substr(1));
    return arg;
}

pc::CircuitDoc load_circuit(const std::string& path) {
    return pc::circuit_from_json(nlohmann::json::parse(slurp(path)));
}

int cmd_pc_reduce(const std::string& path, const std::string& dot_path) {
    pc::CircuitDoc doc = load_circuit(path);
    std::size_t before = doc.circuit.node_count();
    std::vector<pc::MarkingId> ms;
    for (auto& [name, m] : doc.markings) ms.push_back(m);
    pc::MakeTreeResult r = pc::make_tree(doc.circuit, ms);
    if (r.outcome != pc::TreeRep::Outcome::Ok) {
        std::cerr << "not a power circuit\n";
        return exit_not_pc;
    }
    pc::ChainStats cs = r.tree->chain_stats();
    std::cout << pc::circuit_to_json(doc.circuit, doc.markings).dump(2) << "\n";
    nlohmann::ordered_json stats;
    stats["nodes_before"] = before;
    stats["nodes_after"] = doc.circuit.node_count();
    stats["chains"] = cs.chains;
    stats["potential"] = cs.potential;
    std::cerr << stats.dump() << "\n";
    if (!dot_path.empty()) {
        std::ofstream out(dot_path);
        out << pc::circuit_to_dot(doc.circuit, doc.markings);
    }
    return exit_ok;
}

int cmd_pc_cmp(const std::string& path, const std::string& ma, const std::string& mb) {
    pc::CircuitDoc doc = load_circuit(path);
    if (!doc.markings.count(ma) || !doc.markings.count(mb)) {
        std::cerr << "unknown marking name\n";
        return exit_input;
    }
    std::vector<pc::MarkingId> ms;
    for (auto& [name, m] : doc.markings) ms.push_back(m);
    pc::MakeTreeResult r = pc::make_tree(doc.circuit, ms);
    if (r.outcome != pc::TreeRep::Outcome::Ok) {
        std::cerr << "not a power circuit\n";
        return exit_not_pc;
    }
    pc::CompareResult cr = r.tree->compare(doc.markings[ma], doc.markings[mb]);
    const char* ord = cr.ord < 0 ? "LT" : cr.ord > 0 ? "GT" : "EQ";
    const char* gap = cr.gap == pc::Gap::DiffOne        ? "diff-one"
                      : cr.gap == pc::Gap::DiffAtLeastTwo ? "diff-at-least-two"
                                                          : "na";
    std::cout << ord << " " << gap << "\n";
    return exit_ok;
}

void print_pair(const pc::PowerCircuit& c, const pc::Triple& t) {
    pc::PairValue v = pc::pair_value(c, t.u, t.x, t.k);
    if (v.exact && v.r.is_integer() && v.r.bit_size() <= 63 && v.m.str().size() <= 19) {
        std::cout << "(" << v.r.str() << ", " << v.m.str() << ")\n";
        return;
    }
    std::map<std::string, pc::MarkingId> ms{{"k", t.k}, {"u", t.u}, {"x", t.x}};
    std::cout << pc::circuit_to_json(c, ms).dump(2) << "\n";
}

int cmd_sdp_eval(const std::string& path) {
    pc::SdpProgram prog = pc::parse_sdp_program(path == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : slurp(path));
    pc::SdpResult r = pc::wp_sdp(prog);
    if (r.status == pc::SdpStatus::Malformed) {
        std::cerr << "malformed program\n";
        return exit_input;
    }
    if (r.status == pc::SdpStatus::Undefined) {
        std::cout << "UNDEFINED\n";
        return exit_undefined;
    }
    print_pair(*r.circuit, r.t);
    return exit_ok;
}

int cmd_sdp_eq(const std::string& p1, const std::string& p2) {
    pc::SdpEq r = pc::sdp_equal(pc::parse_sdp_program(slurp(p1)), pc::parse_sdp_program(slurp(p2)));
    switch (r) {
    case pc::SdpEq::Equal: std::cout << "EQUAL\n"; return exit_ok;
    case pc::SdpEq::Unequal: std::cout << "UNEQUAL\n"; return exit_nontrivial;
    default: std::cout << "UNDEFINED\n"; return exit_undefined;
    }
}

int cmd_wp_baumslag(const std::string& arg, bool stats) {
    pc::Word w = pc::parse_word(word_text(arg), pc::baumslag_alphabet());
    pc::BsStats st;
    pc::Verdict v = pc::wp_baumslag(w, &st);
    std::cout << (v == pc::Verdict::Trivial ? "TRIVIAL" : "NONTRIVIAL") << "\n";
    if (stats) {
        nlohmann::ordered_json j;
        j["letters"] = st.letters;
        j["tests"] = st.tests;
        j["successful_tests"] = st.successful_tests;
        j["peak_nodes"] = st.peak_nodes;
        j["time_ms"] = st.time_ms;
        std::cout << j.dump() << "\n";
    }
    return v == pc::Verdict::Trivial ? exit_ok : exit_nontrivial;
}

int cmd_wp_higman(const std::string& arg, bool stats) {
    pc::Word w = pc::parse_word(word_text(arg), pc::higman_alphabet());
    pc::HigmanStats st;
    pc::Verdict v = pc::wp_higman(w, &st);
    std::cout << (v == pc::Verdict::Trivial ? "TRIVIAL" : "NONTRIVIAL") << "\n";
    if (stats) {
        nlohmann::ordered_json j;
        j["triples"] = st.triples;
        j["intervals_final"] = st.intervals_final;
        j["membership_tests"] = st.membership_tests;
        j["basic_ops"] = st.basic_ops;
        j["peak_nodes"] = st.peak_nodes;
        j["time_ms"] = st.time_ms;
        std::cout << j.dump() << "\n";
    }
    return v == pc::Verdict::Trivial ? exit_ok : exit_nontrivial;
}

int cmd_oracle_eval(const std::string& path, const std::string& name, std::uint64_t budget) {
    pc::CircuitDoc doc = load_circuit(path);
    if (!doc.markings.count(name)) {
        std::cerr << "unknown marking name\n";
        return exit_input;
    }
    pc::BigEval v = pc::eval_exact(doc.circuit, doc.markings[name], budget);
    switch (v.kind) {
    case pc::EvalKind::Exact: std::cout << v.value.str() << "\n"; return exit_ok;
    case pc::EvalKind::Overflow: std::cout << "OVERFLOW\n"; return exit_ok;
    default: std::cout << "IRRATIONAL\n"; return exit_ok;
    }
}

int cmd_bench(const std::string& family, const std::vector<std::size_t>& sizes,
              std::uint64_t seed) {
    std::cout << "family,size,time_ms,peak_nodes,ops\n";
    for (std::size_t n : sizes) {
        if (family == "baumslag-tower-commutator") {
            pc::Word t = pc::baumslag_tower_word(static_cast<int>(n));
            pc::Word w = pc::concat({pc::Word{{1, 1}}, t, pc::Word{{1, -1}}, pc::inverse_word(t)});
            pc::BsStats st;
            if (pc::wp_baumslag(w, &st) != pc::Verdict::Trivial) return exit_input;
            std::cout << family << "," << n << "," << st.time_ms << "," << st.peak_nodes << ","
                      << st.tests << "\n";
        } else if (family == "higman-tower-identity") {
            pc::Word w = pc::higman_tower_word(0, static_cast<int>(n));
            pc::Word id = pc::concat({pc::Word{{1, 1}}, w, pc::Word{{1, -1}}, pc::inverse_word(w),
                                      pc::inverse_word(w)});
            pc::HigmanStats st;
            if (pc::wp_higman(id, &st) != pc::Verdict::Trivial) return exit_input;
            std::cout << family << "," << n << "," << st.time_ms << "," << st.peak_nodes << ","
                      << st.basic_ops << "\n";
        } else if (family == "maketree-random") {
            pc::PowerCircuit c = pc::gen_random_circuit(seed + n, n, 0.3, 3);
            auto t0 = std::chrono::steady_clock::now();
            pc::MakeTreeResult r = pc::make_tree(c, {}, false);
            double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
            std::cout << family << "," << n << "," << ms << "," << c.node_count() << ","
                      << n << "\n";
            (void)r;
        } else {
            std::cerr << "unknown family\n";
            return exit_input;
        }
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"power circuits and word problems"};
    app.require_subcommand(1);

    // pc
    auto* grp_pc = app.add_subcommand("pc", "power circuit operations");
    grp_pc->require_subcommand(1);
    std::string reduce_path, dot_path;
    auto* c_reduce = grp_pc->add_subcommand("reduce", "reduce a circuit to tree representation");
    c_reduce->add_option("circuit", reduce_path, "circuit json")->required();
    c_reduce->add_option("--dot", dot_path, "write a DOT rendering of the result");
    std::string cmp_path, cmp_a, cmp_b;
    auto* c_cmp = grp_pc->add_subcommand("cmp", "compare two markings");
    c_cmp->add_option("circuit", cmp_path)->required();
    c_cmp->add_option("M", cmp_a)->required();
    c_cmp->add_option("K", cmp_b)->required();

    // sdp
    auto* grp_sdp = app.add_subcommand("sdp", "the algebra Z[1/2] x| Z with swapping");
    grp_sdp->require_subcommand(1);
    std::string sdp_path, sdp_p1, sdp_p2;
    auto* c_eval = grp_sdp->add_subcommand("eval", "evaluate a postfix program");
    c_eval->add_option("program", sdp_path, "program file or - for stdin")->required();
    auto* c_eq = grp_sdp->add_subcommand("eq", "decide equality of two programs");
    c_eq->add_option("p1", sdp_p1)->required();
    c_eq->add_option("p2", sdp_p2)->required();

    // wp
    auto* grp_wp = app.add_subcommand("wp", "word problem solvers");
    grp_wp->require_subcommand(1);
    std::string bs_word, hg_word;
    bool bs_stats = false, hg_stats = false;
    auto* c_bs = grp_wp->add_subcommand("baumslag", "word problem of the Baumslag group G(1,2)");
    c_bs->add_option("word", bs_word, "word over a,t,b (uppercase = inverse) or @file")->required();
    c_bs->add_flag("--stats", bs_stats);
    auto* c_hg = grp_wp->add_subcommand("higman", "word problem of Higman's group H4");
    c_hg->add_option("word", hg_word, "word over a1..a4 (uppercase = inverse) or @file")->required();
    c_hg->add_flag("--stats", hg_stats);

    // oracle
    auto* grp_or = app.add_subcommand("oracle", "exact evaluation and generators");
    grp_or->require_subcommand(1);
    std::string oe_path, oe_marking;
    std::uint64_t bit_budget = pc::default_bit_budget;
    auto* c_oeval = grp_or->add_subcommand("eval", "exact big-integer evaluation of a marking");
    c_oeval->add_option("circuit", oe_path)->required();
    c_oeval->add_option("marking", oe_marking)->required();
    c_oeval->add_option("--bit-budget", bit_budget, "bit budget for intermediate values");
    std::string gt_group;
    std::uint64_t gt_seed = 1;
    std::size_t gt_len = 50;
    auto* c_gt = grp_or->add_subcommand("gen-trivial", "trivial-by-construction word");
    c_gt->add_option("group", gt_group, "baumslag or higman")->required();
    c_gt->add_option("seed", gt_seed)->required();
    c_gt->add_option("len", gt_len)->required();
    std::uint64_t gr_seed = 1;
    std::size_t gr_nodes = 8, gr_markings = 3;
    double gr_density = 0.3;
    auto* c_gr = grp_or->add_subcommand("gen-random", "random circuit in the json format");
    c_gr->add_option("seed", gr_seed)->required();
    c_gr->add_option("nodes", gr_nodes)->required();
    c_gr->add_option("density", gr_density)->required();
    c_gr->add_option("--markings", gr_markings);
    std::string ref_group, ref_word;
    std::uint64_t exp_cap = pc::default_exp_cap;
    auto* c_ref = grp_or->add_subcommand("ref", "bignum reference solver");
    c_ref->add_option("group", ref_group, "baumslag or higman")->required();
    c_ref->add_option("word", ref_word)->required();
    c_ref->add_option("--exp-cap", exp_cap, "bit cap on reference exponents");

    // bench
    std::string bench_family;
    std::vector<std::size_t> bench_sizes;
    std::uint64_t bench_seed = 1;
    auto* c_bench = app.add_subcommand("bench", "timing rows as CSV");
    c_bench->add_option("family", bench_family,
                        "baumslag-tower-commutator | higman-tower-identity | maketree-random")
        ->required();
    c_bench->add_option("--sizes", bench_sizes)->delimiter(',');
    c_bench->add_option("--seed", bench_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_reduce->parsed()) return cmd_pc_reduce(reduce_path, dot_path);
        if (c_cmp->parsed()) return cmd_pc_cmp(cmp_path, cmp_a, cmp_b);
        if (c_eval->parsed()) return cmd_sdp_eval(sdp_path);
        if (c_eq->parsed()) return cmd_sdp_eq(sdp_p1, sdp_p2);
        if (c_bs->parsed()) return cmd_wp_baumslag(bs_word, bs_stats);
        if (c_hg->parsed()) return cmd_wp_higman(hg_word, hg_stats);
        if (c_oeval->parsed()) return cmd_oracle_eval(oe_path, oe_marking, bit_budget);
        if (c_gt->parsed()) {
            pc::GroupName g = gt_group == "baumslag" ? pc::GroupName::Baumslag
                              : gt_group == "higman" ? pc::GroupName::Higman
                                                     : throw std::runtime_error("unknown group");
            pc::Word w = pc::gen_trivial_word(g, gt_seed, gt_len);
            std::cout << pc::render_word(w, g == pc::GroupName::Baumslag ? pc::baumslag_alphabet()
                                                                         : pc::higman_alphabet())
                      << "\n";
            return exit_ok;
        }
        if (c_gr->parsed()) {
            pc::PowerCircuit c = pc::gen_random_circuit(gr_seed, gr_nodes, gr_density, gr_markings);
            std::map<std::string, pc::MarkingId> ms;
            for (std::uint32_t i = 0; i < gr_markings; ++i)
                ms["m" + std::to_string(i)] = pc::MarkingId{i};
            std::cout << pc::circuit_to_json(c, ms).dump(2) << "\n";
            return exit_ok;
        }
        if (c_ref->parsed()) {
            pc::RefOutcome r;
            if (ref_group == "baumslag")
                r = pc::wp_baumslag_reference(
                    pc::parse_word(word_text(ref_word), pc::baumslag_alphabet()), exp_cap);
            else if (ref_group == "higman")
                r = pc::wp_higman_reference(
                    pc::parse_word(word_text(ref_word), pc::higman_alphabet()), exp_cap);
            else
                throw std::runtime_error("unknown group");
            std::cout << (r == pc::RefOutcome::Trivial      ? "TRIVIAL"
                          : r == pc::RefOutcome::Nontrivial ? "NONTRIVIAL"
                                                            : "CAP-EXCEEDED")
                      << "\n";
            return r == pc::RefOutcome::Trivial ? exit_ok : exit_nontrivial;
        }
        if (c_bench->parsed()) return cmd_bench(bench_family, bench_sizes, bench_seed);
    } catch (pc::SyntaxError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_input;
    } catch (pc::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
