#include "bifree/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <future>
#include <ostream>
#include <thread>

#include "bifree/amalgam.hpp"
#include "bifree/errors.hpp"
#include "bifree/json_io.hpp"
#include "bifree/products.hpp"
#include "bifree/random.hpp"

namespace bifree::cli {

namespace {

enum class Status { Pass, Fail, Inconclusive };

struct Options {
    int degree = -1;
    int seeds = -1;
    std::uint64_t seed = 1;
    int n = 2;
    std::string format = "json";
    bool zeros = false;
    bool timing = false;
    std::string kind;
    std::string group;
    std::string orientation = "y2y1";
    std::string chi;
    std::string which = "alpha";
    std::string cov;
    std::vector<std::string> files;
};

struct Outcome {
    Status status = Status::Pass;
    Json report;
};

std::string text(const Scalar& s) { return s.to_string(); }

Json word_json(const Alphabet& a, const std::optional<Word>& w) {
    if (!w) return nullptr;
    return a.format(*w);
}

Json verdict_json(const Alphabet& a, const Verdict& v) {
    Json j;
    j["verdict"] = v.pass ? "PASS" : "FAIL";
    if (!v.pass) {
        j["witness"] = word_json(a, v.witness);
        j["value"] = text(v.value);
        j["reason"] = v.reason;
    }
    return j;
}

void merge(Json& into, const Json& from) {
    for (const auto& [k, v] : from.items()) into[k] = v;
}

Rng case_rng(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

// Runs fn(0..count-1) on a few threads; results keep their index order.
template <class T>
std::vector<T> parallel_cases(std::size_t count, const std::function<T(std::size_t)>& fn) {
    std::vector<T> results(count);
    std::size_t workers = std::max(1U, std::min(8U, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        jobs.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next++; i < count; i = next++) results[i] = fn(i);
        }));
    }
    for (auto& j : jobs) j.get();
    return results;
}

int effective(int requested, int fallback) { return requested > 0 ? requested : fallback; }

Alphabet single_xy() { return Alphabet({{"x", Side::Unsided}, {"y", Side::Unsided}}); }

std::vector<int> parse_group(const std::string& spec, int size) {
    std::vector<int> out;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ParseError("bad --group entry '" + item + "'");
        }
    }
    if (static_cast<int>(out.size()) != size) {
        throw ParseError("--group needs one family index per symbol (" + std::to_string(size) + ")");
    }
    return out;
}

Status combine(const std::vector<Json>& cases) {
    Status s = Status::Pass;
    for (const auto& c : cases) {
        std::string v = c.at("verdict").get<std::string>();
        if (v == "FAIL") return Status::Fail;
        if (v == "INCONCLUSIVE") s = Status::Inconclusive;
    }
    return s;
}

const char* status_name(Status s) {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Fail: return "FAIL";
        case Status::Inconclusive: return "INCONCLUSIVE";
    }
    return "FAIL";
}

Outcome suite_report(const std::string& suite, std::vector<Json> cases, Json extra = Json::object()) {
    Outcome o;
    o.status = combine(cases);
    o.report["suite"] = suite;
    o.report["verdict"] = status_name(o.status);
    merge(o.report, extra);
    o.report["cases"] = std::move(cases);
    return o;
}

// Transforms -------------------------------------------------------------------

int write_table(std::ostream& out, const Options& opt, const CumulantTable& table) {
    out << (opt.format == "csv" ? cumulant_csv(table, opt.zeros) : cumulant_json(table, opt.zeros));
    return kPass;
}

CumulantTable capped(const CumulantTable& table, int degree) {
    if (degree <= 0 || degree >= table.degree()) return table;
    CumulantTable source = table;
    return CumulantTable(table.kind(), WordTable(table.alphabet(), degree,
                                                 [source](const Word& w, const WordTable&) { return source(w); }));
}

MomentTable capped_moments(const MomentTable& mu, int degree) {
    if (degree >= mu.degree()) return mu;
    MomentTable source = mu;
    return MomentTable(WordTable(mu.alphabet(), degree, [source](const Word& w, const WordTable&) { return source(w); }),
                       mu.flags());
}

int cmd_cumulants(std::ostream& out, const Options& opt) {
    MomentTable mu = load_moment_file(opt.files.at(0));
    CumulantTable table = mu.cumulants(parse_cumulant_kind(opt.kind));
    return write_table(out, opt, capped(table, opt.degree));
}

int cmd_moments(std::ostream& out, const Options& opt) {
    CumulantTable table = capped(load_cumulant_file(opt.files.at(0)), opt.degree);
    MomentTable mu = moments_from_cumulants(table);
    out << (opt.format == "csv" ? moment_csv(mu, opt.zeros) : moment_json(mu, opt.zeros));
    return kPass;
}

// Checks -----------------------------------------------------------------------

int degree_for(const MomentTable& mu, const Options& opt) { return opt.degree > 0 ? opt.degree : mu.degree(); }

Outcome check_r_diagonal(const Options& opt) {
    MomentTable mu = load_moment_file(opt.files.at(0));
    int degree = degree_for(mu, opt);
    Verdict v = is_r_diagonal(mu, degree);
    Outcome o;
    o.status = v.pass ? Status::Pass : Status::Fail;
    o.report["check"] = "r-diagonal";
    o.report["degree"] = degree;
    merge(o.report, verdict_json(mu.alphabet(), v));
    if (v.pass) {
        DeterminingSequences seq = determining_sequences(mu, degree);
        Json nonzero = Json::object();
        for (const auto& [key, value] : seq.alpha)
            if (!value.is_zero()) nonzero["alpha " + key] = text(value);
        for (const auto& [key, value] : seq.beta)
            if (!value.is_zero()) nonzero["beta " + key] = text(value);
        o.report["determining_sequences"] = std::move(nonzero);
    }
    return o;
}

Outcome check_eta_diagonal(const Options& opt) {
    MomentTable mu = load_moment_file(opt.files.at(0));
    int degree = degree_for(mu, opt);
    Verdict v = is_eta_diagonal(mu, degree);
    Verdict m = eta_moment_characterization(mu, degree);
    Outcome o;
    o.status = v.pass ? Status::Pass : Status::Fail;
    o.report["check"] = "eta-diagonal";
    o.report["degree"] = degree;
    merge(o.report, verdict_json(mu.alphabet(), v));
    o.report["moment_characterization"] = verdict_json(mu.alphabet(), m);
    return o;
}

Outcome check_condition(const Options& opt) {
    MomentTable mu = load_moment_file(opt.files.at(0));
    int degree = degree_for(mu, opt);
    ChainVerdict c = condition_3_6(mu, degree);
    Outcome o;
    o.status = c.pass ? Status::Pass : Status::Fail;
    o.report["check"] = "condition-3-6";
    o.report["degree"] = degree;
    o.report["verdict"] = c.pass ? "PASS" : "FAIL";
    o.report["chains_checked"] = c.chains_checked;
    if (!c.pass) {
        o.report["witness"] = word_json(mu.alphabet(), c.witness);
        o.report["factor_starts"] = c.cuts;
        o.report["value"] = text(c.value);
    }
    return o;
}

Outcome check_independence(const Options& opt, bool boolean) {
    MomentTable mu = load_moment_file(opt.files.at(0));
    int degree = degree_for(mu, opt);
    Grouping g = parse_group(opt.group, mu.alphabet().size());
    IndependenceVerdict v =
        boolean ? test_biboolean_independence(mu, g, degree) : test_bifree_independence(mu, g, degree);
    Outcome o;
    o.status = v.pass ? Status::Pass : Status::Fail;
    o.report["check"] = boolean ? "biboolean-indep" : "bifree-indep";
    o.report["degree"] = degree;
    o.report["verdict"] = v.pass ? "PASS" : "FAIL";
    o.report["words_checked"] = v.words_checked;
    if (!v.pass) {
        o.report["witness"] = word_json(mu.alphabet(), v.witness);
        o.report["value"] = text(v.value);
    }
    return o;
}

// Product formulas ---------------------------------------------------------------

Outcome cmd_product(const Options& opt) {
    if (opt.files.size() != 2) throw ParseError("product needs two determining-sequence files");
    DeterminingSequences a = load_determining_file(opt.files[0]);
    DeterminingSequences b = load_determining_file(opt.files[1]);
    Orientation o = parse_orientation(opt.orientation);
    ChiMap chi = ChiMap::parse(opt.chi);
    if (opt.which != "alpha" && opt.which != "beta") throw ParseError("--which must be alpha or beta");
    bool beta = opt.which == "beta";
    Outcome out;
    FormulaValue f;
    if (o == Orientation::Reversed) {
        f.value = theorem_2_5(a, b, chi, beta);
        f.resolution = "as printed";
    } else {
        f = corollary_2_6(a, b, chi, beta);
    }
    out.report["orientation"] = to_string(o);
    out.report["chi"] = chi.to_string();
    out.report["which"] = opt.which;
    out.report["formula"] = text(f.value);
    out.report["resolution"] = f.resolution;
    const int length = 2 * chi.size();
    if (length <= a.degree && length <= b.degree) {
        MomentTable joint = product_joint_table(a, b, length);
        Scalar oracle = product_cumulant_oracle(joint, {o, chi, beta});
        out.report["oracle"] = text(oracle);
        out.report["verdict"] = oracle == f.value ? "PASS" : "FAIL";
        out.status = oracle == f.value ? Status::Pass : Status::Fail;
    } else {
        out.report["oracle"] = nullptr;
        out.report["verdict"] = "PASS";
    }
    return out;
}

// Verification suites ---------------------------------------------------------------

Json bicircular_case(const std::string& name, const MomentTable& mu, int degree,
                     const std::optional<BiCircularSpec>& spec) {
    Json c;
    c["case"] = name;
    Verdict v = is_r_diagonal(mu, degree);
    c["r_diagonal"] = v.pass;
    bool closed = v.pass;
    std::string problem;
    if (v.pass) {
        DeterminingSequences seq = determining_sequences(mu, degree);
        for (const auto& [key, value] : seq.alpha) {
            Scalar beta = seq.beta.at(key);
            if (key.size() > 2) {
                if (!value.is_zero() || !beta.is_zero()) problem = "nonzero entry of length " + std::to_string(key.size());
                continue;
            }
            if (value != beta) problem = "alpha and beta differ at " + key;
            if (spec) {
                int i = key[0] == 'L' ? 0 : 1;
                int j = key[1] == 'L' ? 0 : 1;
                if (value != spec->covariance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
                    problem = "entry " + key + " differs from the covariance";
                }
            }
            if (problem.empty() && key == "RL" && value != seq.alpha.at("LR").conj()) problem = "covariance is not Hermitian";
        }
        closed = problem.empty();
    } else {
        c["witness"] = word_json(mu.alphabet(), v.witness);
        c["value"] = text(v.value);
    }
    c["closed_form"] = closed;
    if (!problem.empty()) c["problem"] = problem;
    c["verdict"] = v.pass && closed ? "PASS" : "FAIL";
    return c;
}

Outcome verify_thm24(const Options& opt) {
    const int degree = effective(opt.degree, 8);
    std::vector<Json> cases;
    for (const auto& f : opt.files) {
        MomentTable mu = load_moment_file(f);
        cases.push_back(bicircular_case(f, mu, std::min(degree, mu.degree()), std::nullopt));
    }
    int seeds = effective(opt.seeds, opt.files.empty() ? 10 : 0);
    auto random_cases = parallel_cases<Json>(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        Rng rng = case_rng(opt.seed, i);
        BiCircularSpec spec = random_bicircular_spec(rng);
        Json c = bicircular_case("seed " + std::to_string(i), bi_circular(spec, degree), degree, spec);
        c["covariance"] = {text(spec.covariance[0][0]), text(spec.covariance[0][1]), text(spec.covariance[1][1])};
        return c;
    });
    cases.insert(cases.end(), random_cases.begin(), random_cases.end());
    return suite_report("thm2.4", std::move(cases), {{"degree", degree}});
}

std::vector<ChiMap> chis_up_to(int max_length) {
    std::vector<ChiMap> out;
    for (int n = 2; n <= max_length; n += 2) {
        for (std::uint32_t m = 0; m < (1U << n); ++m) {
            std::string key;
            for (int i = 0; i < n; ++i) key += (m >> (n - 1 - i) & 1U) ? 'R' : 'L';
            out.push_back(ChiMap::parse(key));
        }
    }
    return out;
}

Json product_case(const std::string& name, const DeterminingSequences& a, const DeterminingSequences& b, int n,
                  Orientation o) {
    MomentTable joint = product_joint_table(a, b, 4 * n);
    std::size_t compared = 0;
    Json mismatches = Json::array();
    bool mixed_zero = true;
    for (const ChiMap& chi : chis_up_to(2 * n)) {
        for (bool beta : {false, true}) {
            Scalar oracle = product_cumulant_oracle(joint, {o, chi, beta});
            Scalar formula = o == Orientation::Reversed ? theorem_2_5(a, b, chi, beta) : corollary_2_6(a, b, chi, beta).value;
            ++compared;
            if (o == Orientation::Ordered && !chi.is_constant() && !(formula.is_zero() && oracle.is_zero())) {
                mixed_zero = false;
            }
            if (formula != oracle && mismatches.size() < 5) {
                mismatches.push_back({{"chi", chi.to_string()},
                                      {"which", beta ? "beta" : "alpha"},
                                      {"formula", text(formula)},
                                      {"oracle", text(oracle)}});
            }
        }
    }
    Json c;
    c["case"] = name;
    c["comparisons"] = compared;
    if (o == Orientation::Ordered) c["mixed_chi_zero"] = mixed_zero;
    c["mismatches"] = std::move(mismatches);
    c["verdict"] = c["mismatches"].empty() && mixed_zero ? "PASS" : "FAIL";
    return c;
}

Outcome verify_products(const Options& opt, Orientation o) {
    const int n = opt.n;
    if (n < 1 || n > 2) throw PreconditionError("--n must be 1 or 2 for oracle comparisons");
    std::vector<Json> cases;
    if (!opt.files.empty()) {
        if (opt.files.size() != 2) throw ParseError("pass two determining-sequence files or none");
        cases.push_back(product_case(opt.files[0] + " x " + opt.files[1], load_determining_file(opt.files[0]),
                                     load_determining_file(opt.files[1]), n, o));
    }
    int seeds = effective(opt.seeds, opt.files.empty() ? 100 : 0);
    auto random_cases = parallel_cases<Json>(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        Rng rng = case_rng(opt.seed, i);
        DeterminingSequences a = random_determining_sequences(4 * n, rng);
        DeterminingSequences b = random_determining_sequences(4 * n, rng);
        return product_case("seed " + std::to_string(i), a, b, n, o);
    });
    cases.insert(cases.end(), random_cases.begin(), random_cases.end());
    Json extra{{"orientation", to_string(o)}, {"n", n}};
    if (o == Orientation::Ordered) {
        Rng rng = case_rng(opt.seed, 0);
        DeterminingSequences a = random_determining_sequences(4, rng);
        extra["resolution_all_left"] = corollary_2_6(a, a, ChiMap::parse("LL"), true).resolution;
        extra["resolution_all_right"] = corollary_2_6(a, a, ChiMap::parse("RR"), true).resolution;
    }
    return suite_report(o == Orientation::Reversed ? "thm2.5" : "cor2.6", std::move(cases), extra);
}

Outcome verify_thm27(const Options&) {
    Theorem27Report r = theorem_2_7_witness();
    const Alphabet& sq = r.squares.alphabet();
    bool witness_ok = !r.independence.pass && r.independence.witness && sq.format(*r.independence.witness) == "a d";
    Json c;
    c["case"] = "counterexample";
    c["r_diagonal"] = r.r_diagonal;
    c["kappa_lr_xxs_ysy"] = text(r.mixed_square_cumulant);
    c["kappa_y_xs"] = text(r.reversed_pair_cumulant);
    c["independence"] = r.independence.pass ? "PASS" : "FAIL";
    c["witness"] = word_json(sq, r.independence.witness);
    c["witness_meaning"] = "a = x x*, d = y* y";
    bool ok = r.r_diagonal && r.mixed_square_cumulant == Scalar(1) && r.reversed_pair_cumulant == Scalar(1) && witness_ok;
    c["verdict"] = ok ? "PASS" : "FAIL";
    return suite_report("thm2.7", {c});
}

Json thm33_case(const std::string& name, const MomentTable& mu, int degree) {
    Json c;
    c["case"] = name;
    bool chains = condition_3_6(mu, degree).pass;
    MomentTable pair = lr_pair(mu, degree);
    bool r = is_r_diagonal(pair, degree).pass;
    bool h = haar_invariance_check(mu, degree).pass;
    c["condition_3_6"] = chains;
    c["r_diagonal"] = r;
    c["haar_invariant"] = h;
    bool ok = chains == r && r == h;
    if (r) {
        bool same = false;
        DeterminingSequences direct = determining_sequences(pair, degree);
        DeterminingSequences recursed = alpha_recursion(product_cumulants(mu, degree), degree);
        same = direct.alpha == recursed.alpha && direct.beta == recursed.beta;
        c["alpha_recursion_matches"] = same;
        ok = ok && same;
    }
    c["verdict"] = ok ? "PASS" : "FAIL";
    return c;
}

Outcome verify_thm33(const Options& opt) {
    const int degree = effective(opt.degree, 6);
    std::vector<Json> cases;
    for (const auto& f : opt.files) {
        MomentTable mu = load_moment_file(f);
        cases.push_back(thm33_case(f, mu, std::min(degree, mu.degree())));
    }
    int seeds = effective(opt.seeds, opt.files.empty() ? 30 : 0);
    const std::size_t constructed = static_cast<std::size_t>(seeds) / 3;
    auto random_cases = parallel_cases<Json>(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        Rng rng = case_rng(opt.seed, i);
        MomentFlags tracial{true, false, false};
        MomentTable base = random_moment_table(single_xy(), degree, tracial, rng, i % 2 == 0);
        if (i < constructed) {
            return thm33_case("seed " + std::to_string(i) + " (Haar-rotated)", multiply_free_haar(base, degree), degree);
        }
        return thm33_case("seed " + std::to_string(i) + " (random)", base, degree);
    });
    cases.insert(cases.end(), random_cases.begin(), random_cases.end());
    return suite_report("thm3.3", std::move(cases), {{"degree", degree}});
}

MomentTable perturbed(const MomentTable& mu, const Word& target, const Scalar& delta) {
    WordTable::Entries entries{{Word(), Scalar(1)}};
    for (int n = 1; n <= mu.degree(); ++n)
        for (const Word& w : mu.alphabet().words_of_length(n)) entries[w] = mu(w);
    entries[target] += delta;
    return MomentTable(WordTable(mu.alphabet(), mu.degree(), std::move(entries), false), mu.flags());
}

Json thm48_pair(const std::string& name, const MomentTable& mu, int degree, const std::optional<Word>& expected) {
    Verdict e = is_eta_diagonal(mu, degree);
    Verdict m = eta_moment_characterization(mu, degree);
    Json c;
    c["case"] = name;
    c["eta_diagonal"] = verdict_json(mu.alphabet(), e);
    c["moment_characterization"] = verdict_json(mu.alphabet(), m);
    bool ok = e.pass == m.pass;
    if (expected) ok = ok && !e.pass && *e.witness == *expected && *m.witness == *expected;
    c["verdict"] = ok ? "PASS" : "FAIL";
    return c;
}

Outcome verify_thm48(const Options& opt) {
    const int degree = effective(opt.degree, 6);
    std::vector<Json> cases;
    for (const auto& f : opt.files) {
        MomentTable mu = load_moment_file(f);
        cases.push_back(thm48_pair(f, mu, std::min(degree, mu.degree()), std::nullopt));
    }
    int seeds = effective(opt.seeds, opt.files.empty() ? 100 : 0);
    std::vector<Word> others;
    Alphabet a = pair_alphabet();
    for (int n = 1; n <= degree; ++n)
        for (const Word& w : a.words_of_length(n))
            if (classify_word(a, w).kind == AlternationKind::Other) others.push_back(w);
    auto random_cases = parallel_cases<std::pair<Json, Json>>(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        Rng rng = case_rng(opt.seed, i);
        MomentTable mu = random_eta_diagonal_table(degree, rng);
        Json clean = thm48_pair("seed " + std::to_string(i), mu, degree, std::nullopt);
        if (clean["eta_diagonal"]["verdict"] != "PASS") clean["verdict"] = "FAIL";
        Word target = others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng)];
        Json broken = thm48_pair("seed " + std::to_string(i) + " perturbed at '" + a.format(target) + "'",
                                 perturbed(mu, target, Scalar(1)), degree, target);
        return std::make_pair(clean, broken);
    });
    for (auto& [clean, broken] : random_cases) {
        cases.push_back(std::move(clean));
        cases.push_back(std::move(broken));
    }
    return suite_report("thm4.8", std::move(cases), {{"degree", degree}});
}

Json prop49_case(const std::string& name, const MomentTable& mu, int degree) {
    EtaSquares s = eta_series_of_squares(mu, degree);
    Json c;
    c["case"] = name;
    c["consistent"] = s.consistent;
    c["mixed_coefficients_vanish"] = s.mixed_vanish;
    std::size_t coefficients = 0;
    for (int k = 0; k < 2; ++k) coefficients += s.direct[static_cast<std::size_t>(k)].coefficients.size();
    c["nonzero_coefficients"] = coefficients;
    if (s.mismatch) c["mismatch"] = s.direct[0].alphabet.format(*s.mismatch);
    c["verdict"] = s.consistent && s.mixed_vanish ? "PASS" : "FAIL";
    return c;
}

Outcome verify_prop49(const Options& opt) {
    const int degree = effective(opt.degree, 8);
    std::vector<Json> cases;
    for (const auto& f : opt.files) {
        MomentTable mu = load_moment_file(f);
        cases.push_back(prop49_case(f, mu, std::min(degree, mu.degree())));
    }
    int seeds = effective(opt.seeds, opt.files.empty() ? 20 : 0);
    auto random_cases = parallel_cases<Json>(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        Rng rng = case_rng(opt.seed, i);
        return prop49_case("seed " + std::to_string(i), random_eta_diagonal_table(degree, rng), degree);
    });
    cases.insert(cases.end(), random_cases.begin(), random_cases.end());
    return suite_report("prop4.9", std::move(cases), {{"degree", degree}});
}

Outcome verify_cor410(const Options&) {
    Corollary410Report r = corollary_4_10_witness();
    const Alphabet& sq = r.squares.alphabet();
    bool witness_ok = !r.independence.pass && r.independence.witness && sq.format(*r.independence.witness) == "a d";
    Json c;
    c["case"] = "counterexample";
    c["eta_diagonal"] = r.eta_diagonal;
    c["b_lr_xxs_ysy"] = text(r.mixed_square_cumulant);
    c["b_x_xs_ys_y"] = text(r.doubled_cumulant);
    c["independence"] = r.independence.pass ? "PASS" : "FAIL";
    c["witness"] = word_json(sq, r.independence.witness);
    c["witness_meaning"] = "a = x x*, d = y* y";
    bool ok = r.eta_diagonal && r.mixed_square_cumulant == Scalar(1) && r.doubled_cumulant == Scalar(1) && witness_ok;
    c["verdict"] = ok ? "PASS" : "FAIL";
    return suite_report("cor4.10", {c});
}

Json thm52_case(const std::string& name, const MomentTable& mu, int degree) {
    Theorem52Report r = theorem_5_2_witness(mu, degree);
    Json c;
    c["case"] = name;
    c["outcome"] = to_string(r.outcome);
    c["chains_checked"] = r.chains_checked;
    if (r.chain) {
        c["chain"] = r.chain->name;
        c["parameters"] = r.chain->parameters;
        c["product_side"] = r.values.product_side.to_string();
        c["factored_side"] = r.values.factored_side.to_string();
    }
    c["verdict"] = r.outcome == Theorem52Report::Outcome::Unequal ? "PASS" : "INCONCLUSIVE";
    return c;
}

Outcome verify_thm52(const Options& opt) {
    const int degree = effective(opt.degree, 6);
    std::vector<Json> cases;
    for (const auto& f : opt.files) {
        MomentTable mu = load_moment_file(f);
        cases.push_back(thm52_case(f, mu, degree));
    }
    int seeds = effective(opt.seeds, opt.files.empty() ? 10 : 0);
    Alphabet one({{"x", Side::Unsided}});
    for (int i = 0; i < seeds; ++i) {
        Rng rng = case_rng(opt.seed, static_cast<std::size_t>(i));
        cases.push_back(thm52_case("seed " + std::to_string(i), random_moment_table(one, degree, {false, true, false}, rng),
                                   degree));
    }
    return suite_report("thm5.2", std::move(cases), {{"degree", degree}});
}

Json roundtrip_case(const std::string& name, const MomentTable& mu, int degree) {
    Json c;
    c["case"] = name;
    std::vector<CumulantKind> kinds{CumulantKind::Free, CumulantKind::Boolean};
    if (mu.alphabet().is_sided()) {
        kinds.push_back(CumulantKind::BiFree);
        kinds.push_back(CumulantKind::BiBoolean);
    }
    bool ok = true;
    Json kinds_json = Json::object();
    for (CumulantKind k : kinds) {
        MomentTable back = moments_from_cumulants(capped(mu.cumulants(k), degree));
        std::optional<Word> bad;
        for (int n = 1; n <= degree && !bad; ++n)
            for (const Word& w : mu.alphabet().words_of_length(n))
                if (back(w) != mu(w)) {
                    bad = w;
                    break;
                }
        kinds_json[to_string(k)] = bad ? Json(mu.alphabet().format(*bad)) : Json("exact");
        ok = ok && !bad;
    }
    c["kinds"] = std::move(kinds_json);
    c["verdict"] = ok ? "PASS" : "FAIL";
    return c;
}

Outcome verify_roundtrip(const Options& opt) {
    const int degree = effective(opt.degree, 6);
    std::vector<Json> cases;
    for (const auto& f : opt.files) {
        MomentTable mu = load_moment_file(f);
        cases.push_back(roundtrip_case(f, mu, std::min(degree, mu.degree())));
    }
    int seeds = effective(opt.seeds, opt.files.empty() ? 50 : 0);
    auto random_cases = parallel_cases<Json>(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        Rng rng = case_rng(opt.seed, i);
        return roundtrip_case("seed " + std::to_string(i), random_moment_table(pair_alphabet(), degree, {}, rng), degree);
    });
    cases.insert(cases.end(), random_cases.begin(), random_cases.end());
    return suite_report("roundtrip", std::move(cases), {{"degree", degree}});
}

// Sample generation ----------------------------------------------------------------

int cmd_generate(std::ostream& out, const std::string& what, const Options& opt) {
    const int degree = effective(opt.degree, 8);
    Rng rng = case_rng(opt.seed, 0);
    if (what == "bicircular") {
        std::vector<Rational> v;
        std::stringstream in(opt.cov);
        std::string item;
        while (std::getline(in, item, ',')) v.push_back(Rational::parse(item));
        if (v.size() != 4) throw ParseError("--cov needs c_ll,re(c_lr),im(c_lr),c_rr");
        BiCircularSpec spec;
        spec.covariance = {{{Scalar(v[0]), Scalar(v[1], v[2])}, {Scalar(v[1], -v[2]), Scalar(v[3])}}};
        out << moment_json(bi_circular(spec, degree));
    } else if (what == "bi-haar") {
        out << moment_json(bi_haar(degree));
    } else if (what == "thm2.7") {
        out << moment_json(capped_moments(theorem_2_7_witness().pair, degree));
    } else if (what == "thm2.7-squares") {
        out << moment_json(theorem_2_7_witness().squares);
    } else if (what == "cor4.10") {
        out << moment_json(capped_moments(corollary_4_10_witness().pair, degree));
    } else if (what == "cor4.10-squares") {
        out << moment_json(corollary_4_10_witness().squares);
    } else if (what == "zero") {
        Alphabet one({{"x", Side::Unsided}});
        out << moment_json(MomentTable(WordTable(one, degree, {{Word(), Scalar(1)}}, true), {false, true, true}));
    } else if (what == "star-symmetric") {
        Alphabet one({{"x", Side::Unsided}});
        out << moment_json(random_moment_table(one, degree, {false, true, false}, rng), true);
    } else if (what == "haar") {
        out << moment_json(haar_unitary(degree, "x"));
    } else if (what == "sequences") {
        out << determining_json(random_determining_sequences(degree, rng));
    } else if (what == "eta-diagonal") {
        out << moment_json(random_eta_diagonal_table(degree, rng));
    } else if (what == "tracial") {
        out << moment_json(random_moment_table(single_xy(), degree, {true, false, false}, rng), true);
    } else if (what == "haar-rotated") {
        MomentTable base = random_moment_table(single_xy(), degree, {true, false, false}, rng);
        out << moment_json(multiply_free_haar(base, degree), true);
    } else if (what == "random-pair") {
        out << moment_json(random_moment_table(pair_alphabet(), degree, {}, rng), true);
    } else {
        throw ParseError("unknown sample '" + what + "'");
    }
    return kPass;
}

int finish(std::ostream& out, const std::vector<std::string>& args, Outcome o, const Options& opt,
           std::chrono::steady_clock::time_point start) {
    Json report;
    report["format"] = 1;
    std::string command;
    for (const auto& a : args) command += (command.empty() ? "" : " ") + a;
    report["command"] = command;
    merge(report, o.report);
    if (opt.timing) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        report["elapsed_ms"] = ms.count();
    }
    out << report.dump(2) << "\n";
    switch (o.status) {
        case Status::Pass: return kPass;
        case Status::Fail: return kFail;
        case Status::Inconclusive: return kInconclusive;
    }
    return kFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    CLI::App app{"Exact bi-free and bi-Boolean cumulant engine", "bifree"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&opt](CLI::App* c) {
        c->add_option("--degree", opt.degree, "Degree cap N");
        c->add_flag("--timing", opt.timing, "Add elapsed_ms to the report");
    };
    auto add_file = [&opt](CLI::App* c) { c->add_option("file", opt.files, "Input file")->required(); };

    auto* cumulants = app.add_subcommand("cumulants", "Cumulants of a moment file");
    add_common(cumulants);
    add_file(cumulants);
    cumulants->add_option("--kind", opt.kind, "free|boolean|bifree|biboolean")->required();
    cumulants->add_option("--format", opt.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cumulants->add_flag("--zeros", opt.zeros, "Also list zero entries");

    auto* moments = app.add_subcommand("moments", "Moments of a cumulant file");
    add_common(moments);
    add_file(moments);
    moments->add_option("--format", opt.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    moments->add_flag("--zeros", opt.zeros, "Also list zero entries");

    auto* check = app.add_subcommand("check", "Run one detector on a moment file");
    check->require_subcommand(1);
    std::map<std::string, CLI::App*> checks;
    for (const char* name : {"r-diagonal", "eta-diagonal", "condition-3-6", "bifree-indep", "biboolean-indep"}) {
        auto* c = check->add_subcommand(name);
        add_common(c);
        add_file(c);
        checks[name] = c;
    }
    checks["bifree-indep"]->add_option("--group", opt.group, "Family index per symbol, e.g. 0,0,1,1")->required();
    checks["biboolean-indep"]->add_option("--group", opt.group, "Family index per symbol, e.g. 0,0,1,1")->required();

    auto* product = app.add_subcommand("product", "Determining sequences of a product pair");
    product->add_option("--orientation", opt.orientation, "y2y1|y1y2");
    product->add_option("--chi", opt.chi, "Chi map such as LRLR")->required();
    product->add_option("--which", opt.which, "alpha|beta");
    product->add_option("files", opt.files, "Two determining-sequence files")->required()->expected(2);
    product->add_flag("--timing", opt.timing, "Add elapsed_ms to the report");

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->require_subcommand(1);
    std::map<std::string, CLI::App*> suites;
    for (const char* name :
         {"thm2.4", "thm2.5", "cor2.6", "thm2.7", "thm3.3", "thm4.8", "prop4.9", "cor4.10", "thm5.2", "roundtrip"}) {
        auto* s = verify->add_subcommand(name);
        add_common(s);
        s->add_option("--seeds", opt.seeds, "Number of randomized cases");
        s->add_option("--seed", opt.seed, "Base seed");
        s->add_option("--n", opt.n, "Half length of chi (product suites)");
        s->add_option("files", opt.files, "Input files");
        suites[name] = s;
    }

    auto* generate = app.add_subcommand("generate", "Write a sample distribution file");
    std::string sample;
    generate->add_option("sample", sample,
                         "bicircular|bi-haar|thm2.7|thm2.7-squares|cor4.10|cor4.10-squares|haar|zero|star-symmetric|sequences|"
                         "eta-diagonal|tracial|haar-rotated|random-pair")
        ->required();
    generate->add_option("--degree", opt.degree, "Degree cap");
    generate->add_option("--seed", opt.seed, "Seed for random samples");
    generate->add_option("--cov", opt.cov, "c_ll,re(c_lr),im(c_lr),c_rr for bicircular");

    std::vector<std::string> argv_storage{"bifree"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kPass;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kPass;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        if (cumulants->parsed()) return cmd_cumulants(out, opt);
        if (moments->parsed()) return cmd_moments(out, opt);
        if (generate->parsed()) return cmd_generate(out, sample, opt);
        if (product->parsed()) return finish(out, args, cmd_product(opt), opt, start);
        if (checks["r-diagonal"]->parsed()) return finish(out, args, check_r_diagonal(opt), opt, start);
        if (checks["eta-diagonal"]->parsed()) return finish(out, args, check_eta_diagonal(opt), opt, start);
        if (checks["condition-3-6"]->parsed()) return finish(out, args, check_condition(opt), opt, start);
        if (checks["bifree-indep"]->parsed()) return finish(out, args, check_independence(opt, false), opt, start);
        if (checks["biboolean-indep"]->parsed()) return finish(out, args, check_independence(opt, true), opt, start);
        const std::map<std::string, std::function<Outcome(const Options&)>> runners{
            {"thm2.4", verify_thm24},
            {"thm2.5", [](const Options& o) { return verify_products(o, Orientation::Reversed); }},
            {"cor2.6", [](const Options& o) { return verify_products(o, Orientation::Ordered); }},
            {"thm2.7", verify_thm27},
            {"thm3.3", verify_thm33},
            {"thm4.8", verify_thm48},
            {"prop4.9", verify_prop49},
            {"cor4.10", verify_cor410},
            {"thm5.2", verify_thm52},
            {"roundtrip", verify_roundtrip},
        };
        for (const auto& [name, fn] : runners) {
            if (suites[name]->parsed()) return finish(out, args, fn(opt), opt, start);
        }
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    err << "no command\n";
    return kInputError;
}

}  // namespace bifree::cli
