#include "bifree/distribution.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "bifree/cumulants.hpp"
#include "bifree/errors.hpp"
#include "bifree/json_io.hpp"

namespace bifree {

// WordTable ------------------------------------------------------------------

WordTable::WordTable(Alphabet alphabet, int degree, Entries entries, bool zero_default)
    : state_(std::make_shared<State>()) {
    state_->alphabet = std::move(alphabet);
    state_->degree = degree;
    state_->entries = std::move(entries);
    state_->zero_default = zero_default;
}

WordTable::WordTable(Alphabet alphabet, int degree, Generator generator) : state_(std::make_shared<State>()) {
    state_->alphabet = std::move(alphabet);
    state_->degree = degree;
    state_->generator = std::move(generator);
}

Scalar WordTable::at(const Word& w) const {
    if (w.size() > state_->degree) {
        throw DegreeError("word '" + state_->alphabet.format(w) + "' exceeds degree cap " +
                          std::to_string(state_->degree));
    }
    if (!state_->generator) {
        auto it = state_->entries.find(w);
        if (it != state_->entries.end()) return it->second;
        if (state_->zero_default) return {};
        throw MissingEntryError("no entry for word '" + state_->alphabet.format(w) + "'");
    }
    {
        std::shared_lock lock(state_->memo_mutex);
        auto it = state_->memo.find(w);
        if (it != state_->memo.end()) return it->second;
    }
    Scalar value = state_->generator(w, *this);
    std::unique_lock lock(state_->memo_mutex);
    state_->memo.emplace(w, value);
    return value;
}

// Kinds ----------------------------------------------------------------------

std::string to_string(CumulantKind kind) {
    switch (kind) {
        case CumulantKind::Free: return "free";
        case CumulantKind::Boolean: return "boolean";
        case CumulantKind::BiFree: return "bifree";
        case CumulantKind::BiBoolean: return "biboolean";
    }
    return "?";
}

CumulantKind parse_cumulant_kind(std::string_view text) {
    if (text == "free") return CumulantKind::Free;
    if (text == "boolean") return CumulantKind::Boolean;
    if (text == "bifree") return CumulantKind::BiFree;
    if (text == "biboolean") return CumulantKind::BiBoolean;
    throw ParseError("unknown cumulant kind '" + std::string(text) + "'");
}

// MomentTable ----------------------------------------------------------------

namespace {

void validate_stored(const WordTable& table, const MomentFlags& flags) {
    const Alphabet& alphabet = table.alphabet();
    for (const auto& [w, value] : table.entries()) {
        if (w.empty()) {
            if (!value.is_one()) throw PreconditionError("unit word must have moment 1");
            continue;
        }
        for (int i = 0; i < w.size(); ++i) {
            if (w[i].symbol >= alphabet.size()) throw PreconditionError("word uses an undeclared symbol");
        }
    }
    if (!flags.sparse) {
        for (int n = 1; n <= table.degree(); ++n) {
            for (const Word& w : alphabet.words_of_length(n)) {
                if (!table.entries().contains(w)) {
                    throw MissingEntryError("moment table is missing '" + alphabet.format(w) + "'");
                }
            }
        }
    }
    for (const auto& [w, value] : table.entries()) {
        if (w.empty()) continue;
        if (flags.tracial) {
            Word r = w.rotated(1);
            if (table.at(r) != value) {
                throw PreconditionError("tracial flag violated at '" + alphabet.format(w) + "'");
            }
        }
        if (flags.star_symmetric) {
            if (table.at(w.star()) != value.conj()) {
                throw PreconditionError("star_symmetric flag violated at '" + alphabet.format(w) + "'");
            }
        }
    }
}

}  // namespace

MomentTable::MomentTable(WordTable table, MomentFlags flags) : state_(std::make_shared<State>()) {
    if (table.degree() < 1) throw PreconditionError("degree cap must be positive");
    if (table.is_stored()) validate_stored(table, flags);
    state_->table = std::move(table);
    state_->flags = flags;
}

Scalar MomentTable::operator()(const Word& w) const {
    if (w.empty()) return Scalar(1);
    return state_->table.at(w);
}

Scalar MomentTable::evaluate(const NcPolynomial& p) const {
    Scalar total;
    for (const auto& [w, c] : p.terms()) total += c * (*this)(w);
    return total;
}

Scalar CumulantTable::operator()(const Word& w) const {
    if (w.empty()) throw PreconditionError("cumulants are not defined on the empty word");
    return table_.at(w);
}

MomentTable from_bifree_cumulants(const CumulantTable& cumulants, int degree) {
    if (cumulants.kind() != CumulantKind::BiFree) throw PreconditionError("expected a bi-free cumulant table");
    if (degree > cumulants.degree()) throw DegreeError("cumulant table cap is below the requested degree");
    MomentTable full = moments_from_cumulants(cumulants);
    if (degree == cumulants.degree()) return full;
    return MomentTable(WordTable(cumulants.alphabet(), degree,
                                 [full](const Word& w, const WordTable&) { return full(w); }),
                       {});
}

NcPolynomial center(const NcPolynomial& p, const MomentTable& mu) {
    return p - NcPolynomial(mu.evaluate(p));
}

Alphabet pair_alphabet(const std::string& left, const std::string& right) {
    return Alphabet({Symbol{left, Side::Left}, Symbol{right, Side::Right}});
}

// Named distributions --------------------------------------------------------

void BiCircularSpec::validate() const {
    const auto& c = covariance;
    if (c[0][1] != c[1][0].conj()) throw PreconditionError("covariance is not Hermitian");
    if (!c[0][0].is_real() || !c[1][1].is_real()) throw PreconditionError("covariance diagonal is not real");
    if (c[0][0].real().sign() < 0 || c[1][1].real().sign() < 0) {
        throw PreconditionError("covariance diagonal is negative");
    }
    Rational det = c[0][0].real() * c[1][1].real() - c[0][1].norm();
    if (det.sign() < 0) throw PreconditionError("covariance is indefinite");
}

MomentTable bi_circular(const BiCircularSpec& spec, int degree) {
    spec.validate();
    Alphabet alphabet = pair_alphabet();
    auto cov = spec.covariance;
    WordTable kappa(alphabet, degree, [cov](const Word& w, const WordTable& self) -> Scalar {
        if (w.size() != 2 || w[0].starred == w[1].starred) return {};
        const Alphabet& a = self.alphabet();
        int i = a.side(w[0]) == Side::Left ? 0 : 1;
        int j = a.side(w[1]) == Side::Left ? 0 : 1;
        return cov[i][j];
    });
    MomentFlags flags;
    flags.star_symmetric = true;
    return moments_from_cumulants(CumulantTable(CumulantKind::BiFree, std::move(kappa)), flags);
}

namespace {

MomentTable exponent_sum_table(Alphabet alphabet, int degree) {
    WordTable table(std::move(alphabet), degree, [](const Word& w, const WordTable&) -> Scalar {
        int sum = 0;
        for (int i = 0; i < w.size(); ++i) sum += w[i].starred ? -1 : 1;
        return sum == 0 ? Scalar(1) : Scalar(0);
    });
    return MomentTable(std::move(table), MomentFlags{true, true, false});
}

}  // namespace

MomentTable bi_haar(int degree) {
    return exponent_sum_table(Alphabet({Symbol{"u_l", Side::Left}, Symbol{"u_r", Side::Right}}), degree);
}

MomentTable haar_unitary(int degree, const std::string& name) {
    return exponent_sum_table(Alphabet({Symbol{name, Side::Unsided}}), degree);
}

MomentTable lr_pair(const MomentTable& single, int degree) {
    const Alphabet& in = single.alphabet();
    if (in.size() != 2) throw PreconditionError("lr_pair expects a two-symbol alphabet");
    for (const auto& s : in.symbols()) {
        if (s.side != Side::Unsided) throw PreconditionError("lr_pair expects unsided symbols");
    }
    if (!single.flags().tracial) throw PreconditionError("lr_pair requires a tracial table");
    if (degree > single.degree()) throw DegreeError("requested degree exceeds the input cap");
    Alphabet out = pair_alphabet(in.symbol(0).name, in.symbol(1).name);
    WordTable table(out, degree, [single](const Word& w, const WordTable& self) {
        return single(w.permuted(self.alphabet().chi(w).order()));
    });
    MomentFlags flags;
    flags.star_symmetric = single.flags().star_symmetric;
    return MomentTable(std::move(table), flags);
}

MomentTable bifree_join(const MomentTable& first, const MomentTable& second, int degree) {
    const Alphabet& a1 = first.alphabet();
    const Alphabet& a2 = second.alphabet();
    if (!a1.is_sided() || !a2.is_sided()) throw PreconditionError("bifree_join expects sided alphabets");
    if (degree > first.degree() || degree > second.degree()) {
        throw DegreeError("requested degree exceeds an input cap");
    }
    std::vector<Symbol> symbols = a1.symbols();
    for (const auto& s : a2.symbols()) {
        if (a1.find(s.name)) throw PreconditionError("alphabet collision on '" + s.name + "'");
        symbols.push_back(s);
    }
    Alphabet joint(std::move(symbols));
    const int split = a1.size();
    std::vector<int> down(static_cast<std::size_t>(joint.size()), 0);
    for (int s = split; s < joint.size(); ++s) down[static_cast<std::size_t>(s)] = s - split;
    CumulantTable k1 = first.cumulants(CumulantKind::BiFree);
    CumulantTable k2 = second.cumulants(CumulantKind::BiFree);
    WordTable kappa(joint, degree, [k1, k2, split, down](const Word& w, const WordTable&) -> Scalar {
        bool has_first = false;
        bool has_second = false;
        for (int i = 0; i < w.size(); ++i) (w[i].symbol < split ? has_first : has_second) = true;
        if (has_first && has_second) return {};
        if (has_first) return k1(w);
        return k2(w.relabeled(down));
    });
    MomentFlags flags;
    flags.star_symmetric = first.flags().star_symmetric && second.flags().star_symmetric;
    return moments_from_cumulants(CumulantTable(CumulantKind::BiFree, std::move(kappa)), flags);
}

MomentTable substitute(const MomentTable& mu, const Alphabet& alphabet, const std::vector<NcPolynomial>& polys,
                       int degree) {
    if (static_cast<int>(polys.size()) != alphabet.size()) {
        throw PreconditionError("one polynomial per symbol is required");
    }
    int widest = 0;
    for (const auto& p : polys) widest = std::max(widest, p.degree());
    if (widest * degree > mu.degree()) throw DegreeError("substitution exceeds the input degree cap");
    std::vector<NcPolynomial> starred;
    for (const auto& p : polys) starred.push_back(p.star());
    WordTable table(alphabet, degree, [mu, polys, starred](const Word& w, const WordTable&) {
        NcPolynomial product = NcPolynomial::unit();
        for (int i = 0; i < w.size(); ++i) {
            Letter l = w[i];
            product = product * (l.starred ? starred[l.symbol] : polys[l.symbol]);
        }
        return mu.evaluate(product);
    });
    return MomentTable(std::move(table), MomentFlags{mu.flags().tracial, mu.flags().star_symmetric, false});
}

namespace {

// u^{k0} B1 u^{k1} ... Bm u^{km} with every interior exponent nonzero.
struct HaarWord {
    std::vector<int> exps;
    std::vector<Word> blocks;
    auto operator<=>(const HaarWord&) const = default;
};

HaarWord normalize(std::vector<int> exps, std::vector<Word> blocks) {
    HaarWord out;
    out.exps.push_back(exps[0]);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (!out.blocks.empty() && out.exps.back() == 0 && out.exps.size() > 1) {
            out.exps.pop_back();
            out.blocks.back() = out.blocks.back().concat(blocks[i]);
        } else {
            out.blocks.push_back(blocks[i]);
        }
        out.exps.push_back(exps[i + 1]);
    }
    return out;
}

struct HaarFreeState {
    MomentTable single;
    std::mutex mutex;
    std::map<HaarWord, Scalar> memo;

    Scalar evaluate(const HaarWord& h) {
        int total = 0;
        for (int k : h.exps) total += k;
        if (total != 0) return {};
        if (h.blocks.empty()) return Scalar(1);
        {
            std::lock_guard lock(mutex);
            auto it = memo.find(h);
            if (it != memo.end()) return it->second;
        }
        // Centering every block gives an alternating product of centered
        // elements, so its moment vanishes; expand and solve for the full word.
        const std::size_t m = h.blocks.size();
        std::vector<Scalar> means;
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < m; ++i) {
            means.push_back(single(h.blocks[i]));
            if (!means.back().is_zero()) live.push_back(i);
        }
        Scalar result;
        const std::uint32_t subsets = 1U << live.size();
        for (std::uint32_t s = 1; s < subsets; ++s) {
            Scalar coeff(-1);
            std::vector<bool> removed(m, false);
            for (std::size_t j = 0; j < live.size(); ++j) {
                if (s >> j & 1U) {
                    removed[live[j]] = true;
                    coeff *= -means[live[j]];
                }
            }
            std::vector<int> exps{h.exps[0]};
            std::vector<Word> blocks;
            for (std::size_t i = 0; i < m; ++i) {
                if (removed[i]) {
                    exps.back() += h.exps[i + 1];
                } else {
                    blocks.push_back(h.blocks[i]);
                    exps.push_back(h.exps[i + 1]);
                }
            }
            result += coeff * evaluate(normalize(std::move(exps), std::move(blocks)));
        }
        std::lock_guard lock(mutex);
        memo.emplace(h, result);
        return result;
    }
};

}  // namespace

MomentTable multiply_free_haar(const MomentTable& single, int degree) {
    const Alphabet& in = single.alphabet();
    if (in.size() > Word::kMaxSymbols) throw SizeError("alphabet too large");
    if (!single.flags().tracial) throw PreconditionError("multiply_free_haar requires a tracial table");
    // Only the x/y letters are looked up in `single`; Haar moments are closed-form.
    if (degree > single.degree()) throw DegreeError("requested degree exceeds the input cap");
    std::vector<Symbol> symbols;
    for (const auto& s : in.symbols()) symbols.push_back(Symbol{"u" + s.name, Side::Unsided});
    auto state = std::make_shared<HaarFreeState>();
    state->single = single;
    WordTable table(Alphabet(std::move(symbols)), degree, [state](const Word& w, const WordTable&) {
        // (u a) contributes u then a; (u a)* contributes a* then u*.
        std::vector<int> exps{0};
        std::vector<Word> blocks;
        for (int i = 0; i < w.size(); ++i) {
            Letter l = w[i];
            if (!l.starred) {
                exps.back() += 1;
                blocks.push_back(Word{l});
                exps.push_back(0);
            } else {
                blocks.push_back(Word{l});
                exps.push_back(-1);
            }
        }
        return state->evaluate(normalize(std::move(exps), std::move(blocks)));
    });
    return MomentTable(std::move(table), MomentFlags{true, single.flags().star_symmetric, false});
}

// JSON -----------------------------------------------------------------------

namespace {

Json integer_json(const std::string& digits) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(digits, &used);
        if (used == digits.size()) return Json(v);
    } catch (const std::out_of_range&) {
    }
    return Json(digits);
}

std::string integer_text(const Json& v) {
    if (v.is_number_integer()) return v.is_number_unsigned() ? std::to_string(v.get<unsigned long long>())
                                                             : std::to_string(v.get<long long>());
    if (v.is_string()) {
        auto s = v.get<std::string>();
        std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
        if (i == s.size()) throw ParseError("malformed integer '" + s + "'");
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw ParseError("malformed integer '" + s + "'");
        }
        return s;
    }
    throw ParseError("scalar entries must be integers");
}

Rational rational_from(const Json& num, const Json& den) {
    std::string d = integer_text(den);
    if (mpz_class(d) == 0) throw ParseError("zero denominator");
    return Rational::parse(integer_text(num) + "/" + d);
}

Side parse_side(const Json& v) {
    if (v.is_null()) return Side::Unsided;
    if (!v.is_string()) throw ParseError("side must be a string");
    auto s = v.get<std::string>();
    if (s == "L" || s == "l" || s == "left") return Side::Left;
    if (s == "R" || s == "r" || s == "right") return Side::Right;
    if (s == "U" || s == "u" || s == "unsided" || s == "none") return Side::Unsided;
    throw ParseError("unknown side '" + s + "'");
}

const char* side_text(Side s) {
    switch (s) {
        case Side::Left: return "L";
        case Side::Right: return "R";
        case Side::Unsided: return "U";
    }
    return "U";
}

Json parse_document(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
    }
}

const Json& field(const Json& doc, const char* name) {
    if (!doc.is_object() || !doc.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
    return doc.at(name);
}

Alphabet parse_alphabet(const Json& doc) {
    const Json& list = field(doc, "alphabet");
    if (!list.is_array()) throw ParseError("alphabet must be a list");
    std::vector<Symbol> symbols;
    for (const Json& entry : list) {
        if (!entry.is_object() || !entry.contains("symbol") || !entry.at("symbol").is_string()) {
            throw ParseError("alphabet entries need a string 'symbol'");
        }
        symbols.push_back(Symbol{entry.at("symbol").get<std::string>(),
                                 parse_side(entry.contains("side") ? entry.at("side") : Json())});
    }
    try {
        return Alphabet(std::move(symbols));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

int parse_degree(const Json& doc) {
    const Json& d = field(doc, "degree");
    if (!d.is_number_integer() || d.get<long long>() < 1 || d.get<long long>() > Word::kMaxLength) {
        throw ParseError("degree must be a positive integer up to 32");
    }
    return d.get<int>();
}

MomentFlags parse_flags(const Json& doc) {
    MomentFlags flags;
    if (!doc.contains("flags")) return flags;
    const Json& f = doc.at("flags");
    if (!f.is_object()) throw ParseError("flags must be an object");
    auto read = [&](const char* name, bool& out) {
        if (!f.contains(name)) return;
        if (!f.at(name).is_boolean()) throw ParseError(std::string("flag '") + name + "' must be boolean");
        out = f.at(name).get<bool>();
    };
    read("tracial", flags.tracial);
    read("star_symmetric", flags.star_symmetric);
    read("sparse", flags.sparse);
    return flags;
}

WordTable::Entries parse_entries(const Json& doc, const char* name, const Alphabet& alphabet, int degree) {
    const Json& map = field(doc, name);
    if (!map.is_object()) throw ParseError(std::string("'") + name + "' must be an object");
    WordTable::Entries entries;
    for (const auto& [key, value] : map.items()) {
        Word w;
        try {
            w = alphabet.parse_word(key);
        } catch (const ParseError& e) {
            throw ParseError("bad word key '" + key + "': " + e.what());
        }
        if (w.size() > degree) throw ParseError("word '" + key + "' exceeds the declared degree");
        entries[w] = scalar_from_json(value);
    }
    return entries;
}

Json alphabet_json(const Alphabet& alphabet) {
    Json list = Json::array();
    for (const auto& s : alphabet.symbols()) list.push_back(Json{{"symbol", s.name}, {"side", side_text(s.side)}});
    return list;
}

Json word_values(const Alphabet& alphabet, int degree, bool include_zeros,
                 const std::function<Scalar(const Word&)>& value) {
    Json map = Json::object();
    for (int n = 1; n <= degree; ++n) {
        for (const Word& w : alphabet.words_of_length(n)) {
            Scalar v = value(w);
            if (include_zeros || !v.is_zero()) map[alphabet.format(w)] = scalar_to_json(v);
        }
    }
    return map;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

Json scalar_to_json(const Scalar& value) {
    const Rational& re = value.real();
    const Rational& im = value.imag();
    return Json::array({integer_json(re.numerator_string()), integer_json(re.denominator_string()),
                        integer_json(im.numerator_string()), integer_json(im.denominator_string())});
}

Scalar scalar_from_json(const Json& value) {
    if (value.is_number_integer()) return Scalar(Rational::parse(integer_text(value)));
    if (!value.is_array() || (value.size() != 4 && value.size() != 2)) {
        throw ParseError("scalars are [re_num, re_den, im_num, im_den]");
    }
    Rational re = rational_from(value[0], value[1]);
    if (value.size() == 2) return Scalar(re);
    return Scalar(re, rational_from(value[2], value[3]));
}

MomentTable parse_moment_json(const std::string& text) {
    Json doc = parse_document(text);
    Alphabet alphabet = parse_alphabet(doc);
    int degree = parse_degree(doc);
    MomentFlags flags = parse_flags(doc);
    auto entries = parse_entries(doc, "moments", alphabet, degree);
    return MomentTable(WordTable(std::move(alphabet), degree, std::move(entries), flags.sparse), flags);
}

MomentTable load_moment_file(const std::string& path) { return parse_moment_json(read_file(path)); }

std::string moment_json(const MomentTable& mu, bool include_zeros) {
    const MomentFlags& f = mu.flags();
    bool sparse = !include_zeros;
    Json doc;
    doc["alphabet"] = alphabet_json(mu.alphabet());
    doc["degree"] = mu.degree();
    doc["flags"] = Json{{"tracial", f.tracial}, {"star_symmetric", f.star_symmetric}, {"sparse", sparse}};
    doc["moments"] = word_values(mu.alphabet(), mu.degree(), include_zeros, [&](const Word& w) { return mu(w); });
    return doc.dump(2) + "\n";
}

CumulantTable parse_cumulant_json(const std::string& text) {
    Json doc = parse_document(text);
    const Json& kind = field(doc, "kind");
    if (!kind.is_string()) throw ParseError("kind must be a string");
    CumulantKind k = parse_cumulant_kind(kind.get<std::string>());
    Alphabet alphabet = parse_alphabet(doc);
    int degree = parse_degree(doc);
    MomentFlags flags = parse_flags(doc);
    auto entries = parse_entries(doc, "cumulants", alphabet, degree);
    if (entries.contains(Word{})) throw ParseError("cumulants are not defined on the empty word");
    if (!flags.sparse) {
        for (int n = 1; n <= degree; ++n) {
            for (const Word& w : alphabet.words_of_length(n)) {
                if (!entries.contains(w)) {
                    throw MissingEntryError("cumulant table is missing '" + alphabet.format(w) + "'");
                }
            }
        }
    }
    return CumulantTable(k, WordTable(std::move(alphabet), degree, std::move(entries), flags.sparse));
}

CumulantTable load_cumulant_file(const std::string& path) { return parse_cumulant_json(read_file(path)); }

std::string cumulant_json(const CumulantTable& table, bool include_zeros) {
    Json doc;
    doc["kind"] = to_string(table.kind());
    doc["alphabet"] = alphabet_json(table.alphabet());
    doc["degree"] = table.degree();
    doc["flags"] = Json{{"sparse", !include_zeros}};
    doc["cumulants"] =
        word_values(table.alphabet(), table.degree(), include_zeros, [&](const Word& w) { return table(w); });
    return doc.dump(2) + "\n";
}

namespace {

template <class F>
std::string csv_rows(const Alphabet& a, int degree, bool include_zeros, const F& value) {
    std::string out = "word,re,im\n";
    for (int n = 1; n <= degree; ++n) {
        for (const Word& w : a.words_of_length(n)) {
            Scalar v = value(w);
            if (!include_zeros && v.is_zero()) continue;
            out += a.format(w) + "," + v.real().to_string() + "," + v.imag().to_string() + "\n";
        }
    }
    return out;
}

}  // namespace

std::string cumulant_csv(const CumulantTable& table, bool include_zeros) {
    return csv_rows(table.alphabet(), table.degree(), include_zeros, [&](const Word& w) { return table(w); });
}

std::string moment_csv(const MomentTable& mu, bool include_zeros) {
    return csv_rows(mu.alphabet(), mu.degree(), include_zeros, [&](const Word& w) { return mu(w); });
}

}  // namespace bifree
