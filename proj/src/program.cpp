#include "tdcount/program.hpp"

#include "tdcount/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <iterator>
#include <set>
#include <sstream>

namespace tdcount {

namespace {

void normalize(std::vector<AtomId>& atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

std::string read_all(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------

std::vector<AtomId> Rule::atoms() const {
    std::vector<AtomId> out;
    out.reserve(head.size() + body_pos.size() + body_neg.size());
    out.insert(out.end(), head.begin(), head.end());
    out.insert(out.end(), body_pos.begin(), body_pos.end());
    out.insert(out.end(), body_neg.begin(), body_neg.end());
    normalize(out);
    return out;
}

Integer MinimizeStatement::weight(AtomId atom, bool value) const {
    auto it = weights.find(Literal{atom, value});
    return it == weights.end() ? Integer(0) : it->second;
}

bool GroundProgram::has_empty_rule() const {
    return std::any_of(rules_.begin(), rules_.end(), [](const Rule& r) { return r.empty(); });
}

std::optional<AtomId> GroundProgram::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string GroundProgram::display_name(AtomId id) const {
    const auto& a = atoms_.at(id);
    return a.name ? *a.name : "_" + std::to_string(id + 1);
}

AtomId ProgramBuilder::atom(std::string_view name) {
    std::string key(name);
    if (auto it = program_.by_name_.find(key); it != program_.by_name_.end()) {
        return it->second;
    }
    auto id = static_cast<AtomId>(program_.atoms_.size());
    program_.atoms_.push_back(Atom{id, key});
    program_.by_name_.emplace(std::move(key), id);
    return id;
}

AtomId ProgramBuilder::add_anonymous_atom() {
    auto id = static_cast<AtomId>(program_.atoms_.size());
    program_.atoms_.push_back(Atom{id, std::nullopt});
    return id;
}

void ProgramBuilder::set_name(AtomId id, std::string name) {
    auto& a = program_.atoms_.at(id);
    if (a.name == name) {
        return;
    }
    if (program_.by_name_.count(name) != 0) {
        throw ParseError("duplicate atom name '" + name + "'");
    }
    if (a.name) {
        program_.by_name_.erase(*a.name);
    }
    program_.by_name_.emplace(name, id);
    a.name = std::move(name);
}

void ProgramBuilder::add_rule(Rule rule) {
    normalize(rule.head);
    normalize(rule.body_pos);
    normalize(rule.body_neg);
    const auto n = program_.atoms_.size();
    for (const auto* part : {&rule.head, &rule.body_pos, &rule.body_neg}) {
        if (!part->empty() && part->back() >= n) {
            throw ParseError("rule references unknown atom " + std::to_string(part->back()));
        }
    }
    program_.rules_.push_back(std::move(rule));
}

void ProgramBuilder::add_minimize(Literal lit, const Integer& weight) {
    if (weight < 0) {
        throw ParseError("negative minimize weight");
    }
    if (lit.atom >= program_.atoms_.size()) {
        throw ParseError("minimize references unknown atom " + std::to_string(lit.atom));
    }
    enable_minimize();
    if (weight == 0) {
        return;
    }
    program_.minimize_->weights[lit] += weight;
}

void ProgramBuilder::enable_minimize() {
    if (!program_.minimize_) {
        program_.minimize_.emplace();
    }
}

GroundProgram ProgramBuilder::build() && { return std::move(program_); }

Rational CnfFormula::weight(int lit) const {
    if (weights) {
        if (auto it = weights->find(lit); it != weights->end()) {
            return it->second;
        }
    }
    return Rational(1);
}

bool CnfFormula::has_empty_clause() const {
    return std::any_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.empty(); });
}

// ---------------------------------------------------------------------------
// Textual ground programs
// ---------------------------------------------------------------------------

namespace {

enum class Tok { Ident, Variable, Number, If, Comma, Bar, Dot, Colon, Semi, LBrace, RBrace, Minimize, End };

struct Token {
    Tok         kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view text)
        : text_(text) {}

    Token next() {
        skip_space();
        Token t{Tok::End, {}, line_, col_};
        if (pos_ >= text_.size()) {
            return t;
        }
        char c = text_[pos_];
        if (std::islower(static_cast<unsigned char>(c))) {
            t.kind = Tok::Ident;
            t.text = word();
        }
        else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Variable;
            t.text = word();
        }
        else if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Tok::Number;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                t.text += advance();
            }
        }
        else if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
            advance();
            advance();
            t.kind = Tok::If;
        }
        else if (c == '#') {
            advance();
            auto w = word();
            if (w != "minimize") {
                throw SyntaxError(t.line, t.column, "unknown directive '#" + w + "'");
            }
            t.kind = Tok::Minimize;
        }
        else {
            advance();
            switch (c) {
                case ',': t.kind = Tok::Comma; break;
                case '|': t.kind = Tok::Bar; break;
                case '.': t.kind = Tok::Dot; break;
                case ':': t.kind = Tok::Colon; break;
                case ';': t.kind = Tok::Semi; break;
                case '{': t.kind = Tok::LBrace; break;
                case '}': t.kind = Tok::RBrace; break;
                default : throw SyntaxError(t.line, t.column, std::string("unexpected character '") + c + "'");
            }
        }
        return t;
    }

private:
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        }
        else {
            ++col_;
        }
        return c;
    }
    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    advance();
                }
            }
            else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            }
            else {
                break;
            }
        }
    }
    std::string word() {
        std::string w;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
                break;
            }
            w += advance();
        }
        return w;
    }

    std::string_view text_;
    std::size_t      pos_  = 0;
    std::size_t      line_ = 1;
    std::size_t      col_  = 1;
};

class TextParser {
public:
    explicit TextParser(std::string_view text)
        : lex_(text) {
        shift();
    }

    GroundProgram parse() && {
        while (cur_.kind != Tok::End) {
            if (cur_.kind == Tok::Minimize) {
                minimize();
            }
            else {
                rule();
            }
        }
        return std::move(builder_).build();
    }

private:
    void shift() { cur_ = lex_.next(); }

    [[noreturn]] void fail(const std::string& what) const {
        if (cur_.kind == Tok::Variable) {
            throw ParseError("variable '" + cur_.text + "' at " + std::to_string(cur_.line) + ":" +
                             std::to_string(cur_.column) + " in ground input");
        }
        throw SyntaxError(cur_.line, cur_.column, what);
    }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) {
            fail(std::string("expected ") + what);
        }
        shift();
    }

    bool at_atom() const { return cur_.kind == Tok::Ident && cur_.text != "not"; }

    AtomId atom() {
        if (!at_atom()) {
            fail("expected atom");
        }
        auto id = builder_.atom(cur_.text);
        shift();
        return id;
    }

    void rule() {
        Rule r;
        if (at_atom()) {
            r.head.push_back(atom());
            while (cur_.kind == Tok::Bar) {
                shift();
                r.head.push_back(atom());
            }
        }
        if (cur_.kind == Tok::If) {
            shift();
            if (cur_.kind != Tok::Dot) {
                literal(r);
                while (cur_.kind == Tok::Comma) {
                    shift();
                    literal(r);
                }
            }
        }
        expect(Tok::Dot, "'.'");
        builder_.add_rule(std::move(r));
    }

    void literal(Rule& r) {
        if (cur_.kind == Tok::Ident && cur_.text == "not") {
            shift();
            r.body_neg.push_back(atom());
        }
        else {
            r.body_pos.push_back(atom());
        }
    }

    void minimize() {
        shift();
        expect(Tok::LBrace, "'{'");
        builder_.enable_minimize();
        if (cur_.kind != Tok::RBrace) {
            weighted_literal();
            while (cur_.kind == Tok::Semi) {
                shift();
                weighted_literal();
            }
        }
        expect(Tok::RBrace, "'}'");
        expect(Tok::Dot, "'.'");
    }

    void weighted_literal() {
        if (cur_.kind != Tok::Number) {
            fail("expected weight");
        }
        Integer w(cur_.text);
        shift();
        expect(Tok::Colon, "':'");
        bool positive = true;
        if (cur_.kind == Tok::Ident && cur_.text == "not") {
            shift();
            positive = false;
        }
        auto a = atom();
        builder_.add_minimize(Literal{a, positive}, w);
    }

    Lexer          lex_;
    Token          cur_{Tok::End, {}, 1, 1};
    ProgramBuilder builder_;
};

} // namespace

GroundProgram parse_ground_program(std::string_view text) { return TextParser(text).parse(); }

GroundProgram parse_ground_program(std::istream& in) { return parse_ground_program(read_all(in)); }

std::string render_ground_program(const GroundProgram& program) {
    std::ostringstream out;
    auto name = [&](AtomId a) { return program.atoms()[a].name ? *program.atoms()[a].name : "x_" + std::to_string(a); };
    for (const auto& r : program.rules()) {
        const char* sep = "";
        for (auto a : r.head) {
            out << std::exchange(sep, " | ") << name(a);
        }
        if (!r.body_pos.empty() || !r.body_neg.empty() || r.head.empty()) {
            out << (r.head.empty() ? ":-" : " :-");
            sep = " ";
            for (auto a : r.body_pos) {
                out << std::exchange(sep, ", ") << name(a);
            }
            for (auto a : r.body_neg) {
                out << std::exchange(sep, ", ") << "not " << name(a);
            }
            if (r.body_pos.empty() && r.body_neg.empty()) {
                out << " ";
            }
        }
        out << ".\n";
    }
    if (const auto& m = program.minimize()) {
        out << "#minimize{";
        const char* sep = " ";
        for (const auto& [lit, w] : m->weights) {
            out << std::exchange(sep, "; ") << w << ":" << (lit.positive ? "" : "not ") << name(lit.atom);
        }
        out << " }.\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// SModels
// ---------------------------------------------------------------------------

namespace {

class SmodelsReader {
public:
    explicit SmodelsReader(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string        tok;
        while (in >> tok) {
            tokens_.push_back(std::move(tok));
        }
    }

    GroundProgram parse() && {
        rules();
        symbols();
        compute();
        return std::move(builder_).build();
    }

private:
    bool done() const { return pos_ >= tokens_.size(); }

    const std::string& word(const char* section) {
        if (done()) {
            throw FormatError(std::string("truncated smodels input in ") + section);
        }
        return tokens_[pos_++];
    }

    long long number(const char* section) {
        const auto& w = word(section);
        long long   v = 0;
        auto [p, ec]  = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || p != w.data() + w.size()) {
            throw FormatError(std::string("expected number in ") + section + ", got '" + w + "'");
        }
        return v;
    }

    AtomId atom(const char* section) {
        auto n = number(section);
        if (n < 1) {
            throw FormatError(std::string("invalid atom number in ") + section);
        }
        auto [it, added] = ids_.try_emplace(n, 0);
        if (added) {
            it->second = builder_.add_anonymous_atom();
        }
        return it->second;
    }

    std::vector<AtomId> atoms(long long n, const char* section) {
        if (n < 0) {
            throw FormatError(std::string("negative count in ") + section);
        }
        std::vector<AtomId> out;
        for (long long i = 0; i < n; ++i) {
            out.push_back(atom(section));
        }
        return out;
    }

    void body(Rule& r, const char* section) {
        auto total = number(section);
        auto neg   = number(section);
        if (neg < 0 || neg > total) {
            throw FormatError(std::string("inconsistent body counts in ") + section);
        }
        r.body_neg = atoms(neg, section);
        r.body_pos = atoms(total - neg, section);
    }

    void rules() {
        constexpr const char* sec = "rules section";
        for (;;) {
            auto type = number(sec);
            switch (type) {
                case 0: return;
                case 1: {
                    Rule r;
                    r.head.push_back(atom(sec));
                    body(r, sec);
                    builder_.add_rule(std::move(r));
                    break;
                }
                case 8: {
                    Rule r;
                    r.head = atoms(number(sec), sec);
                    body(r, sec);
                    builder_.add_rule(std::move(r));
                    break;
                }
                case 6: {
                    if (number(sec) != 0) {
                        throw FormatError("minimize rule must start with '6 0'");
                    }
                    Rule lits;
                    body(lits, sec);
                    builder_.enable_minimize();
                    for (auto a : lits.body_neg) {
                        builder_.add_minimize(Literal{a, false}, Integer(number(sec)));
                    }
                    for (auto a : lits.body_pos) {
                        builder_.add_minimize(Literal{a, true}, Integer(number(sec)));
                    }
                    break;
                }
                case 90:
                    // gringo's preamble marker
                    number(sec);
                    break;
                default: throw UnsupportedRule(static_cast<int>(type));
            }
        }
    }

    void symbols() {
        constexpr const char* sec = "symbol table";
        for (;;) {
            auto id = number(sec);
            if (id == 0) {
                return;
            }
            --pos_;
            auto a = atom(sec);
            builder_.set_name(a, word(sec));
        }
    }

    void compute() {
        constexpr const char* sec = "compute section";
        for (const char* part : {"B+", "B-"}) {
            if (word(sec) != part) {
                throw FormatError(std::string("expected '") + part + "' in compute section");
            }
            for (;;) {
                auto n = number(sec);
                if (n == 0) {
                    break;
                }
                --pos_;
                Rule r;
                (part[1] == '+' ? r.body_neg : r.body_pos).push_back(atom(sec));
                builder_.add_rule(std::move(r));
            }
        }
        // The trailing model count is optional.
        if (!done()) {
            number(sec);
        }
        if (!done()) {
            throw FormatError("trailing data after compute section");
        }
    }

    std::vector<std::string>         tokens_;
    std::size_t                      pos_ = 0;
    std::map<long long, AtomId>      ids_;
    ProgramBuilder                   builder_;
};

} // namespace

GroundProgram parse_smodels(std::string_view text) { return SmodelsReader(text).parse(); }

GroundProgram parse_smodels(std::istream& in) { return parse_smodels(read_all(in)); }

std::string render_smodels(const GroundProgram& program) {
    std::ostringstream out;
    auto num = [](AtomId a) { return a + 1; };
    auto body = [&](const Rule& r) {
        out << (r.body_neg.size() + r.body_pos.size()) << " " << r.body_neg.size();
        for (auto a : r.body_neg) {
            out << " " << num(a);
        }
        for (auto a : r.body_pos) {
            out << " " << num(a);
        }
    };
    // Headless rules need an atom that is never true; reserve one past the program's atoms.
    const auto falsum = static_cast<AtomId>(program.num_atoms());
    bool       needs_falsum = false;
    for (const auto& r : program.rules()) {
        if (r.head.size() == 1) {
            out << "1 " << num(r.head[0]) << " ";
        }
        else if (r.head.empty()) {
            out << "1 " << num(falsum) << " ";
            needs_falsum = true;
        }
        else {
            out << "8 " << r.head.size();
            for (auto a : r.head) {
                out << " " << num(a);
            }
            out << " ";
        }
        body(r);
        out << "\n";
    }
    if (const auto& m = program.minimize(); m && !m->weights.empty()) {
        Rule                 lits;
        std::vector<Integer> neg_w, pos_w;
        for (const auto& [lit, w] : m->weights) {
            (lit.positive ? lits.body_pos : lits.body_neg).push_back(lit.atom);
            (lit.positive ? pos_w : neg_w).push_back(w);
        }
        out << "6 0 ";
        body(lits);
        for (const auto& w : neg_w) {
            out << " " << w;
        }
        for (const auto& w : pos_w) {
            out << " " << w;
        }
        out << "\n";
    }
    out << "0\n";
    for (const auto& a : program.atoms()) {
        if (a.name) {
            out << num(a.id) << " " << *a.name << "\n";
        }
    }
    out << "0\nB+\n0\nB-\n";
    if (needs_falsum) {
        out << num(falsum) << "\n";
    }
    out << "0\n1\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// DIMACS
// ---------------------------------------------------------------------------

namespace {

int parse_int(std::string_view w, std::size_t line, std::size_t col) {
    int v        = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) {
        throw SyntaxError(line, col, "expected integer, got '" + std::string(w) + "'");
    }
    return v;
}

Rational parse_weight(std::string_view w, std::size_t line) {
    auto bad = [&] { return SyntaxError(line, 1, "invalid weight '" + std::string(w) + "'"); };
    if (w.empty()) {
        throw bad();
    }
    auto digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if (auto slash = w.find('/'); slash != std::string_view::npos) {
        auto n = w.substr(0, slash), d = w.substr(slash + 1);
        if (!digits(n) || !digits(d) || Integer(std::string(d)) == 0) {
            throw bad();
        }
        return Rational(Integer(std::string(n)), Integer(std::string(d)));
    }
    if (auto dot = w.find('.'); dot != std::string_view::npos) {
        auto ip = w.substr(0, dot), fp = w.substr(dot + 1);
        if ((!ip.empty() && !digits(ip)) || (!fp.empty() && !digits(fp)) || (ip.empty() && fp.empty())) {
            throw bad();
        }
        Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(fp.size()));
        Integer value = Integer(ip.empty() ? "0" : std::string(ip)) * scale + Integer(fp.empty() ? "0" : std::string(fp));
        return Rational(value, scale);
    }
    if (!digits(w)) {
        throw bad();
    }
    return Rational(Integer(std::string(w)));
}

} // namespace

CnfFormula parse_dimacs(std::string_view text) {
    CnfFormula          f;
    bool                header = false;
    long long           declared_clauses = 0;
    std::size_t         found_clauses = 0;
    std::vector<int>    clause;
    std::size_t         line_no = 0;

    auto finish_clause = [&] {
        ++found_clauses;
        std::sort(clause.begin(), clause.end());
        clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
        bool tautology = false;
        for (auto l : clause) {
            if (l > 0 && std::binary_search(clause.begin(), clause.end(), -l)) {
                tautology = true;
            }
        }
        if (!tautology) {
            f.clauses.push_back(std::move(clause));
        }
        clause.clear();
    };
    auto check_var = [&](int lit) {
        auto v = static_cast<std::size_t>(lit < 0 ? -static_cast<long long>(lit) : lit);
        if (v > f.num_vars) {
            throw HeaderMismatch("literal " + std::to_string(lit) + " exceeds declared variable count " +
                                 std::to_string(f.num_vars));
        }
    };

    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        start     = end + 1;
        ++line_no;

        std::vector<std::string_view> words;
        std::vector<std::size_t>      cols;
        for (std::size_t i = 0; i < line.size();) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
            }
            auto j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
                ++j;
            }
            if (j > i) {
                words.push_back(line.substr(i, j - i));
                cols.push_back(i + 1);
            }
            i = j;
        }
        if (words.empty() || words[0] == "c" || words[0][0] == 'c') {
            continue;
        }
        if (words[0] == "%") {
            break;
        }
        if (words[0] == "p") {
            if (header) {
                throw SyntaxError(line_no, 1, "duplicate problem line");
            }
            if (words.size() != 4 || words[1] != "cnf") {
                throw SyntaxError(line_no, 1, "expected 'p cnf <vars> <clauses>'");
            }
            auto nv = parse_int(words[2], line_no, cols[2]);
            auto nc = parse_int(words[3], line_no, cols[3]);
            if (nv < 0 || nc < 0) {
                throw SyntaxError(line_no, 1, "negative count in problem line");
            }
            f.num_vars       = static_cast<std::size_t>(nv);
            declared_clauses = nc;
            header           = true;
            continue;
        }
        if (!header) {
            throw SyntaxError(line_no, 1, "clause or weight before problem line");
        }
        if (words[0] == "w") {
            if (words.size() != 4 || words[3] != "0") {
                throw SyntaxError(line_no, 1, "expected 'w <lit> <weight> 0'");
            }
            auto lit = parse_int(words[1], line_no, cols[1]);
            if (lit == 0) {
                throw SyntaxError(line_no, cols[1], "weight for literal 0");
            }
            check_var(lit);
            if (!f.weights) {
                f.weights.emplace();
            }
            (*f.weights)[lit] = parse_weight(words[2], line_no);
            continue;
        }
        for (std::size_t i = 0; i < words.size(); ++i) {
            auto lit = parse_int(words[i], line_no, cols[i]);
            if (lit == 0) {
                finish_clause();
            }
            else {
                check_var(lit);
                clause.push_back(lit);
            }
        }
    }
    if (!header) {
        throw SyntaxError(line_no, 1, "missing problem line");
    }
    if (!clause.empty()) {
        finish_clause();
    }
    if (static_cast<long long>(found_clauses) != declared_clauses) {
        throw HeaderMismatch(std::to_string(found_clauses) + " clauses found, " + std::to_string(declared_clauses) +
                             " declared");
    }
    return f;
}

CnfFormula parse_dimacs(std::istream& in) { return parse_dimacs(read_all(in)); }

} // namespace tdcount
