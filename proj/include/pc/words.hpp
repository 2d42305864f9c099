#ifndef PC_WORDS_HPP
#define PC_WORDS_HPP

#include <cctype>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pc {

// Group words as letter sequences.  A letter is a generator index with a
// nonzero exponent; the alphabet fixes the spelling (lowercase generator,
// uppercase inverse, optional ^<int>).

struct Letter {
    int sym = 0;
    long long exp = 0;
    friend bool operator==(const Letter& a, const Letter& b) {
        return a.sym == b.sym && a.exp == b.exp;
    }
};
using Word = std::vector<Letter>;

struct SyntaxError : std::invalid_argument {
    explicit SyntaxError(const std::string& w) : std::invalid_argument(w) {}
};

struct Alphabet {
    std::vector<std::string> names; // lowercase spellings, e.g. {"a","t","b"} or {"a1",...}

    int find(const std::string& s) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == s) return static_cast<int>(i);
        return -1;
    }
};

inline const Alphabet& baumslag_alphabet() {
    static const Alphabet a{{"a", "t", "b"}};
    return a;
}
inline const Alphabet& higman_alphabet() {
    static const Alphabet a{{"a1", "a2", "a3", "a4"}};
    return a;
}

// Tokens: <name> or <NAME> (uppercase = inverse), optional ^<int> binding to
// the preceding letter; whitespace optional everywhere.
inline Word parse_word(const std::string& text, const Alphabet& alpha) {
    Word out;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    while (skip_ws(), i < text.size()) {
        if (!std::isalpha(static_cast<unsigned char>(text[i])))
            throw SyntaxError("unexpected character '" + std::string(1, text[i]) + "'");
        bool upper = std::isupper(static_cast<unsigned char>(text[i]));
        std::string name;
        name += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            name += text[i++];
        int sym = alpha.find(name);
        if (sym < 0) throw SyntaxError("unknown generator '" + name + "'");
        long long exp = 1;
        skip_ws();
        if (i < text.size() && text[i] == '^') {
            ++i;
            skip_ws();
            std::size_t start = i;
            if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i == start) throw SyntaxError("'^' needs an integer exponent");
            exp = std::stoll(text.substr(start, i - start));
        }
        if (upper) exp = -exp;
        if (exp != 0) out.push_back({sym, exp});
    }
    return out;
}

inline std::string render_word(const Word& w, const Alphabet& alpha) {
    std::string out;
    for (const Letter& l : w) {
        std::string name = alpha.names[l.sym];
        if (l.exp < 0)
            for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        out += name;
        long long mag = l.exp < 0 ? -l.exp : l.exp;
        if (mag != 1) out += "^" + std::to_string(mag);
        out += " ";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

inline void free_reduce(Word& w) {
    Word out;
    for (const Letter& l : w) {
        if (l.exp == 0) continue;
        if (!out.empty() && out.back().sym == l.sym) {
            out.back().exp += l.exp;
            if (out.back().exp == 0) out.pop_back();
        } else {
            out.push_back(l);
        }
    }
    w = std::move(out);
}

inline Word inverse_word(const Word& w) {
    Word out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->sym, -it->exp});
    return out;
}

inline Word concat(std::initializer_list<Word> parts) {
    Word out;
    for (const Word& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

// ---- named word families ---------------------------------------------------

// T(0) = t, T(n+1) = b T(n) a T(n)^-1 b^-1; T(n) = t^tow(n), length 2^(n+1)-1.
inline Word baumslag_tower_word(int n) {
    Word t{{1, 1}};
    for (int i = 0; i < n; ++i)
        t = concat({{{2, 1}}, t, {{0, 1}}, inverse_word(t), {{2, -1}}});
    return t;
}

// w(p,0) = a_p, w(p,i+1) = w(p+1,i) a_p w(p+1,i)^-1; w(p,n) = a_p^tow(n),
// indices mod 4, length 2^(n+1)-1.
inline Word higman_tower_word(int p, int n) {
    p = ((p % 4) + 4) % 4;
    if (n == 0) return {{p, 1}};
    Word inner = higman_tower_word(p + 1, n - 1);
    return concat({inner, {{p, 1}}, inverse_word(inner)});
}

// group relators as words
inline std::vector<Word> baumslag_relators() {
    // b a b^-1 a b a^-1 b^-1 a^-2  (the relation a^(a^b) = a^2)
    return {parse_word("b a B a b A B A A", baumslag_alphabet())};
}
inline std::vector<Word> higman_relators() {
    // a_p a_{p-1} a_p^-1 a_{p-1}^-2 for p in Z/4Z
    std::vector<Word> out;
    for (int p = 0; p < 4; ++p) {
        int q = (p + 3) % 4;
        out.push_back({{p, 1}, {q, 1}, {p, -1}, {q, -2}});
    }
    return out;
}

enum class GroupName { Baumslag, Higman };

// Freely reduced product of conjugated relators x r^{+-1} x^-1: trivial by
// construction.  Deterministic in the seed.
inline Word gen_trivial_word(GroupName g, std::uint64_t seed, std::size_t target_len) {
    std::mt19937_64 rng(seed);
    const std::vector<Word> rels = g == GroupName::Baumslag ? baumslag_relators() : higman_relators();
    const int nsym = g == GroupName::Baumslag ? 3 : 4;
    Word w;
    while (w.size() < target_len) {
        Word x;
        std::size_t xl = rng() % 4;
        for (std::size_t i = 0; i < xl; ++i)
            x.push_back({static_cast<int>(rng() % nsym), (rng() & 1) ? 1 : -1});
        Word r = rels[rng() % rels.size()];
        if (rng() & 1) r = inverse_word(r);
        Word next = concat({w, x, r, inverse_word(x)});
        free_reduce(next);
        if (next.empty() && !w.empty()) continue; // don't cancel back to nothing
        w = std::move(next);
    }
    return w;
}

} // namespace pc

#endif
