#include "voz/textproc.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "voz/error.hpp"

namespace voz {

namespace {

// ---------------------------------------------------------------------------
// UTF-8 helpers. Only the codepoints of the Spanish alphabet plus common
// punctuation are meaningful here; everything else is reported, not guessed.
// ---------------------------------------------------------------------------

std::u32string decode_utf8(const std::string& s) {
    std::u32string out;
    out.reserve(s.size());
    size_t i = 0;
    const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
    while (i < s.size()) {
        const unsigned char b0 = byte(i);
        char32_t cp = 0;
        size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw Error("invalid UTF-8 input");
        }
        if (i + len > s.size()) throw Error("invalid UTF-8 input");
        for (size_t k = 1; k < len; ++k) {
            if ((byte(i + k) & 0xC0) != 0x80) throw Error("invalid UTF-8 input");
            cp = (cp << 6) | (byte(i + k) & 0x3F);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out.push_back(char(cp));
    } else if (cp < 0x800) {
        out.push_back(char(0xC0 | (cp >> 6)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(char(0xE0 | (cp >> 12)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(char(0xF0 | (cp >> 18)));
        out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    }
    return out;
}

std::string encode_utf8(const std::u32string& s) {
    std::string out;
    for (char32_t cp : s) out += encode_utf8(cp);
    return out;
}

// Spanish letters (lowercase forms)
constexpr char32_t kAacute = 0xE1, kEacute = 0xE9, kIacute = 0xED, kOacute = 0xF3,
                   kUacute = 0xFA, kUdier = 0xFC, kEnye = 0xF1;

char32_t fold_case(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    switch (c) {
        case 0xC1: return kAacute;  // A acute
        case 0xC9: return kEacute;
        case 0xCD: return kIacute;
        case 0xD3: return kOacute;
        case 0xDA: return kUacute;
        case 0xDC: return kUdier;
        case 0xD1: return kEnye;
        default: return c;
    }
}

bool is_letter(char32_t c) {
    c = fold_case(c);
    if (c >= U'a' && c <= U'z') return true;
    switch (c) {
        case kAacute:
        case kEacute:
        case kIacute:
        case kOacute:
        case kUacute:
        case kUdier:
        case kEnye: return true;
        default: return false;
    }
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r'; }

// Sentence punctuation becomes the pause marker ","; word-splitting dashes
// act as spaces; the rest of the known punctuation is dropped.
bool is_pause_punct(char32_t c) {
    return c == U'.' || c == U',' || c == U';' || c == U':' || c == U'!' || c == U'?' ||
           c == 0x2026;  // horizontal ellipsis
}
bool is_dash_punct(char32_t c) {
    return c == U'-' || c == 0x2013 || c == 0x2014;  // hyphen, en dash, em dash
}
bool is_drop_punct(char32_t c) {
    switch (c) {
        case U'"':
        case U'\'':
        case U'(':
        case U')':
        case U'[':
        case U']':
        case 0xA1:    // inverted exclamation
        case 0xBF:    // inverted question
        case 0xAB:    // left guillemet
        case 0xBB:    // right guillemet
        case 0x2018:
        case 0x2019:  // single quotes
        case 0x201C:
        case 0x201D:  // double quotes
            return true;
        default: return false;
    }
}
bool is_punct(char32_t c) { return is_pause_punct(c) || is_dash_punct(c) || is_drop_punct(c); }

bool is_known_char(char32_t c) {
    return is_letter(c) || is_digit(c) || is_space(c) || is_punct(c);
}

// ---------------------------------------------------------------------------
// Number expansion
// ---------------------------------------------------------------------------

const char* kOnes[30] = {
    "",          "uno",       "dos",       "tres",        "cuatro",     "cinco",
    "seis",      "siete",     "ocho",      "nueve",       "diez",       "once",
    "doce",      "trece",     "catorce",   "quince",      "dieciséis",  "diecisiete",
    "dieciocho", "diecinueve", "veinte",   "veintiuno",   "veintidós",  "veintitrés",
    "veinticuatro", "veinticinco", "veintiséis", "veintisiete", "veintiocho", "veintinueve"};

const char* kTens[10] = {"",  "",  "", "treinta", "cuarenta", "cincuenta",
                         "sesenta", "setenta", "ochenta", "noventa"};

const char* kHundreds[10] = {"",            "ciento",      "doscientos", "trescientos",
                             "cuatrocientos", "quinientos", "seiscientos", "setecientos",
                             "ochocientos",   "novecientos"};

std::string expand_below_thousand(uint32_t n) {
    std::string out;
    if (n >= 100) {
        if (n == 100) return "cien";
        out = kHundreds[n / 100];
        n %= 100;
        if (n == 0) return out;
        out += ' ';
    }
    if (n < 30) {
        out += kOnes[n];
    } else {
        out += kTens[n / 10];
        if (n % 10) {
            out += " y ";
            out += kOnes[n % 10];
        }
    }
    return out;
}

// "veintiuno" / "... uno" shorten before "mil"
std::string apocope(std::string s) {
    const std::string venti = "veintiuno";
    if (s.size() >= venti.size() && s.compare(s.size() - venti.size(), venti.size(), venti) == 0)
        return s.substr(0, s.size() - venti.size()) + "veintiún";
    const std::string uno = "uno";
    if (s.size() >= uno.size() && s.compare(s.size() - uno.size(), uno.size(), uno) == 0)
        return s.substr(0, s.size() - uno.size()) + "un";
    return s;
}

}  // namespace

std::string expand_number(uint32_t value) {
    if (value > 999999) throw Error("number out of expandable range: " + std::to_string(value));
    if (value == 0) return "cero";
    std::string out;
    const uint32_t thousands = value / 1000;
    const uint32_t rest = value % 1000;
    if (thousands > 0) {
        if (thousands == 1)
            out = "mil";
        else
            out = apocope(expand_below_thousand(thousands)) + " mil";
    }
    if (rest > 0) {
        if (!out.empty()) out += ' ';
        out += expand_below_thousand(rest);
    }
    return out;
}

std::string normalizer_alphabet_violations(const std::string& text) {
    std::u32string seen;
    for (char32_t c : decode_utf8(text)) {
        if (!is_known_char(c) && seen.find(c) == std::u32string::npos) seen.push_back(c);
    }
    return encode_utf8(seen);
}

namespace {

bool is_roman_numeral(const std::u32string& core) {
    if (core.size() < 2) return false;
    for (char32_t c : core) {
        if (c != U'I' && c != U'V' && c != U'X' && c != U'L' && c != U'C' && c != U'D' &&
            c != U'M')
            return false;
    }
    return true;
}

// Normalized fragments for one whitespace-separated raw token. Words and the
// pause marker "," are emitted as separate fragments.
void normalize_token(const std::u32string& tok, std::vector<std::string>& out) {
    const std::string shown = encode_utf8(tok);
    for (char32_t c : tok)
        if (!is_known_char(c)) throw Error("cannot normalize token '" + shown + "'");

    const bool has_digit = std::any_of(tok.begin(), tok.end(), is_digit);
    if (has_digit) {
        // accept only punct* digits+ punct*
        size_t b = 0, e = tok.size();
        while (b < e && is_punct(tok[b])) ++b;
        while (e > b && is_punct(tok[e - 1])) --e;
        if (b == e || !std::all_of(tok.begin() + b, tok.begin() + e, is_digit))
            throw Error("cannot normalize token '" + shown + "'");
        if (e - b > 6) throw Error("cannot normalize token '" + shown + "': number too large");
        uint32_t value = 0;
        for (size_t i = b; i < e; ++i) value = value * 10 + uint32_t(tok[i] - U'0');
        for (size_t i = 0; i < b; ++i)
            if (is_pause_punct(tok[i])) out.push_back(",");
        out.push_back(expand_number(value));
        for (size_t i = e; i < tok.size(); ++i)
            if (is_pause_punct(tok[i])) out.push_back(",");
        return;
    }

    size_t b = 0, e = tok.size();
    while (b < e && is_punct(tok[b])) ++b;
    while (e > b && is_punct(tok[e - 1])) --e;
    if (is_roman_numeral(tok.substr(b, e - b)))
        throw Error("cannot normalize token '" + shown + "': roman numeral");

    for (size_t i = 0; i < b; ++i)
        if (is_pause_punct(tok[i])) out.push_back(",");

    std::u32string word;
    const auto flush_word = [&] {
        if (!word.empty()) {
            out.push_back(encode_utf8(word));
            word.clear();
        }
    };
    for (size_t i = b; i < e; ++i) {
        const char32_t c = tok[i];
        if (is_letter(c)) {
            word.push_back(fold_case(c));
        } else if (is_dash_punct(c)) {
            flush_word();
        } else if (is_pause_punct(c)) {
            flush_word();
            out.push_back(",");
        }  // drop-class punctuation vanishes
    }
    flush_word();

    for (size_t i = e; i < tok.size(); ++i)
        if (is_pause_punct(tok[i])) out.push_back(",");
}

}  // namespace

std::string normalize_text(const std::string& text) {
    const std::u32string u = decode_utf8(text);
    std::vector<std::string> fragments;
    std::u32string tok;
    for (char32_t c : u) {
        if (is_space(c)) {
            if (!tok.empty()) {
                normalize_token(tok, fragments);
                tok.clear();
            }
        } else {
            tok.push_back(c);
        }
    }
    if (!tok.empty()) normalize_token(tok, fragments);

    std::string out;
    bool last_was_pause = false;
    for (const std::string& f : fragments) {
        if (f == ",") {
            if (last_was_pause) continue;
            last_was_pause = true;
        } else {
            last_was_pause = false;
        }
        if (!out.empty()) out += ' ';
        out += f;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phoneme inventory
// ---------------------------------------------------------------------------

const std::vector<Phoneme>& phoneme_inventory() {
    static const std::vector<Phoneme> inv = {
        {"a", PhonemeKind::vowel},     {"e", PhonemeKind::vowel},
        {"i", PhonemeKind::vowel},     {"o", PhonemeKind::vowel},
        {"u", PhonemeKind::vowel},     {"w", PhonemeKind::glide},
        {"j", PhonemeKind::glide},     {"p", PhonemeKind::consonant},
        {"b", PhonemeKind::consonant}, {"t", PhonemeKind::consonant},
        {"d", PhonemeKind::consonant}, {"k", PhonemeKind::consonant},
        {"g", PhonemeKind::consonant}, {"f", PhonemeKind::consonant},
        {"s", PhonemeKind::consonant}, {"x", PhonemeKind::consonant},
        {"tʃ", PhonemeKind::consonant}, {"ʝ", PhonemeKind::consonant},
        {"m", PhonemeKind::consonant}, {"n", PhonemeKind::consonant},
        {"ɲ", PhonemeKind::consonant}, {"l", PhonemeKind::consonant},
        {"r", PhonemeKind::consonant}, {"ɾ", PhonemeKind::consonant},
        {"sil", PhonemeKind::silence}, {"sp", PhonemeKind::silence},
    };
    return inv;
}

bool is_inventory_symbol(std::string_view symbol) {
    const auto& inv = phoneme_inventory();
    return std::any_of(inv.begin(), inv.end(),
                       [&](const Phoneme& p) { return p.symbol == symbol; });
}

PhonemeKind phoneme_kind(std::string_view symbol) {
    for (const Phoneme& p : phoneme_inventory())
        if (p.symbol == symbol) return p.kind;
    throw Error("unknown phoneme symbol '" + std::string(symbol) + "'");
}

std::string PhoneticSpec::to_line() const {
    std::string out;
    for (size_t i = 0; i < phones.size(); ++i) {
        if (i) out += ' ';
        out += phones[i].symbol;
    }
    return out;
}

PhoneticSpec PhoneticSpec::from_line(const std::string& line) {
    PhoneticSpec spec;
    std::istringstream in(line);
    std::string sym;
    while (in >> sym) {
        spec.phones.push_back({sym, phoneme_kind(sym)});
    }
    if (spec.phones.size() < 2 || spec.phones.front().symbol != "sil" ||
        spec.phones.back().symbol != "sil")
        throw Error("phone line must begin and end with sil: '" + line + "'");
    for (size_t i = 1; i + 1 < spec.phones.size(); ++i) {
        const bool marker = spec.phones[i].kind == PhonemeKind::silence;
        const bool prev_marker = spec.phones[i - 1].kind == PhonemeKind::silence;
        if (!marker && prev_marker) spec.word_boundaries.push_back(i);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Grapheme-to-phoneme
// ---------------------------------------------------------------------------

namespace {

struct Slot {
    std::string sym;
    bool no_glide = false;  // written accent on i/u blocks diphthong formation
};

bool is_front_vowel(char32_t c) { return c == U'e' || c == U'i' || c == kEacute || c == kIacute; }

bool is_vowel_letter(char32_t c) {
    switch (c) {
        case U'a':
        case U'e':
        case U'i':
        case U'o':
        case U'u':
        case kAacute:
        case kEacute:
        case kIacute:
        case kOacute:
        case kUacute:
        case kUdier: return true;
        default: return false;
    }
}

bool is_vowel_sym(const std::string& s) {
    return s == "a" || s == "e" || s == "i" || s == "o" || s == "u";
}

std::vector<Slot> word_to_phones(const std::u32string& w) {
    std::vector<Slot> slots;
    const size_t n = w.size();
    const auto at = [&](size_t i) -> char32_t { return i < n ? w[i] : 0; };

    for (size_t i = 0; i < n; ++i) {
        const char32_t c = w[i];
        const char32_t next = at(i + 1);
        switch (c) {
            case U'a':
            case kAacute: slots.push_back({"a"}); break;
            case U'e':
            case kEacute: slots.push_back({"e"}); break;
            case U'o':
            case kOacute: slots.push_back({"o"}); break;
            case U'i': slots.push_back({"i"}); break;
            case kIacute: slots.push_back({"i", true}); break;
            case U'u': slots.push_back({"u"}); break;
            case kUacute: slots.push_back({"u", true}); break;
            case kUdier: slots.push_back({"u"}); break;
            case U'b':
            case U'v': slots.push_back({"b"}); break;
            case U'c':
                if (next == U'h') {
                    slots.push_back({"tʃ"});
                    ++i;
                } else if (is_front_vowel(next)) {
                    slots.push_back({"s"});  // seseo
                } else {
                    slots.push_back({"k"});
                }
                break;
            case U'd': slots.push_back({"d"}); break;
            case U'f': slots.push_back({"f"}); break;
            case U'g':
                if (is_front_vowel(next)) {
                    slots.push_back({"x"});
                } else if (next == U'u' && is_front_vowel(at(i + 2))) {
                    slots.push_back({"g"});  // silent u in gue/gui
                    ++i;
                } else {
                    slots.push_back({"g"});
                }
                break;
            case U'h': break;  // silent
            case U'j': slots.push_back({"x"}); break;
            case U'k': slots.push_back({"k"}); break;
            case U'l':
                if (next == U'l') {
                    slots.push_back({"ʝ"});  // yeismo
                    ++i;
                } else {
                    slots.push_back({"l"});
                }
                break;
            case U'm': slots.push_back({"m"}); break;
            case U'n': slots.push_back({"n"}); break;
            case kEnye: slots.push_back({"ɲ"}); break;
            case U'p': slots.push_back({"p"}); break;
            case U'q':
                slots.push_back({"k"});
                if (next == U'u') ++i;  // silent u
                break;
            case U'r': {
                const char32_t prev = i > 0 ? w[i - 1] : 0;
                if (next == U'r') {
                    slots.push_back({"r"});
                    ++i;
                } else if (i == 0 || prev == U'n' || prev == U'l' || prev == U's') {
                    slots.push_back({"r"});
                } else {
                    slots.push_back({"ɾ"});
                }
                break;
            }
            case U's': slots.push_back({"s"}); break;
            case U't': slots.push_back({"t"}); break;
            case U'w': slots.push_back({"w"}); break;
            case U'x':
                if (i == 0) {
                    slots.push_back({"s"});
                } else if (w[i - 1] == U'e' && is_vowel_letter(next)) {
                    slots.push_back({"k"});
                    slots.push_back({"s"});
                } else {
                    slots.push_back({"x"});
                }
                break;
            case U'y':
                if (is_vowel_letter(next)) {
                    slots.push_back({"ʝ"});
                } else {
                    slots.push_back({"i"});
                }
                break;
            case U'z': slots.push_back({"s"}); break;  // seseo
            default:
                throw Error("unmappable character '" + encode_utf8(c) + "' in word '" +
                            encode_utf8(w) + "'");
        }
    }

    // Unstressed high vowels adjacent to vowels become glides; left-to-right,
    // so in i/u clusters the first one glides.
    for (size_t i = 0; i < slots.size(); ++i) {
        Slot& s = slots[i];
        if (s.no_glide || (s.sym != "i" && s.sym != "u")) continue;
        const bool prev_vowel = i > 0 && is_vowel_sym(slots[i - 1].sym);
        const bool next_vowel = i + 1 < slots.size() && is_vowel_sym(slots[i + 1].sym);
        if (prev_vowel || next_vowel) s.sym = (s.sym == "i") ? "j" : "w";
    }
    return slots;
}

}  // namespace

PhoneticSpec g2p(const std::string& normalized_text) {
    const std::u32string u = decode_utf8(normalized_text);

    // split into word tokens and pause markers
    std::vector<std::u32string> tokens;
    std::u32string cur;
    for (char32_t c : u) {
        if (c == U' ') {
            if (!cur.empty()) tokens.push_back(std::exchange(cur, {}));
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(cur);

    PhoneticSpec spec;
    spec.phones.push_back({"sil", PhonemeKind::silence});

    bool have_word = false;
    bool pause_pending = false;
    for (const std::u32string& tok : tokens) {
        if (tok == U",") {
            pause_pending = true;
            continue;
        }
        if (have_word) {
            const char* sep = pause_pending ? "sil" : "sp";
            spec.phones.push_back({sep, PhonemeKind::silence});
        }
        pause_pending = false;
        spec.word_boundaries.push_back(spec.phones.size());
        for (const Slot& s : word_to_phones(tok))
            spec.phones.push_back({s.sym, phoneme_kind(s.sym)});
        have_word = true;
    }
    spec.phones.push_back({"sil", PhonemeKind::silence});
    return spec;
}

}  // namespace voz
