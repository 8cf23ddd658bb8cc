#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace voz {

enum class PhonemeKind { vowel, glide, consonant, silence };

/// One symbol of the fixed 26-entry inventory:
/// vowels a e i o u; glides w j; consonants p b t d k g f s x tS ("ch"),
/// J ("ll/y"), m n N ("enye") l r ("rr") R-tap; markers sil, sp.
/// Symbols are stored as UTF-8 strings (tS = "tʃ", J = "ʝ", N = "ɲ", tap = "ɾ").
struct Phoneme {
    std::string symbol;
    PhonemeKind kind = PhonemeKind::consonant;

    bool operator==(const Phoneme&) const = default;
};

const std::vector<Phoneme>& phoneme_inventory();
bool is_inventory_symbol(std::string_view symbol);
PhonemeKind phoneme_kind(std::string_view symbol);  // throws Error on unknown symbols

/// Phonetic specification of one utterance: a sil-framed phone string plus
/// the index of the first phone of each word.
struct PhoneticSpec {
    std::vector<Phoneme> phones;
    std::vector<std::size_t> word_boundaries;

    /// Whitespace-separated symbols, one utterance per line.
    std::string to_line() const;
    /// Parse a symbol line; word boundaries are recovered from sil/sp markers.
    static PhoneticSpec from_line(const std::string& line);
};

/// Lowercase, expand integer tokens 0..999999 to Spanish words, map sentence
/// punctuation to the pause marker "," and drop the rest. Accented vowels
/// are preserved. Throws Error on tokens it cannot expand ("3.5", roman
/// numerals, characters outside the alphabet).
std::string normalize_text(const std::string& text);

/// Spanish cardinal for 0..999999.
std::string expand_number(uint32_t value);

/// Distinct characters of `text` that the normalizer cannot accept
/// (anything that is not a letter, digit, whitespace or known punctuation),
/// in order of first appearance.
std::string normalizer_alphabet_violations(const std::string& text);

/// Rule-based grapheme-to-phoneme conversion of normalized text
/// (Latin-American conventions: seseo, yeismo, silent h). Output is framed
/// by sil, with sp between words and sil at pause markers.
PhoneticSpec g2p(const std::string& normalized_text);

}  // namespace voz
