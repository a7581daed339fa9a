#pragma once

#include <string>
#include <vector>

namespace qarank {

// Markup-free view of a post body. contained_hyperlink is decided on the raw
// body, before anything is stripped.
struct CleanText {
    std::string plain_text;
    bool contained_hyperlink = false;
    int stripped_code_blocks = 0;
};

// Removes <code>/<pre> spans wholesale, strips remaining tags with a
// forgiving tokenizer, and decodes standard named + numeric entities.
// Stripping and decoding repeat until the text stops changing, so a body
// cannot smuggle markup through layered entity encoding; this also makes the
// operation idempotent on its own output.
CleanText clean_body(const std::string& body_html);

// Lowercased tokens: maximal runs of letters, digits and apostrophes.
std::vector<std::string> tokenize(const std::string& text);

struct SentenceStats {
    int n_sentences = 0;
    int longest_chars = 0;  // includes the terminator, trimmed of outer whitespace
};

// Sentences end at '.', '!' or '?' followed by whitespace or end of text.
// Runs of words with no terminator count as one sentence; spans with no words
// count as none.
SentenceStats split_sentences(const std::string& text);

// Vowel-group heuristic: aeiouy groups, minus a terminal silent 'e' (kept for
// consonant+"le" endings), minimum one per word.
int count_syllables(const std::string& word);

}  // namespace qarank
