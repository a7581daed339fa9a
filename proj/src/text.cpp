#include "qarank/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

namespace qarank {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '\''; }

char lower(unsigned char c) { return static_cast<char>(std::tolower(c)); }

bool iequal_at(const std::string& s, std::size_t pos, const char* lit) {
    for (std::size_t i = 0; lit[i]; ++i) {
        if (pos + i >= s.size() || lower(static_cast<unsigned char>(s[pos + i])) != lit[i]) return false;
    }
    return true;
}

// Matches "<name" where name is a full tag name (next char is '>', '/',
// whitespace or an attribute boundary).
bool tag_open_at(const std::string& s, std::size_t pos, const char* name) {
    if (s[pos] != '<' || !iequal_at(s, pos + 1, name)) return false;
    const std::size_t after = pos + 1 + std::char_traits<char>::length(name);
    if (after >= s.size()) return true;  // unterminated tag at EOF
    const unsigned char c = static_cast<unsigned char>(s[after]);
    return c == '>' || c == '/' || std::isspace(c);
}

bool tag_close_at(const std::string& s, std::size_t pos, const char* name) {
    if (s[pos] != '<' || pos + 1 >= s.size() || s[pos + 1] != '/') return false;
    if (!iequal_at(s, pos + 2, name)) return false;
    const std::size_t after = pos + 2 + std::char_traits<char>::length(name);
    if (after >= s.size()) return true;
    const unsigned char c = static_cast<unsigned char>(s[after]);
    return c == '>' || std::isspace(c);
}

std::size_t end_of_tag(const std::string& s, std::size_t lt) {
    const std::size_t gt = s.find('>', lt);
    return gt == std::string::npos ? s.size() : gt + 1;
}

// Removes whole <code>..</code> and <pre>..</pre> spans. A lone opening tag
// with no closing counterpart is left for the generic tag stripper.
std::string remove_code_spans(const std::string& s, int& removed) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '<') {
            const char* name = nullptr;
            if (tag_open_at(s, i, "code")) name = "code";
            else if (tag_open_at(s, i, "pre")) name = "pre";
            if (name) {
                std::size_t scan = end_of_tag(s, i);
                std::size_t close = std::string::npos;
                while (scan < s.size()) {
                    if (s[scan] == '<' && tag_close_at(s, scan, name)) {
                        close = scan;
                        break;
                    }
                    ++scan;
                }
                if (close != std::string::npos) {
                    i = end_of_tag(s, close);
                    ++removed;
                    continue;
                }
            }
        }
        out.push_back(s[i]);
        ++i;
    }
    return out;
}

bool starts_tag(const std::string& s, std::size_t i) {
    if (s[i] != '<' || i + 1 >= s.size()) return false;
    const unsigned char next = static_cast<unsigned char>(s[i + 1]);
    return std::isalpha(next) || next == '/' || next == '!' || next == '?';
}

std::string strip_tags(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (starts_tag(s, i)) {
            i = end_of_tag(s, i);  // drops to EOF when the tag never closes
            continue;
        }
        out.push_back(s[i]);
        ++i;
    }
    return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

struct NamedEntity {
    const char* name;
    const char* value;
};

// nbsp normalizes to a plain space so word counting stays byte-oriented.
constexpr NamedEntity kEntities[] = {
    {"lt", "<"}, {"gt", ">"}, {"amp", "&"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "},
};

// Single left-to-right pass; unknown entities pass through literally.
std::string decode_entities(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        const std::size_t semi = s.find(';', i + 1);
        if (semi == std::string::npos || semi - i > 12) {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        const std::string body = s.substr(i + 1, semi - i - 1);
        bool decoded = false;
        if (!body.empty() && body[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = body.size() > 1;
            if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
                for (std::size_t j = 2; j < body.size() && ok; ++j) {
                    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(body[j])));
                    if (c >= '0' && c <= '9') cp = cp * 16 + static_cast<std::uint32_t>(c - '0');
                    else if (c >= 'a' && c <= 'f') cp = cp * 16 + static_cast<std::uint32_t>(c - 'a' + 10);
                    else ok = false;
                    if (cp > 0x10FFFF) ok = false;
                }
            } else {
                for (std::size_t j = 1; j < body.size() && ok; ++j) {
                    if (body[j] < '0' || body[j] > '9') ok = false;
                    else cp = cp * 10 + static_cast<std::uint32_t>(body[j] - '0');
                    if (cp > 0x10FFFF) ok = false;
                }
            }
            if (ok) {
                append_utf8(out, cp);
                decoded = true;
            }
        } else {
            std::string lower_body;
            for (char c : body) lower_body.push_back(lower(static_cast<unsigned char>(c)));
            for (const auto& e : kEntities) {
                if (lower_body == e.name) {
                    out += e.value;
                    decoded = true;
                    break;
                }
            }
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    return out;
}

bool has_hyperlink(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (iequal_at(s, i, "http://") || iequal_at(s, i, "https://")) return true;
        if (tag_open_at(s, i, "a")) {
            const std::size_t gt = s.find('>', i);
            const std::size_t end = gt == std::string::npos ? s.size() : gt;
            for (std::size_t j = i; j + 4 <= end; ++j)
                if (iequal_at(s, j, "href")) return true;
        }
    }
    return false;
}

}  // namespace

CleanText clean_body(const std::string& body_html) {
    CleanText out;
    out.contained_hyperlink = has_hyperlink(body_html);
    std::string cur = body_html;
    // Iterate to a fixed point: each productive pass strictly shrinks the
    // text, so this terminates. Real forum bodies settle in one pass.
    for (;;) {
        std::string next = decode_entities(strip_tags(remove_code_spans(cur, out.stripped_code_blocks)));
        if (next == cur) break;
        cur = std::move(next);
    }
    out.plain_text = std::move(cur);
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (is_word_char(c)) {
            cur.push_back(lower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

SentenceStats split_sentences(const std::string& text) {
    SentenceStats stats;
    std::size_t start = 0;
    const auto flush = [&](std::size_t end) {
        // trim outer whitespace; keep the terminator inside the span
        std::size_t lo = start, hi = end;
        while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
        while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
        bool has_word = false;
        for (std::size_t i = lo; i < hi && !has_word; ++i)
            if (is_word_char(static_cast<unsigned char>(text[i]))) has_word = true;
        if (has_word) {
            ++stats.n_sentences;
            stats.longest_chars = std::max(stats.longest_chars, static_cast<int>(hi - lo));
        }
        start = end;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            const bool at_end = i + 1 == text.size();
            const bool breaks = at_end || std::isspace(static_cast<unsigned char>(text[i + 1]));
            const bool more_terminators =
                i + 1 < text.size() && (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?');
            if (breaks && !more_terminators) flush(i + 1);
        }
    }
    if (start < text.size()) flush(text.size());
    return stats;
}

int count_syllables(const std::string& word) {
    const auto is_vowel = [](unsigned char c) {
        const char l = static_cast<char>(std::tolower(c));
        return l == 'a' || l == 'e' || l == 'i' || l == 'o' || l == 'u' || l == 'y';
    };
    int groups = 0;
    bool in_group = false;
    for (unsigned char c : word) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    const std::size_t n = word.size();
    if (n >= 2 && std::tolower(static_cast<unsigned char>(word[n - 1])) == 'e' &&
        !is_vowel(static_cast<unsigned char>(word[n - 2]))) {
        const bool cons_le = n >= 3 && std::tolower(static_cast<unsigned char>(word[n - 2])) == 'l' &&
                             !is_vowel(static_cast<unsigned char>(word[n - 3]));
        if (!cons_le) --groups;
    }
    return std::max(groups, 1);
}

}  // namespace qarank
