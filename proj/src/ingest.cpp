#include "qarank/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "qarank/errors.hpp"

namespace qarank {

namespace {

// days since 1970-01-01 for a civil date (proleptic Gregorian)
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y += m <= 2;
}

int parse_digits(const std::string& s, std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            throw DataError("bad timestamp: " + s);
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

std::int64_t parse_timestamp(const std::string& s) {
    // YYYY-MM-DDThh:mm:ss[.fff][Z]
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':')
        throw DataError("bad timestamp: " + s);
    const int y = parse_digits(s, 0, 4);
    const int mo = parse_digits(s, 5, 2);
    const int d = parse_digits(s, 8, 2);
    const int h = parse_digits(s, 11, 2);
    const int mi = parse_digits(s, 14, 2);
    const int se = parse_digits(s, 17, 2);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
        throw DataError("bad timestamp: " + s);
    std::size_t rest = 19;
    if (rest < s.size() && s[rest] == '.') {
        ++rest;
        while (rest < s.size() && std::isdigit(static_cast<unsigned char>(s[rest]))) ++rest;
    }
    if (rest < s.size() && s[rest] == 'Z') ++rest;
    if (rest != s.size()) throw DataError("bad timestamp: " + s);
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_timestamp(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    int mo, d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02lld:%02lld:%02lld",
                  static_cast<long long>(y), mo, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60));
    return buf;
}

namespace {

std::string decode_xml_attr(const std::string& raw, std::size_t offset) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
        if (raw[i] != '&') {
            out.push_back(raw[i]);
            ++i;
            continue;
        }
        const std::size_t semi = raw.find(';', i + 1);
        if (semi == std::string::npos)
            throw DataError("malformed XML near byte " + std::to_string(offset + i) +
                            ": unterminated entity");
        const std::string body = raw.substr(i + 1, semi - i - 1);
        if (body == "lt") out.push_back('<');
        else if (body == "gt") out.push_back('>');
        else if (body == "amp") out.push_back('&');
        else if (body == "quot") out.push_back('"');
        else if (body == "apos") out.push_back('\'');
        else if (!body.empty() && body[0] == '#') {
            std::uint32_t cp = 0;
            std::size_t j = 1;
            int base = 10;
            if (j < body.size() && (body[j] == 'x' || body[j] == 'X')) {
                base = 16;
                ++j;
            }
            if (j >= body.size())
                throw DataError("malformed XML near byte " + std::to_string(offset + i) +
                                ": bad character reference");
            for (; j < body.size(); ++j) {
                const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(body[j])));
                int digit;
                if (c >= '0' && c <= '9') digit = c - '0';
                else if (base == 16 && c >= 'a' && c <= 'f') digit = c - 'a' + 10;
                else
                    throw DataError("malformed XML near byte " + std::to_string(offset + i) +
                                    ": bad character reference");
                cp = cp * static_cast<std::uint32_t>(base) + static_cast<std::uint32_t>(digit);
            }
            if (cp < 0x80) {
                out.push_back(static_cast<char>(cp));
            } else if (cp < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else if (cp < 0x10000) {
                out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            }
        } else {
            throw DataError("malformed XML near byte " + std::to_string(offset + i) +
                            ": unknown entity &" + body + ";");
        }
        i = semi + 1;
    }
    return out;
}

// Pulls attributes out of one "<row .../>" element body (the text between
// "<row" and "/>").
std::unordered_map<std::string, std::string> parse_attributes(const std::string& body,
                                                              std::size_t offset) {
    std::unordered_map<std::string, std::string> attrs;
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        if (i >= body.size()) break;
        std::size_t name_start = i;
        while (i < body.size() && body[i] != '=' && !std::isspace(static_cast<unsigned char>(body[i])))
            ++i;
        const std::string name = body.substr(name_start, i - name_start);
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        if (i >= body.size() || body[i] != '=')
            throw DataError("malformed XML near byte " + std::to_string(offset + name_start) +
                            ": attribute '" + name + "' has no value");
        ++i;
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        if (i >= body.size() || (body[i] != '"' && body[i] != '\''))
            throw DataError("malformed XML near byte " + std::to_string(offset + i) +
                            ": attribute '" + name + "' value is not quoted");
        const char quote = body[i];
        ++i;
        const std::size_t val_start = i;
        while (i < body.size() && body[i] != quote) ++i;
        if (i >= body.size())
            throw DataError("malformed XML near byte " + std::to_string(offset + val_start) +
                            ": unterminated attribute value for '" + name + "'");
        attrs[name] = decode_xml_attr(body.substr(val_start, i - val_start), offset + val_start);
        ++i;
    }
    return attrs;
}

struct PendingAnswer {
    Answer answer;
};

}  // namespace

Dataset parse_stackexchange_xml(std::istream& in, const std::string& name, IngestReport* report) {
    Dataset d;
    d.name = name;
    d.provenance = Provenance::stackexchange_xml;
    IngestReport local;
    IngestReport& rep = report ? *report : local;

    std::unordered_map<std::string, std::size_t> thread_of_question;
    std::vector<PendingAnswer> pending;

    std::string window;           // unconsumed tail of the stream
    std::size_t window_base = 0;  // byte offset of window[0]
    char buf[65536];
    bool eof = false;
    bool any_score = false;

    const auto take_row = [&](const std::string& row_body, std::size_t offset) {
        auto attrs = parse_attributes(row_body, offset);
        const auto get = [&](const char* key) -> const std::string* {
            auto it = attrs.find(key);
            return it == attrs.end() ? nullptr : &it->second;
        };
        const std::string* id = get("Id");
        const std::string* type = get("PostTypeId");
        if (!id || !type)
            throw DataError("malformed XML near byte " + std::to_string(offset) +
                            ": row missing Id or PostTypeId");
        if (*type == "1") {
            Question q;
            q.id = *id;
            if (const auto* t = get("Title")) q.title = *t;
            if (const auto* b = get("Body")) q.body_html = *b;
            if (const auto* c = get("CreationDate")) q.created_at = parse_timestamp(*c);
            if (const auto* a = get("AcceptedAnswerId")) q.accepted_answer_id = *a;
            if (thread_of_question.count(q.id))
                throw DataError("duplicate question id " + q.id);
            thread_of_question[q.id] = d.threads.size();
            d.threads.push_back(Thread{std::move(q), {}});
        } else if (*type == "2") {
            Answer a;
            a.id = *id;
            if (const auto* p = get("ParentId")) a.question_id = *p;
            if (const auto* b = get("Body")) a.body_html = *b;
            if (const auto* c = get("CreationDate")) a.created_at = parse_timestamp(*c);
            if (const auto* s = get("Score")) {
                a.rating_score = std::stoi(*s);
                any_score = true;
            }
            pending.push_back(PendingAnswer{std::move(a)});
        } else {
            ++rep.ignored_rows;
        }
    };

    // finds the row's closing '>' honouring quoted attribute values;
    // returns npos when more bytes are needed
    const auto find_row_end = [&](std::size_t from) -> std::size_t {
        char quote = 0;
        for (std::size_t i = from; i < window.size(); ++i) {
            const char c = window[i];
            if (quote) {
                if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                return i;
            }
        }
        return std::string::npos;
    };

    while (true) {
        if (!eof) {
            in.read(buf, sizeof(buf));
            const std::streamsize got = in.gcount();
            if (got > 0) window.append(buf, static_cast<std::size_t>(got));
            if (got < static_cast<std::streamsize>(sizeof(buf))) eof = true;
        }
        const std::size_t lt = window.find("<row");
        if (lt == std::string::npos) {
            if (eof) break;
            // keep only a short tail that could still start a row
            if (window.size() > 8) {
                window_base += window.size() - 8;
                window.erase(0, window.size() - 8);
            }
            continue;
        }
        if (lt + 4 >= window.size()) {
            if (eof)
                throw DataError("malformed XML near byte " + std::to_string(window_base + lt) +
                                ": unterminated <row> element");
            continue;
        }
        const char after = window[lt + 4];
        if (!std::isspace(static_cast<unsigned char>(after)) && after != '/' && after != '>') {
            window_base += lt + 4;
            window.erase(0, lt + 4);  // some other element name, skip it
            continue;
        }
        const std::size_t end = find_row_end(lt + 4);
        if (end == std::string::npos) {
            if (eof)
                throw DataError("malformed XML near byte " + std::to_string(window_base + lt) +
                                ": unterminated <row> element");
            continue;  // need more bytes
        }
        std::size_t body_end = end;
        if (body_end > lt && window[body_end - 1] == '/') --body_end;
        take_row(window.substr(lt + 4, body_end - (lt + 4)), window_base + lt + 4);
        window_base += end + 1;
        window.erase(0, end + 1);
    }

    for (auto& p : pending) {
        auto it = thread_of_question.find(p.answer.question_id);
        if (it == thread_of_question.end()) {
            ++rep.orphan_answers_dropped;
            continue;
        }
        Thread& t = d.threads[it->second];
        if (p.answer.created_at < t.question.created_at) {
            ++rep.time_violations_dropped;
            continue;
        }
        p.answer.is_accepted = t.question.accepted_answer_id &&
                               *t.question.accepted_answer_id == p.answer.id;
        t.answers.push_back(std::move(p.answer));
    }
    // accepted ids pointing at dropped/missing answers are cleared
    for (auto& t : d.threads) {
        if (!t.question.accepted_answer_id) continue;
        const bool found = std::any_of(t.answers.begin(), t.answers.end(),
                                       [&](const Answer& a) { return a.is_accepted; });
        if (!found) t.question.accepted_answer_id.reset();
    }
    d.scores_absent = !any_score && !pending.empty();
    normalize_order(d);
    validate(d);
    return d;
}

namespace {

using nlohmann::json;

json parse_json_line(const std::string& line, std::size_t lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        throw DataError("line " + std::to_string(lineno) + ": invalid JSON");
    if (!j.is_object())
        throw DataError("line " + std::to_string(lineno) + ": expected a JSON object");
    return j;
}

std::string require_string(const json& j, const char* key, std::size_t lineno) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw DataError("line " + std::to_string(lineno) + ": missing string field '" + key + "'");
    return it->get<std::string>();
}

}  // namespace

Dataset parse_normalized_jsonl(std::istream& in, const std::string& name, IngestReport* report) {
    Dataset d;
    d.name = name;
    d.provenance = Provenance::normalized_jsonl;
    IngestReport local;
    IngestReport& rep = report ? *report : local;

    std::unordered_map<std::string, std::size_t> thread_of_question;
    std::unordered_set<std::string> seen_ids;
    std::vector<Answer> pending;
    bool any_score = false;
    bool any_answer = false;
    bool header_seen = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = parse_json_line(line, lineno);
        if (!header_seen) {
            auto it = j.find("schema");
            if (it == j.end() || !it->is_number_integer() || it->get<int>() != 1)
                throw DataError("line " + std::to_string(lineno) +
                                ": expected a {\"schema\":1} header line");
            if (j.contains("name") && j["name"].is_string())
                d.name = j["name"].get<std::string>();
            if (j.contains("provenance") && j["provenance"].is_string() &&
                j["provenance"].get<std::string>() == "synthetic")
                d.provenance = Provenance::synthetic;
            if (j.contains("profile") && j["profile"].is_string())
                d.profile = j["profile"].get<std::string>();
            header_seen = true;
            continue;
        }
        const std::string type = require_string(j, "type", lineno);
        const std::string id = require_string(j, "id", lineno);
        if (!seen_ids.insert(id).second)
            throw DataError("line " + std::to_string(lineno) + ": duplicate id " + id);
        if (type == "question") {
            Question q;
            q.id = id;
            if (j.contains("title") && j["title"].is_string()) q.title = j["title"].get<std::string>();
            q.body_html = require_string(j, "body", lineno);
            q.created_at = parse_timestamp(require_string(j, "created_at", lineno));
            if (j.contains("accepted_answer_id") && j["accepted_answer_id"].is_string())
                q.accepted_answer_id = j["accepted_answer_id"].get<std::string>();
            thread_of_question[q.id] = d.threads.size();
            d.threads.push_back(Thread{std::move(q), {}});
        } else if (type == "answer") {
            any_answer = true;
            Answer a;
            a.id = id;
            a.question_id = require_string(j, "parent_id", lineno);
            a.body_html = require_string(j, "body", lineno);
            a.created_at = parse_timestamp(require_string(j, "created_at", lineno));
            if (j.contains("score") && j["score"].is_number_integer()) {
                a.rating_score = j["score"].get<int>();
                any_score = true;
            }
            pending.push_back(std::move(a));
        } else {
            throw DataError("line " + std::to_string(lineno) + ": unknown type '" + type + "'");
        }
    }
    if (!header_seen && lineno > 0)
        throw DataError("missing {\"schema\":1} header line");

    for (auto& a : pending) {
        auto it = thread_of_question.find(a.question_id);
        if (it == thread_of_question.end()) {
            ++rep.orphan_answers_dropped;
            continue;
        }
        Thread& t = d.threads[it->second];
        if (a.created_at < t.question.created_at) {
            ++rep.time_violations_dropped;
            continue;
        }
        a.is_accepted = t.question.accepted_answer_id && *t.question.accepted_answer_id == a.id;
        t.answers.push_back(std::move(a));
    }
    for (auto& t : d.threads) {
        if (!t.question.accepted_answer_id) continue;
        const bool found = std::any_of(t.answers.begin(), t.answers.end(),
                                       [&](const Answer& a) { return a.is_accepted; });
        if (!found) t.question.accepted_answer_id.reset();
    }
    d.scores_absent = any_answer && !any_score;
    normalize_order(d);
    validate(d);
    return d;
}

void serialize_normalized_jsonl(const Dataset& d, std::ostream& out) {
    json header;
    header["schema"] = 1;
    header["name"] = d.name;
    header["provenance"] = to_string(d.provenance);
    if (!d.profile.empty()) header["profile"] = d.profile;
    if (d.scores_absent) header["scores_absent"] = true;
    out << header.dump() << "\n";
    for (const auto& t : d.threads) {
        json q;
        q["type"] = "question";
        q["id"] = t.question.id;
        if (!t.question.title.empty()) q["title"] = t.question.title;
        q["body"] = t.question.body_html;
        q["created_at"] = format_timestamp(t.question.created_at);
        if (t.question.accepted_answer_id) q["accepted_answer_id"] = *t.question.accepted_answer_id;
        out << q.dump() << "\n";
        for (const auto& a : t.answers) {
            json aj;
            aj["type"] = "answer";
            aj["id"] = a.id;
            aj["parent_id"] = a.question_id;
            aj["body"] = a.body_html;
            aj["created_at"] = format_timestamp(a.created_at);
            if (!d.scores_absent) aj["score"] = a.rating_score;
            out << aj.dump() << "\n";
        }
    }
}

Dataset load_dataset_file(const std::string& path, IngestReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::string base = path;
    const std::size_t slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    const std::size_t dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    return parse_normalized_jsonl(in, base, report);
}

void save_dataset_file(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset file: " + path);
    serialize_normalized_jsonl(d, out);
}

}  // namespace qarank
