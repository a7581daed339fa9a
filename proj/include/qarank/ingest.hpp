#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qarank/model.hpp"

namespace qarank {

// Timestamps are UTC, second precision; fractional parts are truncated.
// Accepted forms: YYYY-MM-DDThh:mm:ss, optionally ".fff" and a trailing 'Z'.
std::int64_t parse_timestamp(const std::string& s);
std::string format_timestamp(std::int64_t epoch_seconds);

struct IngestReport {
    std::size_t orphan_answers_dropped = 0;   // parent question never seen
    std::size_t time_violations_dropped = 0;  // answer predating its question
    std::size_t ignored_rows = 0;             // post types other than 1/2

    bool clean() const {
        return orphan_answers_dropped == 0 && time_violations_dropped == 0;
    }
};

// Stack Exchange Posts.xml dialect: <row .../> elements with Id, PostTypeId,
// ParentId, AcceptedAnswerId, CreationDate, Score, Title, Body attributes.
// The stream is consumed row by row through a fixed-size buffer; malformed
// markup raises DataError carrying the byte offset.
Dataset parse_stackexchange_xml(std::istream& in, const std::string& name,
                                IngestReport* report = nullptr);

// Normalized JSONL: a {"schema":1,...} header line, then one object per line
// with type "question" or "answer". Duplicate ids are an error; answers
// pointing at unknown questions are dropped and counted.
Dataset parse_normalized_jsonl(std::istream& in, const std::string& name,
                               IngestReport* report = nullptr);

// Canonical serialization of the normalized JSONL form. parse(serialize(d))
// round-trips exactly.
void serialize_normalized_jsonl(const Dataset& d, std::ostream& out);

Dataset load_dataset_file(const std::string& path, IngestReport* report = nullptr);
void save_dataset_file(const Dataset& d, const std::string& path);

}  // namespace qarank
