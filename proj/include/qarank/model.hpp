#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qarank {

// Normalized Q&A records shared by every stage of the pipeline. All types are
// immutable after ingestion; operations are pure functions of inputs + seed.

struct Question {
    std::string id;
    std::string title;
    std::string body_html;
    std::int64_t created_at = 0;  // UTC epoch seconds
    std::optional<std::string> accepted_answer_id;
};

struct Answer {
    std::string id;
    std::string question_id;
    std::string body_html;
    std::int64_t created_at = 0;
    int rating_score = 0;
    bool is_accepted = false;
};

struct Thread {
    Question question;
    std::vector<Answer> answers;  // created_at ascending
};

enum class Provenance { stackexchange_xml, normalized_jsonl, synthetic };

std::string to_string(Provenance p);

struct Dataset {
    std::string name;
    std::vector<Thread> threads;
    Provenance provenance = Provenance::normalized_jsonl;
    bool scores_absent = false;  // no rating data anywhere (Dwolla-style source)
    std::string profile;         // synthetic generator profile, empty otherwise

    std::size_t answer_count() const;
};

// Orders ids so that equal-width numeric ids sort numerically: shorter ids
// first, ties broken lexicographically.
bool shortlex_less(const std::string& a, const std::string& b);

// Sorts threads by question id (shortlex) and answers by (created_at, id).
// Every parser calls this before returning, so row order is canonical.
void normalize_order(Dataset& d);

// Validates the per-thread invariants (at most one accepted answer, answer
// ids matching accepted_answer_id, no answer predating its question).
// Throws DataError on violation.
void validate(const Dataset& d);

struct StatsSummary {
    std::size_t threads = 0;
    std::size_t answers = 0;
    std::size_t accepted = 0;
    std::size_t resolved_threads = 0;
    double resolved_pct = 0.0;       // resolved threads / all threads
    double pos_neg_r = 0.0;          // negatives per positive, 2-decimal rounded
    bool has_ratio = false;          // false when there are no positives
    bool empty = false;

    std::string ratio_string() const;  // "1:4.00" style, "n/a" when undefined
    std::string to_text(const std::string& dataset_name) const;
};

StatsSummary dataset_stats(const Dataset& d);

// A flattened view of every answer in canonical row order. Feature tables,
// folds and scores all index into this.
struct AnswerRef {
    std::size_t thread_index;
    std::size_t answer_index;
};

std::vector<AnswerRef> answer_rows(const Dataset& d);

// Stratified k-fold assignment over answers (the classification instance
// unit). Folds partition all answer rows; per-fold positive counts differ by
// at most one. Deterministic under seed.
std::vector<std::vector<std::size_t>> stratified_split(const Dataset& d, int k,
                                                       std::uint64_t seed);

// Variant that keeps whole threads together (stratified on thread
// resolution). Positive balance is approximate; intended for
// leakage-sensitive studies.
std::vector<std::vector<std::size_t>> stratified_split_by_thread(const Dataset& d, int k,
                                                                 std::uint64_t seed);

// Split a label vector directly; used by tuners and tests that work on bare
// feature tables rather than datasets.
std::vector<std::vector<std::size_t>> stratified_split_labels(const std::vector<std::uint8_t>& labels,
                                                              int k, std::uint64_t seed);

}  // namespace qarank
