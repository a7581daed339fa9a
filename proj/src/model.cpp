#include "qarank/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qarank/errors.hpp"
#include "qarank/rng.hpp"

namespace qarank {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::stackexchange_xml: return "stackexchange_xml";
        case Provenance::normalized_jsonl: return "normalized_jsonl";
        case Provenance::synthetic: return "synthetic";
    }
    return "unknown";
}

std::size_t Dataset::answer_count() const {
    std::size_t n = 0;
    for (const auto& t : threads) n += t.answers.size();
    return n;
}

bool shortlex_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

void normalize_order(Dataset& d) {
    for (auto& t : d.threads) {
        std::sort(t.answers.begin(), t.answers.end(), [](const Answer& x, const Answer& y) {
            if (x.created_at != y.created_at) return x.created_at < y.created_at;
            return shortlex_less(x.id, y.id);
        });
    }
    std::sort(d.threads.begin(), d.threads.end(), [](const Thread& x, const Thread& y) {
        return shortlex_less(x.question.id, y.question.id);
    });
}

void validate(const Dataset& d) {
    for (const auto& t : d.threads) {
        int accepted = 0;
        bool accepted_id_seen = !t.question.accepted_answer_id.has_value();
        for (const auto& a : t.answers) {
            if (a.question_id != t.question.id)
                throw DataError("answer " + a.id + " parented to " + a.question_id +
                                " but stored under question " + t.question.id);
            if (a.created_at < t.question.created_at)
                throw DataError("answer " + a.id + " predates its question " + t.question.id);
            if (a.is_accepted) ++accepted;
            if (t.question.accepted_answer_id && a.id == *t.question.accepted_answer_id)
                accepted_id_seen = true;
        }
        if (accepted > 1)
            throw DataError("thread " + t.question.id + " has " + std::to_string(accepted) +
                            " accepted answers");
        if (!accepted_id_seen && !t.answers.empty())
            throw DataError("question " + t.question.id + " accepts unknown answer id " +
                            *t.question.accepted_answer_id);
    }
}

std::string StatsSummary::ratio_string() const {
    if (!has_ratio) return "n/a";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "1:" << pos_neg_r;
    return os.str();
}

std::string StatsSummary::to_text(const std::string& dataset_name) const {
    std::ostringstream os;
    os << "dataset: " << dataset_name << "\n";
    if (empty) {
        os << "empty dataset (no threads)\n";
        return os.str();
    }
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "threads: " << threads << "\n"
       << "answers: " << answers << "\n"
       << "accepted: " << accepted << "\n"
       << "resolved: " << resolved_threads << " (" << (100.0 * resolved_pct) << "%)\n"
       << "pos/neg ratio: " << ratio_string() << "\n";
    return os.str();
}

StatsSummary dataset_stats(const Dataset& d) {
    StatsSummary s;
    s.threads = d.threads.size();
    if (d.threads.empty()) {
        s.empty = true;
        return s;
    }
    for (const auto& t : d.threads) {
        s.answers += t.answers.size();
        bool resolved = false;
        for (const auto& a : t.answers) {
            if (a.is_accepted) {
                ++s.accepted;
                resolved = true;
            }
        }
        if (resolved) ++s.resolved_threads;
    }
    s.resolved_pct = static_cast<double>(s.resolved_threads) / static_cast<double>(s.threads);
    if (s.accepted > 0) {
        const double r = static_cast<double>(s.answers - s.accepted) / static_cast<double>(s.accepted);
        s.pos_neg_r = std::round(r * 100.0) / 100.0;
        s.has_ratio = true;
    }
    return s;
}

std::vector<AnswerRef> answer_rows(const Dataset& d) {
    std::vector<AnswerRef> rows;
    for (std::size_t ti = 0; ti < d.threads.size(); ++ti)
        for (std::size_t ai = 0; ai < d.threads[ti].answers.size(); ++ai)
            rows.push_back({ti, ai});
    return rows;
}

namespace {

std::vector<std::vector<std::size_t>> deal_strata(const std::vector<std::size_t>& positives,
                                                  const std::vector<std::size_t>& negatives,
                                                  int k, std::uint64_t seed) {
    std::vector<std::size_t> pos = positives;
    std::vector<std::size_t> neg = negatives;
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_split_labels(const std::vector<std::uint8_t>& labels,
                                                              int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("stratified split needs k >= 2, got " + std::to_string(k));
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] ? pos : neg).push_back(i);
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k))
        throw DataError("cannot build " + std::to_string(k) + " stratified folds from " +
                        std::to_string(pos.size()) + " positives and " +
                        std::to_string(neg.size()) + " negatives");
    return deal_strata(pos, neg, k, seed);
}

std::vector<std::vector<std::size_t>> stratified_split(const Dataset& d, int k,
                                                       std::uint64_t seed) {
    const auto rows = answer_rows(d);
    std::vector<std::uint8_t> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        labels[i] = d.threads[rows[i].thread_index].answers[rows[i].answer_index].is_accepted ? 1 : 0;
    return stratified_split_labels(labels, k, seed);
}

std::vector<std::vector<std::size_t>> stratified_split_by_thread(const Dataset& d, int k,
                                                                 std::uint64_t seed) {
    if (k < 2) throw ConfigError("stratified split needs k >= 2, got " + std::to_string(k));
    const auto rows = answer_rows(d);
    std::vector<std::vector<std::size_t>> rows_of_thread(d.threads.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows_of_thread[rows[i].thread_index].push_back(i);

    std::vector<std::size_t> resolved, unresolved;
    for (std::size_t ti = 0; ti < d.threads.size(); ++ti) {
        bool has_pos = false;
        for (const auto& a : d.threads[ti].answers)
            if (a.is_accepted) has_pos = true;
        (has_pos ? resolved : unresolved).push_back(ti);
    }
    if (resolved.size() < static_cast<std::size_t>(k))
        throw DataError("cannot build " + std::to_string(k) + " thread folds from " +
                        std::to_string(resolved.size()) + " resolved threads");
    auto thread_folds = deal_strata(resolved, unresolved, k, seed);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < thread_folds.size(); ++f) {
        for (std::size_t ti : thread_folds[f])
            for (std::size_t r : rows_of_thread[ti]) folds[f].push_back(r);
        std::sort(folds[f].begin(), folds[f].end());
    }
    return folds;
}

}  // namespace qarank
