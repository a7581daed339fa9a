#include "qarank/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qarank/errors.hpp"

namespace qarank {

void VocabularyModel::add_tokens(const std::map<std::string, int>& counts) {
    for (const auto& [tok, c] : counts) {
        counts_[tok] += c;
        total_ += c;
    }
}

void VocabularyModel::add_text(const std::string& plain_text) {
    for (auto& tok : tokenize(plain_text)) {
        ++counts_[tok];
        ++total_;
    }
}

double VocabularyModel::log_prob(const std::string& token) const {
    const auto it = counts_.find(token);
    const double c = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
    if (laplace_)
        return std::log((c + 1.0) /
                        static_cast<double>(total_ + unique_tokens() + 1));
    if (c == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(c / static_cast<double>(total_));
}

ShallowStats shallow_linguistics(const std::string& plain_text) {
    ShallowStats s;
    s.length = static_cast<double>(plain_text.size());
    const auto tokens = tokenize(plain_text);
    s.word_count = static_cast<double>(tokens.size());
    const auto sent = split_sentences(plain_text);
    s.n_sentences = sent.n_sentences;
    s.longest_sentence = sent.longest_chars;
    if (sent.n_sentences > 0) s.awps = s.word_count / s.n_sentences;
    if (!tokens.empty()) {
        std::size_t chars = 0;
        for (const auto& t : tokens) chars += t.size();
        s.avg_chars_per_word = static_cast<double>(chars) / s.word_count;
    }
    return s;
}

double flesch_kincaid(double awps, double asps) {
    return 0.39 * awps + 11.8 * asps - 15.59;
}

double normalized_log_likelihood(const std::map<std::string, int>& token_counts,
                                 const VocabularyModel& voc) {
    if (token_counts.empty()) return 0.0;
    double ll = 0.0;
    for (const auto& [tok, c] : token_counts) ll += c * voc.log_prob(tok);
    return ll / static_cast<double>(token_counts.size());
}

std::vector<double> rank_transform(const std::vector<double>& values, RankDirection direction) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return direction == RankDirection::descending ? values[a] > values[b]
                                                      : values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

const std::vector<std::string> kNames = {
    "length",
    "word_count",
    "n_sentences",
    "longest_sentence",
    "avg_words_per_sentence",
    "avg_chars_per_word",
    "contains_hyperlinks",
    "ll_n",
    "fk",
    "age",
    "rating_score",
    "answer_count",
    "length_ranked",
    "word_count_ranked",
    "n_sentences_ranked",
    "longest_sentence_ranked",
    "avg_words_per_sentence_ranked",
    "avg_chars_per_word_ranked",
    "ll_n_ranked",
    "fk_ranked",
    "age_ranked",
    "rating_score_ranked",
};

constexpr int kLength = 0;
constexpr int kWordCount = 1;
constexpr int kNSentences = 2;
constexpr int kLongestSentence = 3;
constexpr int kAwps = 4;
constexpr int kAvgCharsPerWord = 5;
constexpr int kContainsHyperlinks = 6;
constexpr int kLlN = 7;
constexpr int kFk = 8;
constexpr int kAge = 9;
constexpr int kRatingScore = 10;
constexpr int kAnswerCount = 11;
constexpr int kFirstRanked = 12;

const std::vector<std::pair<int, int>> kRankedPairs = {
    {kLength, 12},       {kWordCount, 13}, {kNSentences, 14}, {kLongestSentence, 15},
    {kAwps, 16},         {kAvgCharsPerWord, 17}, {kLlN, 18},  {kFk, 19},
    {kAge, 20},          {kRatingScore, 21},
};

}  // namespace

const std::vector<std::string>& feature_names() { return kNames; }

int feature_index(const std::string& name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<std::pair<int, int>>& ranked_feature_pairs() { return kRankedPairs; }

RankDirection RankDirections::direction_for(const std::string& base_feature) const {
    const auto it = overrides.find(base_feature);
    if (it != overrides.end()) return it->second;
    return base_feature == "age" ? RankDirection::ascending : RankDirection::descending;
}

std::vector<double> FeatureTable::column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
    return out;
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& rows_wanted) const {
    FeatureTable out;
    out.names = names;
    out.data.reserve(rows_wanted.size() * cols());
    for (std::size_t r : rows_wanted) {
        out.answer_ids.push_back(answer_ids[r]);
        out.question_ids.push_back(question_ids[r]);
        out.thread_index.push_back(thread_index[r]);
        out.labels.push_back(labels[r]);
        for (std::size_t c = 0; c < cols(); ++c) out.data.push_back(at(r, c));
    }
    return out;
}

FeatureTable FeatureTable::drop_features(const std::vector<std::string>& names_to_drop) const {
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (std::find(names_to_drop.begin(), names_to_drop.end(), names[c]) == names_to_drop.end())
            keep.push_back(c);
    }
    if (keep.size() == names.size()) {
        for (const auto& n : names_to_drop)
            if (std::find(names.begin(), names.end(), n) == names.end())
                throw ConfigError("unknown feature: " + n);
    }
    if (keep.empty()) throw ConfigError("cannot drop every feature");
    FeatureTable out;
    for (std::size_t c : keep) out.names.push_back(names[c]);
    out.answer_ids = answer_ids;
    out.question_ids = question_ids;
    out.thread_index = thread_index;
    out.labels = labels;
    out.data.reserve(rows() * keep.size());
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c : keep) out.data.push_back(at(r, c));
    return out;
}

FeatureExtractor::FeatureExtractor(const Dataset& d, RankDirections directions)
    : dataset_(&d), directions_(std::move(directions)), refs_(answer_rows(d)) {
    const std::size_t n = refs_.size();
    token_counts_.resize(n);
    static_features_.assign(n * kFeatureCount, 0.0);
    answer_ids_.resize(n);
    question_ids_.resize(n);
    thread_index_.resize(n);
    labels_.resize(n);

    std::size_t row = 0;
    for (std::size_t ti = 0; ti < d.threads.size(); ++ti) {
        const Thread& t = d.threads[ti];
        const std::size_t first_row = row;
        for (std::size_t ai = 0; ai < t.answers.size(); ++ai, ++row) {
            const Answer& a = t.answers[ai];
            if (a.created_at < t.question.created_at)
                throw DataError("answer " + a.id + " predates its question");
            const CleanText clean = clean_body(a.body_html);
            const ShallowStats s = shallow_linguistics(clean.plain_text);
            const auto tokens = tokenize(clean.plain_text);
            for (const auto& tok : tokens) ++token_counts_[row][tok];
            double asps = 0.0;
            if (!tokens.empty()) {
                long syllables = 0;
                for (const auto& tok : tokens) syllables += count_syllables(tok);
                asps = static_cast<double>(syllables) / static_cast<double>(tokens.size());
            }
            double* f = &static_features_[row * kFeatureCount];
            f[kLength] = s.length;
            f[kWordCount] = s.word_count;
            f[kNSentences] = s.n_sentences;
            f[kLongestSentence] = s.longest_sentence;
            f[kAwps] = s.awps;
            f[kAvgCharsPerWord] = s.avg_chars_per_word;
            f[kContainsHyperlinks] = clean.contained_hyperlink ? 1.0 : 0.0;
            f[kFk] = flesch_kincaid(s.awps, asps);
            f[kAge] = static_cast<double>(a.created_at - t.question.created_at);
            f[kRatingScore] = static_cast<double>(a.rating_score);
            f[kAnswerCount] = static_cast<double>(t.answers.size());
            answer_ids_[row] = a.id;
            question_ids_[row] = t.question.id;
            thread_index_[row] = static_cast<int>(ti);
            labels_[row] = a.is_accepted ? 1 : 0;
        }
        // rank the vocabulary-independent features within the thread
        const std::size_t m = row - first_row;
        std::vector<double> vals(m);
        for (const auto& [base, ranked] : kRankedPairs) {
            if (base == kLlN) continue;
            for (std::size_t i = 0; i < m; ++i)
                vals[i] = static_features_[(first_row + i) * kFeatureCount + base];
            const auto ranks = rank_transform(vals, directions_.direction_for(kNames[base]));
            for (std::size_t i = 0; i < m; ++i)
                static_features_[(first_row + i) * kFeatureCount + ranked] = ranks[i];
        }
    }
}

VocabularyModel FeatureExtractor::build_vocab(const std::vector<std::size_t>& rows_used) const {
    VocabularyModel voc;
    for (std::size_t r : rows_used) voc.add_tokens(token_counts_[r]);
    return voc;
}

VocabularyModel FeatureExtractor::build_vocab_all() const {
    std::vector<std::size_t> all(rows());
    std::iota(all.begin(), all.end(), 0);
    return build_vocab(all);
}

FeatureTable FeatureExtractor::table(const VocabularyModel& voc) const {
    FeatureTable out;
    out.names = kNames;
    out.answer_ids = answer_ids_;
    out.question_ids = question_ids_;
    out.thread_index = thread_index_;
    out.labels = labels_;
    out.data = static_features_;

    const std::size_t n = rows();
    for (std::size_t r = 0; r < n; ++r)
        out.data[r * kFeatureCount + kLlN] = normalized_log_likelihood(token_counts_[r], voc);

    const int llRanked = kFirstRanked + 6;  // ll_n_ranked column
    const auto dir = directions_.direction_for("ll_n");
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && thread_index_[end] == thread_index_[start]) ++end;
        std::vector<double> vals(end - start);
        for (std::size_t i = start; i < end; ++i) vals[i - start] = out.data[i * kFeatureCount + kLlN];
        const auto ranks = rank_transform(vals, dir);
        for (std::size_t i = start; i < end; ++i)
            out.data[i * kFeatureCount + llRanked] = ranks[i - start];
        start = end;
    }
    return out;
}

FeatureTable featurize(const Dataset& d, const VocabularyModel& voc, RankDirections directions) {
    return FeatureExtractor(d, std::move(directions)).table(voc);
}

namespace {

std::string format_value(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

void write_feature_csv(const FeatureTable& t, std::ostream& out) {
    out << "answer_id";
    for (const auto& n : t.names) out << ',' << n;
    out << ",label\n";
    for (std::size_t r = 0; r < t.rows(); ++r) {
        out << t.answer_ids[r];
        for (std::size_t c = 0; c < t.cols(); ++c) out << ',' << format_value(t.at(r, c));
        out << ',' << static_cast<int>(t.labels[r]) << "\n";
    }
}

FeatureTable read_feature_csv(std::istream& in) {
    FeatureTable t;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty feature CSV");
    auto header = split_csv_line(line);
    if (header.size() < 3 || header.front() != "answer_id" || header.back() != "label")
        throw DataError("feature CSV header must be answer_id,<features...>,label");
    t.names.assign(header.begin() + 1, header.end() - 1);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("feature CSV line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        t.answer_ids.push_back(fields.front());
        t.question_ids.emplace_back();
        t.thread_index.push_back(-1);
        for (std::size_t c = 1; c + 1 < fields.size(); ++c) {
            try {
                t.data.push_back(std::stod(fields[c]));
            } catch (const std::exception&) {
                throw DataError("feature CSV line " + std::to_string(lineno) +
                                ": bad number '" + fields[c] + "'");
            }
        }
        t.labels.push_back(fields.back() == "1" ? 1 : 0);
    }
    return t;
}

}  // namespace qarank
