#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qarank/model.hpp"
#include "qarank/text.hpp"

namespace qarank {

// Background-corpus unigram model with add-one smoothing, so unseen words
// keep a strictly positive probability. Build it from training-split answer
// text only; the smoothing toggle exists for property tests.
class VocabularyModel {
public:
    VocabularyModel() = default;

    void add_tokens(const std::map<std::string, int>& counts);
    void add_text(const std::string& plain_text);

    // log P(w | Voc); with smoothing off, unseen words return -inf
    double log_prob(const std::string& token) const;

    std::int64_t total_tokens() const { return total_; }
    std::int64_t unique_tokens() const { return static_cast<std::int64_t>(counts_.size()); }
    void set_smoothing(bool laplace) { laplace_ = laplace; }

private:
    std::map<std::string, int> counts_;
    std::int64_t total_ = 0;
    bool laplace_ = true;
};

struct ShallowStats {
    double length = 0;            // characters of clean text
    double word_count = 0;
    double n_sentences = 0;
    double longest_sentence = 0;  // characters
    double awps = 0;              // words per sentence
    double avg_chars_per_word = 0;
};

ShallowStats shallow_linguistics(const std::string& plain_text);

// 0.39 * awps + 11.8 * asps - 15.59
double flesch_kincaid(double awps, double asps);

// sum over answer tokens of C(w) * log P(w|Voc), divided by the number of
// distinct tokens; 0 for an empty answer
double normalized_log_likelihood(const std::map<std::string, int>& token_counts,
                                 const VocabularyModel& voc);

enum class RankDirection { descending, ascending };

// Rank 1 is best per direction; ties take the average of the spanned ranks.
std::vector<double> rank_transform(const std::vector<double>& values, RankDirection direction);

// Canonical feature order. The first twelve are the base features, then the
// ten ranked counterparts.
inline constexpr int kFeatureCount = 22;
const std::vector<std::string>& feature_names();
int feature_index(const std::string& name);  // -1 when unknown

// (base, ranked) column-index pairs
const std::vector<std::pair<int, int>>& ranked_feature_pairs();

struct RankDirections {
    // default: descending everywhere except age
    std::map<std::string, RankDirection> overrides;
    RankDirection direction_for(const std::string& base_feature) const;
};

struct FeatureTable {
    std::vector<std::string> names;
    std::vector<std::string> answer_ids;
    std::vector<std::string> question_ids;
    std::vector<int> thread_index;   // rows sharing a thread share this
    std::vector<std::uint8_t> labels;
    std::vector<double> data;        // row-major, n_rows x names.size()

    std::size_t rows() const { return answer_ids.size(); }
    std::size_t cols() const { return names.size(); }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    std::vector<double> column(std::size_t c) const;

    FeatureTable select_rows(const std::vector<std::size_t>& rows) const;
    FeatureTable drop_features(const std::vector<std::string>& names_to_drop) const;
};

// Precomputes everything that does not depend on the vocabulary model, so
// per-fold refeaturization only recomputes LL_n and its rank.
class FeatureExtractor {
public:
    FeatureExtractor(const Dataset& d, RankDirections directions = {});

    // Vocabulary built from the clean answer text of the given rows.
    VocabularyModel build_vocab(const std::vector<std::size_t>& rows) const;
    VocabularyModel build_vocab_all() const;

    // Full table over every answer row, LL_n computed under voc.
    FeatureTable table(const VocabularyModel& voc) const;

    std::size_t rows() const { return token_counts_.size(); }

private:
    const Dataset* dataset_;
    RankDirections directions_;
    std::vector<AnswerRef> refs_;
    std::vector<std::map<std::string, int>> token_counts_;
    std::vector<double> static_features_;  // row-major, kFeatureCount wide, ll_n columns zeroed
    std::vector<std::string> answer_ids_;
    std::vector<std::string> question_ids_;
    std::vector<int> thread_index_;
    std::vector<std::uint8_t> labels_;
};

FeatureTable featurize(const Dataset& d, const VocabularyModel& voc,
                       RankDirections directions = {});

// 24-column CSV: answer_id, the 22 features, label. Floats carry 10
// significant digits.
void write_feature_csv(const FeatureTable& t, std::ostream& out);
FeatureTable read_feature_csv(std::istream& in);

}  // namespace qarank
