#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsm/fit.hpp"
#include "hsm/stats.hpp"

namespace hsm {

/// Token-by-topic occurrence counts. Topics are kept in name order so that
/// every downstream table is independent of input file order.
struct TopicCorpus {
    std::vector<std::string> topics;
    /// token -> count per topic (same order as `topics`)
    std::map<std::string, std::vector<std::uint64_t>> counts;

    std::uint64_t token_count() const;
    std::uint64_t topic_token_count(std::size_t topic) const;
};

/// Splits UTF-8 text on Unicode white space after NFC normalization.
/// Throws DomainError on malformed UTF-8.
std::vector<std::string> tokenize(std::string_view text);

/// Builds a corpus from (topic name, text) pairs.
TopicCorpus corpus_from_texts(const std::vector<std::pair<std::string, std::string>>& texts);

/// One file per topic; the file stem is the topic name.
TopicCorpus load_corpus(const std::vector<std::filesystem::path>& topic_files);

/// Every `*.txt` file in `dir`.
TopicCorpus load_corpus_dir(const std::filesystem::path& dir);

struct NTRecord {
    std::string token;
    std::uint64_t total_freq = 0;
    std::size_t global_rank = 0; // 1 = most frequent
    std::size_t nt = 0;          // topics with count >= threshold
};

/// Records sorted by global rank (frequency descending, ties by token bytes).
/// Tokens that reach `threshold` in no topic are left out.
std::vector<NTRecord> nt_table(const TopicCorpus& corpus, std::uint64_t threshold = 1);

struct NTGroupStats {
    std::size_t nt = 0;
    std::size_t word_count = 0;
    double avg_rank = 0;
    double word_pct = 0;
    double freq_pct = 0;
    double avg_freq = 0;
    std::uint64_t total_freq = 0;
    /// Power-law fit of the group's own rank-frequency series; empty for groups under 3 words.
    std::optional<FitResult> fit;
};

/// Percentages are relative to the words and tokens covered by `records`.
std::vector<NTGroupStats> group_stats(const std::vector<NTRecord>& records, const TopicCorpus& corpus);

/// Gaussian KDE of global ranks per NT group on 512 points over [1, V].
/// Groups with fewer than 2 words are skipped with a warning.
std::map<std::size_t, KdeCurve> nt_density_curves(const std::vector<NTRecord>& records);

/// Pearson correlation of global rank and NT over a per-group sample of
/// ceil(proportion * group size) words drawn without replacement.
double rank_nt_correlation(const std::vector<NTRecord>& records, double proportion, std::uint64_t seed);

struct TopicFit {
    std::string topic;
    std::size_t word_types = 0;
    std::uint64_t tokens = 0;
    std::optional<FitResult> fit; // empty when the topic has < 3 word types
};

struct CorpusFits {
    std::vector<TopicFit> topics;
    TopicFit collection;
};

CorpusFits per_topic_fits(const TopicCorpus& corpus, const RankOptions& options = {});

/// `token,total_freq,rank,nt`
void write_nt_table(std::ostream& out, const std::vector<NTRecord>& records);
/// `nt,avg_rank,word_count,word_pct,freq_pct,avg_freq,exponent,adj_r2`
void write_group_stats(std::ostream& out, const std::vector<NTGroupStats>& stats);
/// `topic,words,word_frequency,exponent,adj_r2`
void write_topic_fits(std::ostream& out, const CorpusFits& fits);

} // namespace hsm
