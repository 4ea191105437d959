#include "hsm/corpus.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "format.hpp"
#include "hsm/error.hpp"
#include "hsm/rng.hpp"

namespace hsm {

std::uint64_t TopicCorpus::token_count() const
{
    std::uint64_t n = 0;
    for (const auto& [token, per_topic] : counts)
        n = std::accumulate(per_topic.begin(), per_topic.end(), n);
    return n;
}

std::uint64_t TopicCorpus::topic_token_count(std::size_t topic) const
{
    std::uint64_t n = 0;
    for (const auto& [token, per_topic] : counts)
        n += per_topic.at(topic);
    return n;
}

std::vector<std::string> tokenize(std::string_view text)
{
    UErrorCode err = U_ZERO_ERROR;
    int32_t length = 0;
    u_strFromUTF8(nullptr, 0, &length, text.data(), static_cast<int32_t>(text.size()), &err);
    if (err != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(err))
        throw DomainError("input is not valid UTF-8");
    icu::UnicodeString raw;
    err = U_ZERO_ERROR;
    UChar* buf = raw.getBuffer(length);
    u_strFromUTF8(buf, length, &length, text.data(), static_cast<int32_t>(text.size()), &err);
    raw.releaseBuffer(U_SUCCESS(err) ? length : 0);
    if (U_FAILURE(err))
        throw DomainError("input is not valid UTF-8");

    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(err);
    if (U_FAILURE(err))
        throw Error("ICU NFC normalizer unavailable");
    const icu::UnicodeString normalized = nfc->normalize(raw, err);
    if (U_FAILURE(err))
        throw DomainError("NFC normalization failed");

    std::vector<std::string> tokens;
    int32_t start = -1;
    for (int32_t i = 0; i < normalized.length(); i = normalized.moveIndex32(i, 1)) {
        const UChar32 c = normalized.char32At(i);
        if (u_isUWhiteSpace(c)) {
            if (start >= 0) {
                std::string tok;
                normalized.tempSubStringBetween(start, i).toUTF8String(tok);
                tokens.push_back(std::move(tok));
                start = -1;
            }
        } else if (start < 0) {
            start = i;
        }
    }
    if (start >= 0) {
        std::string tok;
        normalized.tempSubStringBetween(start, normalized.length()).toUTF8String(tok);
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

TopicCorpus corpus_from_texts(const std::vector<std::pair<std::string, std::string>>& texts)
{
    if (texts.empty())
        throw InvalidSpec("corpus needs at least one topic");
    std::vector<std::size_t> order(texts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return texts[a].first < texts[b].first; });

    TopicCorpus corpus;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& name = texts[order[k]].first;
        if (k > 0 && name == corpus.topics.back())
            throw InvalidSpec("duplicate topic name '" + name + "'");
        corpus.topics.push_back(name);
    }
    const std::size_t n_topics = corpus.topics.size();
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto tokens = tokenize(texts[order[k]].second);
        if (tokens.empty())
            warn("topic '" + corpus.topics[k] + "' contains no tokens");
        for (const auto& tok : tokens) {
            auto& per_topic = corpus.counts[tok];
            if (per_topic.empty())
                per_topic.assign(n_topics, 0);
            ++per_topic[k];
        }
    }
    if (corpus.counts.empty())
        throw DegenerateData("corpus contains no tokens");
    return corpus;
}

TopicCorpus load_corpus(const std::vector<std::filesystem::path>& topic_files)
{
    if (topic_files.empty())
        throw InvalidSpec("no topic files given");
    std::vector<std::pair<std::string, std::string>> texts;
    texts.reserve(topic_files.size());
    for (const auto& path : topic_files) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot read " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad())
            throw IoError("error reading " + path.string());
        texts.emplace_back(path.stem().string(), ss.str());
    }
    return corpus_from_texts(texts);
}

TopicCorpus load_corpus_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw IoError("no .txt topic files in " + dir.string());
    return load_corpus(files);
}

std::vector<NTRecord> nt_table(const TopicCorpus& corpus, std::uint64_t threshold)
{
    if (corpus.counts.empty())
        throw DegenerateData("corpus is empty");
    if (threshold < 1)
        throw InvalidSpec("NT threshold must be >= 1");
    std::vector<NTRecord> records;
    records.reserve(corpus.counts.size());
    for (const auto& [token, per_topic] : corpus.counts) {
        NTRecord r;
        r.token = token;
        r.total_freq = std::accumulate(per_topic.begin(), per_topic.end(), std::uint64_t{0});
        r.nt = static_cast<std::size_t>(
            std::count_if(per_topic.begin(), per_topic.end(), [&](std::uint64_t c) { return c >= threshold; }));
        if (r.nt > 0)
            records.push_back(std::move(r));
    }
    if (records.empty())
        throw DegenerateData("no token reaches the NT threshold in any topic");
    // std::map already iterates in token byte order, so a stable sort keeps the tie rule.
    std::stable_sort(records.begin(), records.end(),
                     [](const NTRecord& a, const NTRecord& b) { return a.total_freq > b.total_freq; });
    for (std::size_t i = 0; i < records.size(); ++i)
        records[i].global_rank = i + 1;
    return records;
}

namespace {

std::map<std::size_t, std::vector<const NTRecord*>> by_nt(const std::vector<NTRecord>& records)
{
    std::map<std::size_t, std::vector<const NTRecord*>> groups;
    for (const auto& r : records)
        groups[r.nt].push_back(&r);
    for (auto& [nt, members] : groups)
        std::sort(members.begin(), members.end(),
                  [](const NTRecord* a, const NTRecord* b) { return a->global_rank < b->global_rank; });
    return groups;
}

} // namespace

std::vector<NTGroupStats> group_stats(const std::vector<NTRecord>& records, const TopicCorpus& corpus)
{
    if (records.empty())
        throw InsufficientData("no NT records");
    const auto vocabulary = static_cast<double>(records.size());
    std::uint64_t retained = 0;
    for (const auto& r : records)
        retained += r.total_freq;
    if (retained > corpus.token_count())
        throw InvalidSpec("NT records do not belong to this corpus");
    const auto tokens = static_cast<double>(retained);
    std::vector<NTGroupStats> out;
    for (const auto& [nt, members] : by_nt(records)) {
        NTGroupStats s;
        s.nt = nt;
        s.word_count = members.size();
        double rank_sum = 0;
        std::vector<double> freqs;
        freqs.reserve(members.size());
        for (const auto* r : members) {
            rank_sum += static_cast<double>(r->global_rank);
            s.total_freq += r->total_freq;
            freqs.push_back(static_cast<double>(r->total_freq));
        }
        s.avg_rank = rank_sum / static_cast<double>(s.word_count);
        s.word_pct = 100.0 * static_cast<double>(s.word_count) / vocabulary;
        s.freq_pct = 100.0 * static_cast<double>(s.total_freq) / tokens;
        s.avg_freq = static_cast<double>(s.total_freq) / static_cast<double>(s.word_count);
        if (s.word_count >= 3)
            s.fit = fit_power_loglog(rank_counts(freqs));
        else
            warn("NT group " + std::to_string(nt) + " has " + std::to_string(s.word_count) +
                 " words; power-law fit omitted");
        out.push_back(std::move(s));
    }
    return out;
}

std::map<std::size_t, KdeCurve> nt_density_curves(const std::vector<NTRecord>& records)
{
    std::map<std::size_t, KdeCurve> curves;
    if (records.empty())
        return curves;
    const auto grid = linspace(1.0, static_cast<double>(records.size()), 512);
    for (const auto& [nt, members] : by_nt(records)) {
        if (members.size() < 2) {
            warn("NT group " + std::to_string(nt) + " has fewer than 2 words; density skipped");
            continue;
        }
        std::vector<double> ranks;
        ranks.reserve(members.size());
        for (const auto* r : members)
            ranks.push_back(static_cast<double>(r->global_rank));
        curves.emplace(nt, kde(ranks, std::nullopt, grid));
    }
    return curves;
}

double rank_nt_correlation(const std::vector<NTRecord>& records, double proportion, std::uint64_t seed)
{
    if (!(proportion > 0.0 && proportion <= 1.0))
        throw InvalidSpec("proportion must be in (0, 1]");
    if (records.empty())
        throw InsufficientData("no NT records");
    std::vector<double> ranks, nts;
    for (const auto& [nt, members] : by_nt(records)) {
        if (members.empty())
            throw InsufficientData("empty NT group");
        const auto n = members.size();
        auto take = static_cast<std::size_t>(std::ceil(proportion * static_cast<double>(n) - 1e-9));
        take = std::clamp<std::size_t>(take, 1, n);
        std::vector<const NTRecord*> pool(members);
        if (take < n) {
            Rng rng(derive_seed(seed, nt));
            for (std::size_t i = 0; i < take; ++i)
                std::swap(pool[i], pool[i + rng.below(n - i)]);
        }
        for (std::size_t i = 0; i < take; ++i) {
            ranks.push_back(static_cast<double>(pool[i]->global_rank));
            nts.push_back(static_cast<double>(nt));
        }
    }
    return pearson(ranks, nts);
}

CorpusFits per_topic_fits(const TopicCorpus& corpus, const RankOptions& options)
{
    CorpusFits out;
    const auto fit_counts = [&](TopicFit& tf, const std::vector<double>& counts) {
        tf.word_types = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }));
        tf.tokens = static_cast<std::uint64_t>(std::accumulate(counts.begin(), counts.end(), 0.0));
        if (tf.word_types < 3) {
            warn("topic '" + tf.topic + "' has fewer than 3 word types; fit skipped");
            return;
        }
        tf.fit = fit_power_loglog(rank_counts(counts, options));
    };
    std::vector<double> totals;
    totals.reserve(corpus.counts.size());
    for (const auto& [token, per_topic] : corpus.counts)
        totals.push_back(static_cast<double>(std::accumulate(per_topic.begin(), per_topic.end(), std::uint64_t{0})));
    for (std::size_t t = 0; t < corpus.topics.size(); ++t) {
        TopicFit tf;
        tf.topic = corpus.topics[t];
        std::vector<double> counts;
        counts.reserve(corpus.counts.size());
        for (const auto& [token, per_topic] : corpus.counts)
            if (per_topic[t] > 0)
                counts.push_back(static_cast<double>(per_topic[t]));
        fit_counts(tf, counts);
        out.topics.push_back(std::move(tf));
    }
    out.collection.topic = "Collection";
    fit_counts(out.collection, totals);
    return out;
}

void write_nt_table(std::ostream& out, const std::vector<NTRecord>& records)
{
    out << "token,total_freq,rank,nt\n";
    for (const auto& r : records)
        out << detail::csv_field(r.token) << ',' << r.total_freq << ',' << r.global_rank << ',' << r.nt << '\n';
}

namespace {

std::string signed_exponent(const std::optional<FitResult>& fit)
{
    return fit ? detail::fmt_double(-fit->alpha) : "";
}

std::string goodness(const std::optional<FitResult>& fit)
{
    return fit ? detail::fmt_double(fit->adj_r2) : "";
}

} // namespace

void write_group_stats(std::ostream& out, const std::vector<NTGroupStats>& stats)
{
    out << "nt,avg_rank,word_count,word_pct,freq_pct,avg_freq,exponent,adj_r2\n";
    for (const auto& s : stats)
        out << s.nt << ',' << detail::fmt_double(s.avg_rank) << ',' << s.word_count << ','
            << detail::fmt_double(s.word_pct) << ',' << detail::fmt_double(s.freq_pct) << ','
            << detail::fmt_double(s.avg_freq) << ',' << signed_exponent(s.fit) << ',' << goodness(s.fit) << '\n';
}

void write_topic_fits(std::ostream& out, const CorpusFits& fits)
{
    out << "topic,words,word_frequency,exponent,adj_r2\n";
    const auto row = [&](const TopicFit& t) {
        out << detail::csv_field(t.topic) << ',' << t.word_types << ',' << t.tokens << ',' << signed_exponent(t.fit) << ','
            << goodness(t.fit) << '\n';
    };
    for (const auto& t : fits.topics)
        row(t);
    row(fits.collection);
}

} // namespace hsm
