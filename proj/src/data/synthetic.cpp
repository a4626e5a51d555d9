#include "jrank/data/synthetic.hpp"

#include "jrank/data/ingest.hpp"
#include "jrank/error.hpp"
#include "jrank/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <unordered_set>

namespace jrank::data {

void SyntheticOptions::validate() const {
    if (n_docs == 0 || vocab_size < 40 || dimension == 0 || n_questions() == 0)
        throw ArgumentError("synthetic: counts must be positive (vocabulary at least 40)");
    if (!(signal >= 0.0 && signal <= 1.0)) throw ArgumentError("synthetic: signal must be in [0, 1]");
}

namespace {

constexpr const char* kFunctionWords[] = {"the", "of", "and", "to", "in", "is", "that", "for", "with", "as",
                                          "on", "by", "was", "are", "be", "this", "from", "at", "or", "an",
                                          "which", "its", "their", "these", "were", "has", "have", "it",
                                          "into", "between", "during", "after", "than", "both", "other"};
constexpr const char* kQuestionWords[] = {"what", "which", "how", "why", "when", "where"};

std::vector<std::string> make_pseudo_words(std::size_t n) {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    const std::size_t syllables = consonants.size() * vowels.size();
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; out.size() < n; ++i) {
        std::string w;
        std::size_t x = i;
        for (int s = 0; s < 3; ++s) {
            const std::size_t syl = x % syllables;
            x /= syllables;
            w += consonants[syl / vowels.size()];
            w += vowels[syl % vowels.size()];
        }
        if (x) w += consonants[x % consonants.size()];
        if (text::default_stopwords().count(w) || !seen.insert(w).second) continue;
        out.push_back(std::move(w));
    }
    return out;
}

class Generator {
public:
    explicit Generator(const SyntheticOptions& o) : opt_(o), rng_(o.seed) {
        words_ = make_pseudo_words(o.vocab_size);
        for (const char* w : kFunctionWords) function_words_.emplace_back(w);
        double total = 0.0;
        cumulative_.reserve(words_.size());
        for (std::size_t r = 0; r < words_.size(); ++r) {
            total += 1.0 / static_cast<double>(r + 1);
            cumulative_.push_back(total);
        }
        band_begin_ = words_.size() / 20;
    }

    std::size_t background_word() {
        const double u = rng_.uniform() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), words_.size() - 1);
    }

    std::vector<std::string> background_sentence() {
        const auto len = static_cast<std::size_t>(rng_.between(6, 14));
        std::vector<std::string> toks;
        toks.reserve(len);
        for (std::size_t i = 0; i < len; ++i) {
            if (rng_.bernoulli(0.35))
                toks.push_back(function_words_[rng_.below(function_words_.size())]);
            else
                toks.push_back(words_[background_word()]);
        }
        return toks;
    }

    static std::string render(const std::vector<std::string>& toks, char end) {
        std::string s;
        for (const auto& t : toks) {
            if (!s.empty()) s += ' ';
            s += t;
        }
        if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
        s += end;
        return s;
    }

    std::vector<std::vector<std::string>> background_doc() {
        const auto n = static_cast<std::size_t>(rng_.between(3, 8));
        std::vector<std::vector<std::string>> sents;
        for (std::size_t i = 0; i < n; ++i) sents.push_back(background_sentence());
        return sents;
    }

    struct Query {
        std::vector<std::size_t> terms;     // content word indices, phrase order
        std::vector<std::string> phrase;    // content words with interleaved function words
        std::vector<std::int64_t> slots;    // index into terms, -1 for function words
        std::string text;
    };

    Query make_query() {
        Query q;
        const auto n = static_cast<std::size_t>(rng_.between(3, 5));
        std::unordered_set<std::size_t> groups;
        while (q.terms.size() < n) {
            const std::size_t w = band_begin_ + rng_.below(words_.size() - band_begin_);
            if (groups.insert(w / 2).second) q.terms.push_back(w);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0 && rng_.bernoulli(0.3)) {
                q.phrase.push_back(function_words_[rng_.below(function_words_.size())]);
                q.slots.push_back(-1);
            }
            q.phrase.push_back(words_[q.terms[i]]);
            q.slots.push_back(static_cast<std::int64_t>(i));
        }
        std::vector<std::string> toks{kQuestionWords[rng_.below(std::size(kQuestionWords))]};
        toks.insert(toks.end(), q.phrase.begin(), q.phrase.end());
        q.text = render(toks, '?');
        return q;
    }

    std::size_t synonym_of(std::size_t w) const { return (w ^ 1) < words_.size() ? (w ^ 1) : w; }

    // Gold document: background plus one answer sentence with the phrase planted contiguously.
    std::pair<std::vector<std::vector<std::string>>, std::uint32_t> gold_doc(const Query& q) {
        auto sents = background_doc();
        const auto at = static_cast<std::uint32_t>(rng_.below(sents.size()));
        std::vector<std::string> phrase;
        for (std::size_t i = 0; i < q.phrase.size(); ++i) {
            const std::int64_t slot = q.slots[i];
            if (slot < 0) {
                phrase.push_back(q.phrase[i]);
                continue;
            }
            const std::size_t w = q.terms[static_cast<std::size_t>(slot)];
            phrase.push_back(words_[rng_.bernoulli(opt_.signal) ? w : synonym_of(w)]);
        }
        auto& s = sents[at];
        const std::size_t pos = rng_.below(s.size() + 1);
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), phrase.begin(), phrase.end());
        // Other sentences of a relevant document mention the topic too.
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < sents.size(); ++i)
            if (i != at) others.push_back(i);
        rng_.shuffle(others);
        others.resize(std::min<std::size_t>(others.size(), static_cast<std::size_t>(rng_.between(1, 2))));
        for (std::size_t i : others) scatter(sents[i], q);
        return {std::move(sents), at};
    }

    // Inserts a random proper subset of the query words at random positions, some twice.
    void scatter(std::vector<std::string>& s, const Query& q) {
        std::vector<std::size_t> terms = q.terms;
        rng_.shuffle(terms);
        terms.resize(static_cast<std::size_t>(rng_.between(1, static_cast<std::int64_t>(q.terms.size()) - 1)));
        for (std::size_t t : terms) {
            const auto reps = static_cast<std::size_t>(rng_.between(1, 2));
            for (std::size_t r = 0; r < reps; ++r) {
                const std::size_t pos = rng_.below(s.size() + 1);
                s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), words_[t]);
            }
        }
    }

    // Distractor: query words scattered over 2-3 sentences, never all in one, some repeated.
    std::vector<std::vector<std::string>> distractor_doc(const Query& q) {
        auto sents = background_doc();
        const std::size_t hits = std::min<std::size_t>(sents.size(), static_cast<std::size_t>(rng_.between(2, 3)));
        std::vector<std::size_t> order(sents.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng_.shuffle(order);
        for (std::size_t h = 0; h < hits; ++h) scatter(sents[order[h]], q);
        return sents;
    }

    void vectors(SyntheticDataset& out) {
        const std::size_t d = opt_.dimension;
        Rng vr(splitmix64(opt_.seed ^ 0x5eedf00dULL));
        auto unit = [&](std::vector<double> v) {
            double n = 0.0;
            for (double x : v) n += x * x;
            n = std::sqrt(n);
            for (double& x : v) x /= n;
            return v;
        };
        auto gaussian = [&] {
            std::vector<double> v(d);
            for (double& x : v) x = vr.normal();
            return v;
        };
        for (std::size_t i = 0; i < words_.size(); i += 2) {
            const auto base = unit(gaussian());
            for (std::size_t j = i; j < std::min(i + 2, words_.size()); ++j) {
                auto noise = unit(gaussian());
                std::vector<double> v(d);
                for (std::size_t c = 0; c < d; ++c) v[c] = base[c] + 0.35 * noise[c];
                out.vocabulary.push_back(words_[j]);
                out.vectors.push_back(unit(std::move(v)));
            }
        }
        std::vector<std::string> extra = function_words_;
        for (const char* w : kQuestionWords) extra.emplace_back(w);
        for (const auto& w : extra) {
            out.vocabulary.push_back(w);
            out.vectors.push_back(unit(gaussian()));
        }
    }

    SyntheticDataset run() {
        SyntheticDataset out;
        const std::size_t nq = opt_.n_questions();

        struct Pending {
            std::vector<std::vector<std::string>> sentences;
            std::int64_t question = -1; // gold doc of this question, or -1
            std::uint32_t answer = 0;
        };
        std::vector<Query> queries;
        std::vector<Pending> docs;
        for (std::size_t i = 0; i < nq; ++i) {
            queries.push_back(make_query());
            const auto golds = static_cast<std::size_t>(rng_.between(1, 2));
            for (std::size_t g = 0; g < golds; ++g) {
                auto [sents, at] = gold_doc(queries.back());
                docs.push_back({std::move(sents), static_cast<std::int64_t>(i), at});
            }
        }
        if (docs.size() > opt_.n_docs)
            throw ArgumentError("synthetic: " + std::to_string(opt_.n_docs) + " documents cannot hold " +
                                std::to_string(docs.size()) + " gold documents");
        // Three quarters of the remaining budget goes to distractors, at most three per question.
        std::size_t budget = std::min((opt_.n_docs - docs.size()) * 3 / 4, 3 * nq);
        for (std::size_t round = 0; budget > 0 && round < 3; ++round)
            for (std::size_t i = 0; i < nq && budget > 0; ++i, --budget)
                docs.push_back({distractor_doc(queries[i]), -1, 0});
        while (docs.size() < opt_.n_docs) docs.push_back({background_doc(), -1, 0});

        std::vector<std::size_t> order(docs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng_.shuffle(order);

        char buf[32];
        out.questions.resize(nq);
        for (std::size_t i = 0; i < nq; ++i) {
            std::snprintf(buf, sizeof buf, "Q%05zu", i);
            out.questions[i].id = buf;
            out.questions[i].text = queries[i].text;
        }
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const auto& p = docs[order[pos]];
            std::snprintf(buf, sizeof buf, "D%06zu", pos);
            CorpusRecord r;
            r.id = buf;
            std::vector<std::string> rendered;
            for (const auto& s : p.sentences) rendered.push_back(render(s, '.'));
            for (const auto& s : rendered) r.body += (r.body.empty() ? "" : " ") + s;
            r.sentences = std::move(rendered);
            if (p.question >= 0) {
                auto& q = out.questions[static_cast<std::size_t>(p.question)];
                q.gold_docs.push_back(r.id);
                q.gold_sentences.push_back({r.id, p.answer});
            }
            out.corpus.push_back(std::move(r));
        }
        for (auto& q : out.questions) {
            std::vector<std::size_t> idx(q.gold_docs.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return q.gold_docs[a] < q.gold_docs[b]; });
            QuestionRecord sorted = q;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                sorted.gold_docs[i] = q.gold_docs[idx[i]];
                sorted.gold_sentences[i] = q.gold_sentences[idx[i]];
            }
            q = std::move(sorted);
        }

        out.split.seed = opt_.seed;
        for (std::size_t i = 0; i < nq; ++i) {
            auto& list = i < opt_.n_train ? out.split.train
                         : i < opt_.n_train + opt_.n_dev ? out.split.dev
                                                         : out.split.test;
            list.push_back(out.questions[i].id);
        }
        vectors(out);
        return out;
    }

private:
    SyntheticOptions opt_;
    Rng rng_;
    std::vector<std::string> words_;
    std::vector<std::string> function_words_;
    std::vector<double> cumulative_;
    std::size_t band_begin_ = 0;
};

} // namespace

SyntheticDataset generate_synthetic(const SyntheticOptions& options) {
    options.validate();
    return Generator(options).run();
}

void write_synthetic(const std::string& dir, const SyntheticDataset& dataset) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path p(dir);
    write_corpus((p / "corpus.jsonl").string(), dataset.corpus);
    write_questions((p / "questions.jsonl").string(), dataset.questions);
    write_split((p / "split.json").string(), dataset.split);
    text::save_word2vec_text((p / "embeddings.txt").string(), dataset.vocabulary, dataset.vectors);
}

} // namespace jrank::data
