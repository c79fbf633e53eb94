#include "srl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "srl/common.hpp"
#include "srl/rng.hpp"

namespace srl {
namespace {

std::uint64_t sentence_seed(std::uint64_t seed, int index) {
    std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
    s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
    return s ^ (s >> 31);
}

void check_prob(double p, const char* name) {
    require(p >= 0.0f && p <= 1.0f, name, " must lie in [0,1], got ", p);
}

struct Draft {
    std::string pos, dep, role;
};

Sentence realize(const std::vector<Draft>& drafts, int sentence_index,
                 const std::string& plemma, const std::string& sense) {
    Sentence sent;
    int pred_pos = 0;
    for (std::size_t t = 0; t < drafts.size(); ++t)
        if (drafts[t].dep == "ROOT") pred_pos = static_cast<int>(t) + 1;
    for (std::size_t t = 0; t < drafts.size(); ++t) {
        const Draft& d = drafts[t];
        Token tok;
        tok.id = static_cast<int>(t) + 1;
        tok.form = "w" + std::to_string(sentence_index) + "t" + std::to_string(t + 1);
        bool is_pred = d.dep == "ROOT";
        tok.lemma = is_pred ? plemma : tok.form;
        tok.plemma = tok.lemma;
        tok.pos = d.pos;
        tok.ppos = d.pos;
        tok.feat = "_";
        tok.pfeat = "_";
        tok.head = is_pred ? 0 : pred_pos;
        tok.phead = tok.head;
        tok.deprel = d.dep;
        tok.pdeprel = d.dep;
        tok.fillpred = is_pred;
        tok.pred = is_pred ? sense : "_";
        tok.apreds = {d.role};
        sent.tokens.push_back(tok);
    }
    return sent;
}

}  // namespace

Corpus generate_corpus(const GrammarConfig& config) {
    require(config.sentences >= 1, "sentence count must be positive, got ", config.sentences);
    require(config.lemmas >= 1, "lemma count must be positive, got ", config.lemmas);
    require(config.two_sense >= 0 && config.two_sense <= config.lemmas,
            "two-sense lemma count ", config.two_sense, " outside [0, ", config.lemmas, "]");
    require(config.min_filler >= 0, "filler count must be nonnegative, got ",
            config.min_filler);
    require(config.min_filler <= config.max_filler, "filler range is empty: min ",
            config.min_filler, " > max ", config.max_filler);
    check_prob(config.q, "q");
    check_prob(config.slot_freq, "slot_freq");
    check_prob(config.subject_freq, "subject_freq");
    check_prob(config.distractor_freq, "distractor_freq");
    check_prob(config.dir_freq, "dir_freq");
    check_prob(config.adv_freq, "adv_freq");

    Corpus corpus;
    corpus.reserve(static_cast<std::size_t>(config.sentences));
    for (int i = 0; i < config.sentences; ++i) {
        Rng rng(sentence_seed(config.seed, i));
        bool has_distractor = rng.bernoulli(config.distractor_freq);
        bool has_subject = rng.bernoulli(config.subject_freq);
        std::uint64_t span = static_cast<std::uint64_t>(config.max_filler - config.min_filler) + 1;
        int filler_before = config.min_filler + static_cast<int>(rng.below(span));
        int filler_after = config.min_filler + static_cast<int>(rng.below(span));
        bool has_slot = rng.bernoulli(config.slot_freq);
        bool has_dir = rng.bernoulli(config.dir_freq);
        bool has_adv = rng.bernoulli(config.adv_freq);
        int lemma = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.lemmas)));
        bool interaction = rng.bernoulli(config.q);
        bool independent_a0 = rng.bernoulli(1.0 - config.subject_freq);

        std::vector<Draft> drafts;
        if (has_distractor) drafts.push_back({"DT", "SBJ", "_"});
        if (has_subject) drafts.push_back({"NN", "SBJ", "A0"});
        for (int f = 0; f < filler_before; ++f) drafts.push_back({"IN", "P", "_"});
        drafts.push_back({"VB", "ROOT", "_"});
        for (int f = 0; f < filler_after; ++f) drafts.push_back({"IN", "P", "_"});
        if (has_slot) {
            bool a0 = interaction ? !has_subject : independent_a0;
            drafts.push_back({"NN", "OBL", a0 ? "A0" : "A1"});
        }
        if (has_dir) drafts.push_back({"NN", "DIR", "A2"});
        if (has_adv) drafts.push_back({"RB", "ADV", "AM"});

        std::string plemma = "pred" + std::to_string(lemma);
        bool two = lemma < config.two_sense;
        std::string sense = plemma + (two && has_dir ? ".02" : ".01");
        corpus.push_back(realize(drafts, i, plemma, sense));
    }
    return corpus;
}

std::vector<Corpus> split_corpus_counts(const Corpus& corpus, const std::vector<int>& counts,
                                        std::uint64_t seed) {
    require(!counts.empty(), "no split sizes given");
    long total = 0;
    for (int c : counts) {
        require(c >= 1, "split sizes must be positive, got ", c);
        total += c;
    }
    require(total == static_cast<long>(corpus.size()), "split sizes sum to ", total,
            " but the corpus has ", corpus.size(), " sentences");

    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

    std::vector<Corpus> splits;
    std::size_t offset = 0;
    for (int c : counts) {
        Corpus part;
        part.reserve(static_cast<std::size_t>(c));
        for (int k = 0; k < c; ++k) part.push_back(corpus[order[offset + k]]);
        offset += static_cast<std::size_t>(c);
        splits.push_back(std::move(part));
    }
    return splits;
}

std::vector<Corpus> split_corpus(const Corpus& corpus, const std::vector<double>& fractions,
                                 std::uint64_t seed) {
    require(!fractions.empty(), "no split fractions given");
    double sum = 0.0;
    for (double f : fractions) {
        require(f > 0.0, "split fractions must be positive, got ", f);
        sum += f;
    }
    require(std::abs(sum - 1.0) <= 1e-6, "split fractions sum to ", sum, ", expected 1");

    std::size_t n = corpus.size();
    std::vector<int> counts;
    long assigned = 0;
    for (double f : fractions) {
        int c = static_cast<int>(f * static_cast<double>(n));
        counts.push_back(c);
        assigned += c;
    }
    long leftover = static_cast<long>(n) - assigned;
    for (std::size_t i = 0; leftover > 0; i = (i + 1) % counts.size(), --leftover)
        counts[i] += 1;
    for (int c : counts) require(c >= 1, "a split came out empty; corpus of ", n,
                                 " sentences cannot satisfy the fractions");
    return split_corpus_counts(corpus, counts, seed);
}

std::string synth_manifest(const GrammarConfig& config) {
    nlohmann::json j{{"seed", config.seed},
                     {"sentences", config.sentences},
                     {"q", config.q},
                     {"slot_freq", config.slot_freq},
                     {"subject_freq", config.subject_freq},
                     {"distractor_freq", config.distractor_freq},
                     {"dir_freq", config.dir_freq},
                     {"adv_freq", config.adv_freq},
                     {"lemmas", config.lemmas},
                     {"two_sense", config.two_sense},
                     {"min_filler", config.min_filler},
                     {"max_filler", config.max_filler},
                     {"roles", {"_", "A0", "A1", "A2", "AM"}},
                     {"slot_dep", "OBL"}};
    return j.dump(2) + "\n";
}

double local_feature_ceiling(const Corpus& train, const Corpus& eval,
                             const std::string& slot_dep) {
    std::map<std::pair<std::string, std::string>, std::map<std::string, long>> table;
    std::map<std::string, long> overall;
    for (const PredicateInstance& inst : extract_instances(train)) {
        const Sentence& sent = train[static_cast<std::size_t>(inst.sentence_index)];
        for (std::size_t i = 0; i < inst.gold_roles.size(); ++i) {
            const Token& tok = sent.tokens[i];
            table[{tok.ppos, tok.pdeprel}][inst.gold_roles[i]] += 1;
            overall[inst.gold_roles[i]] += 1;
        }
    }
    auto best = [](const std::map<std::string, long>& counts) {
        std::string role = "_";
        long top = -1;
        for (const auto& [label, c] : counts)
            if (c > top) {
                top = c;
                role = label;
            }
        return role;
    };

    long total = 0, correct = 0;
    for (const PredicateInstance& inst : extract_instances(eval)) {
        const Sentence& sent = eval[static_cast<std::size_t>(inst.sentence_index)];
        for (std::size_t i = 0; i < inst.gold_roles.size(); ++i) {
            const Token& tok = sent.tokens[i];
            if (tok.pdeprel != slot_dep) continue;
            auto it = table.find({tok.ppos, tok.pdeprel});
            std::string guess = it != table.end() ? best(it->second) : best(overall);
            total += 1;
            correct += guess == inst.gold_roles[i] ? 1 : 0;
        }
    }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 1.0;
}

double interaction_oracle_accuracy(const Corpus& eval, const std::string& slot_dep) {
    long total = 0, correct = 0;
    for (const PredicateInstance& inst : extract_instances(eval)) {
        const Sentence& sent = eval[static_cast<std::size_t>(inst.sentence_index)];
        for (std::size_t i = 0; i < inst.gold_roles.size(); ++i) {
            if (sent.tokens[i].pdeprel != slot_dep) continue;
            bool other_a0 = false;
            for (std::size_t k = 0; k < inst.gold_roles.size(); ++k)
                other_a0 = other_a0 || (k != i && inst.gold_roles[k] == "A0");
            std::string guess = other_a0 ? "A1" : "A0";
            total += 1;
            correct += guess == inst.gold_roles[i] ? 1 : 0;
        }
    }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 1.0;
}

double slot_accuracy(const Corpus& corpus, const std::vector<PredicateInstance>& gold,
                     const std::vector<InstancePrediction>& predicted,
                     const std::string& slot_dep) {
    require(gold.size() == predicted.size(), "instance counts differ: ", gold.size(), " vs ",
            predicted.size());
    long total = 0, correct = 0;
    for (std::size_t k = 0; k < gold.size(); ++k) {
        const Sentence& sent = corpus[static_cast<std::size_t>(gold[k].sentence_index)];
        for (std::size_t i = 0; i < gold[k].gold_roles.size(); ++i) {
            if (sent.tokens[i].pdeprel != slot_dep) continue;
            total += 1;
            correct += gold[k].gold_roles[i] == predicted[k].roles[i] ? 1 : 0;
        }
    }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 1.0;
}

}  // namespace srl
