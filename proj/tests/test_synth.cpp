#include <map>
#include <set>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "srl/common.hpp"
#include "srl/eval.hpp"
#include "srl/synth.hpp"

using namespace srl;

namespace {

GrammarConfig base_config() {
    GrammarConfig c;
    c.seed = 7;
    c.sentences = 120;
    return c;
}

int slot_position(const Sentence& sent) {
    for (const Token& t : sent.tokens)
        if (t.pdeprel == "OBL") return t.id;
    return 0;
}

std::string role_at(const Sentence& sent, int pos) {
    return pos > 0 ? sent.tokens[static_cast<std::size_t>(pos - 1)].apreds[0] : "_";
}

}  // namespace

TEST_CASE("generation is deterministic and parses cleanly") {
    GrammarConfig c = base_config();
    Corpus a = generate_corpus(c);
    Corpus b = generate_corpus(c);
    CHECK(write_corpus(a) == write_corpus(b));
    CHECK(a.size() == 120);

    std::string text = write_corpus(a);
    Corpus reparsed = parse_corpus_text(text);
    CHECK(write_corpus(reparsed) == text);
    CHECK(extract_instances(a).size() == a.size());  // one predicate per sentence

    GrammarConfig other = c;
    other.seed = 8;
    CHECK(write_corpus(generate_corpus(other)) != text);
}

TEST_CASE("degenerate configurations are rejected") {
    GrammarConfig c = base_config();
    c.sentences = 0;
    CHECK_THROWS_AS(generate_corpus(c), Error);
    c = base_config();
    c.q = 1.5f;
    CHECK_THROWS_AS(generate_corpus(c), Error);
    c = base_config();
    c.lemmas = 0;
    CHECK_THROWS_AS(generate_corpus(c), Error);
    c = base_config();
    c.two_sense = 9;  // more than lemmas
    CHECK_THROWS_AS(generate_corpus(c), Error);
}

TEST_CASE("at full interaction strength the slot role is a deterministic rule") {
    GrammarConfig c = base_config();
    c.sentences = 300;
    Corpus corpus = generate_corpus(c);
    int with_subject = 0, without_subject = 0;
    for (const Sentence& sent : corpus) {
        int slot = slot_position(sent);
        REQUIRE(slot > 0);  // slot_freq = 1
        bool subject = false;
        bool a2 = false;
        for (const Token& t : sent.tokens) {
            if (t.pdeprel == "SBJ" && t.ppos == "NN") {
                subject = true;
                CHECK(t.apreds[0] == "A0");
            }
            if (t.pdeprel == "SBJ" && t.ppos == "DT") CHECK(t.apreds[0] == "_");
            if (t.pdeprel == "DIR") {
                a2 = true;
                CHECK(t.apreds[0] == "A2");
            }
            if (t.pdeprel == "ADV") CHECK(t.apreds[0] == "AM");
            if (t.pdeprel == "P") CHECK(t.apreds[0] == "_");
        }
        CHECK(role_at(sent, slot) == (subject ? "A1" : "A0"));
        (subject ? with_subject : without_subject) += 1;

        int preds = 0;
        for (const Token& t : sent.tokens) preds += t.fillpred ? 1 : 0;
        CHECK(preds == 1);
        const Token& pred = sent.tokens[static_cast<std::size_t>(
            sent.predicate_positions()[0] - 1)];
        bool two_sense_lemma = false;
        for (int k = 0; k < c.two_sense; ++k)
            two_sense_lemma = two_sense_lemma || pred.plemma == "pred" + std::to_string(k);
        std::string expected_sense =
            pred.plemma + ((a2 && two_sense_lemma) ? ".02" : ".01");
        CHECK(pred.pred == expected_sense);
    }
    CHECK(with_subject > 0);
    CHECK(without_subject > 0);
}

TEST_CASE("word forms are globally unique") {
    Corpus corpus = generate_corpus(base_config());
    std::set<std::string> forms;
    long total = 0;
    for (const Sentence& sent : corpus)
        for (const Token& t : sent.tokens) {
            forms.insert(t.form);
            ++total;
        }
    CHECK(static_cast<long>(forms.size()) == total);
}

TEST_CASE("at zero interaction strength the slot is independent of the subject") {
    GrammarConfig c = base_config();
    c.q = 0.0f;
    c.sentences = 1000;
    Corpus corpus = generate_corpus(c);
    // 2x2 contingency: subject presence x slot-role-is-A0.
    double cell[2][2] = {{0, 0}, {0, 0}};
    for (const Sentence& sent : corpus) {
        bool subject = false;
        for (const Token& t : sent.tokens)
            subject = subject || (t.pdeprel == "SBJ" && t.ppos == "NN");
        bool slot_a0 = role_at(sent, slot_position(sent)) == "A0";
        cell[subject ? 1 : 0][slot_a0 ? 1 : 0] += 1;
    }
    double n = 1000;
    double row[2] = {cell[0][0] + cell[0][1], cell[1][0] + cell[1][1]};
    double col[2] = {cell[0][0] + cell[1][0], cell[0][1] + cell[1][1]};
    double chi2 = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double expect = row[i] * col[j] / n;
            REQUIRE(expect > 0);
            chi2 += (cell[i][j] - expect) * (cell[i][j] - expect) / expect;
        }
    CHECK(chi2 < 6.635);  // chi-square df=1 at alpha = 0.01
}

TEST_CASE("splits are deterministic partitions") {
    Corpus corpus = generate_corpus(base_config());
    auto splits = split_corpus(corpus, {0.7, 0.15, 0.15}, 7);
    REQUIRE(splits.size() == 3);
    CHECK(splits[0].size() == 84);
    CHECK(splits[1].size() == 18);
    CHECK(splits[2].size() == 18);

    auto again = split_corpus(corpus, {0.7, 0.15, 0.15}, 7);
    for (int i = 0; i < 3; ++i) CHECK(write_corpus(splits[i]) == write_corpus(again[i]));

    std::multiset<std::string> original, rejoined;
    for (const Sentence& s : corpus) original.insert(write_corpus({s}));
    for (const auto& part : splits)
        for (const Sentence& s : part) rejoined.insert(write_corpus({s}));
    CHECK(original == rejoined);

    auto counted = split_corpus_counts(corpus, {100, 10, 10}, 7);
    CHECK(counted[0].size() == 100);
    CHECK(counted[1].size() == 10);
    CHECK(counted[2].size() == 10);

    CHECK_THROWS_AS(split_corpus(corpus, {0.5, 0.2}, 7), Error);
    CHECK_THROWS_AS(split_corpus_counts(corpus, {100, 10}, 7), Error);
    CHECK_THROWS_AS(split_corpus(Corpus{}, {0.5, 0.5}, 7), Error);
}

TEST_CASE("the manifest echoes the configuration") {
    GrammarConfig c = base_config();
    nlohmann::json m = nlohmann::json::parse(synth_manifest(c));
    CHECK(m["seed"] == 7);
    CHECK(m["sentences"] == 120);
    CHECK(m["q"] == doctest::Approx(1.0));
    CHECK(m["subject_freq"] == doctest::Approx(0.35));
    CHECK(m["slot_dep"] == "OBL");
    CHECK(m["roles"].is_array());
}

TEST_CASE("local features cannot reach the interaction oracle") {
    GrammarConfig c = base_config();
    c.sentences = 400;
    Corpus corpus = generate_corpus(c);
    auto splits = split_corpus_counts(corpus, {300, 100}, 7);
    double ceiling = local_feature_ceiling(splits[0], splits[1], "OBL");
    double oracle = interaction_oracle_accuracy(splits[1], "OBL");
    CHECK(oracle == 1.0);  // q = 1: the rule is exact
    CHECK(ceiling < oracle);
    // majority prediction can't beat the larger branch frequency by much
    CHECK(ceiling > 0.4);
    CHECK(ceiling < 0.9);
}

TEST_CASE("slot accuracy measures model predictions on slot tokens only") {
    GrammarConfig c = base_config();
    c.sentences = 40;
    Corpus corpus = generate_corpus(c);
    auto gold = extract_instances(corpus);
    auto perfect = instances_as_predictions(gold);
    CHECK(slot_accuracy(corpus, gold, perfect, "OBL") == 1.0);

    auto always_a0 = perfect;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        int slot = slot_position(corpus[k]);
        always_a0[k].roles[static_cast<std::size_t>(slot - 1)] = "A0";
    }
    double acc = slot_accuracy(corpus, gold, always_a0, "OBL");
    int no_subject = 0;
    for (const Sentence& sent : corpus) {
        bool subject = false;
        for (const Token& t : sent.tokens)
            subject = subject || (t.pdeprel == "SBJ" && t.ppos == "NN");
        no_subject += subject ? 0 : 1;
    }
    CHECK(acc == doctest::Approx(static_cast<double>(no_subject) / corpus.size()));
}
