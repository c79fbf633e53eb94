#include <doctest.h>

#include "srl/conll.hpp"
#include "srl/vocab.hpp"

using namespace srl;

namespace {

Corpus two_sense_corpus() {
    return parse_corpus_text(
        "1\tshe\tshe\tshe\tPRP\tPRP\t_\t_\t2\t2\tSBJ\tSBJ\t_\t_\tA0\n"
        "2\tsatisfies\tsatisfy\tsatisfy\tVBZ\tVBZ\t_\t_\t0\t0\tROOT\tROOT\tY\tsatisfy.01\t_\n"
        "\n"
        "1\tit\tit\tit\tPRP\tPRP\t_\t_\t2\t2\tSBJ\tSBJ\t_\t_\tA0\n"
        "2\tsatisfies\tsatisfy\tsatisfy\tVBZ\tVBZ\t_\t_\t0\t0\tROOT\tROOT\tY\tsatisfy.02\t_\n"
        "3\tfully\tfully\tfully\tRB\tRB\t_\t_\t2\t2\tADV\tADV\t_\t_\tAM\n"
        "\n");
}

}  // namespace

TEST_CASE("sense inventories collect observed senses per lemma") {
    Vocabulary v = Vocabulary::build(two_sense_corpus());
    CHECK(v.sense_inventory("satisfy") == std::vector<std::string>{"satisfy.01", "satisfy.02"});
    CHECK(v.sense_index("satisfy", "satisfy.02") == 1);
    CHECK(v.sense_index("satisfy", "satisfy.09") == -1);
    CHECK(v.has_lemma("satisfy"));
    CHECK_FALSE(v.has_lemma("walk"));
    CHECK(v.sense_inventory("walk") == std::vector<std::string>{"walk.01"});
}

TEST_CASE("words under the frequency cutoff map to the unknown index") {
    Vocabulary v = Vocabulary::build(two_sense_corpus(), 2);
    CHECK(v.word_id("satisfies") != 0);
    CHECK(v.word_id("she") == 0);
    CHECK(v.word_id("never-seen") == 0);
    CHECK(v.words()[0] == Vocabulary::kUnk);
}

TEST_CASE("role zero is the null role and unseen labels get -1") {
    Vocabulary v = Vocabulary::build(two_sense_corpus());
    CHECK(v.role_label(0) == Vocabulary::kNullRole);
    CHECK(v.role_id("A0") > 0);
    CHECK(v.role_id("A7") == -1);
}

TEST_CASE("construction is deterministic") {
    CHECK(Vocabulary::build(two_sense_corpus()).serialize() ==
          Vocabulary::build(two_sense_corpus()).serialize());
}

TEST_CASE("serialize round trips including the hash") {
    Vocabulary v = Vocabulary::build(two_sense_corpus(), 2);
    Vocabulary w = Vocabulary::deserialize(v.serialize());
    CHECK(v.serialize() == w.serialize());
    CHECK(v.content_hash() == w.content_hash());
    CHECK(w.min_count() == 2);
    CHECK(w.word_id("satisfies") == v.word_id("satisfies"));
    CHECK(w.sense_inventory("satisfy") == v.sense_inventory("satisfy"));
}

TEST_CASE("lowercasing folds lookups when enabled") {
    Corpus c = parse_corpus_text(
        "1\tFully\tfully\tfully\tRB\tRB\t_\t_\t0\t0\tROOT\tROOT\t_\t_\n"
        "\n");
    Vocabulary plain = Vocabulary::build(c);
    CHECK(plain.word_id("fully") == 0);
    CHECK(plain.word_id("Fully") != 0);
    Vocabulary folded = Vocabulary::build(c, 1, true);
    CHECK(folded.word_id("fully") != 0);
    CHECK(folded.word_id("FULLY") == folded.word_id("fully"));
    CHECK(Vocabulary::deserialize(folded.serialize()).lowercase());
}
