#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "srl/conll.hpp"

namespace srl {

// Index maps for model inputs plus per-lemma sense inventories. Entry 0 of
// the word/lemma/POS/dep maps is the UNK fallback; role 0 is the null role.
// Construction is deterministic: entries ordered by frequency, ties broken
// lexicographically.
class Vocabulary {
public:
    static constexpr const char* kUnk = "<unk>";
    static constexpr const char* kNullRole = "_";

    static Vocabulary build(const Corpus& corpus, int min_count = 1, bool lowercase = false);

    int word_id(const std::string& form) const {
        return lookup(word_index_, lowercase_ ? to_lower(form) : form);
    }
    int lemma_id(const std::string& plemma) const { return lookup(lemma_index_, plemma); }
    int pos_id(const std::string& ppos) const { return lookup(pos_index_, ppos); }
    int dep_id(const std::string& pdeprel) const { return lookup(dep_index_, pdeprel); }
    // -1 when the label was never seen in training.
    int role_id(const std::string& role) const;

    int n_words() const { return static_cast<int>(words_.size()); }
    int n_lemmas() const { return static_cast<int>(lemmas_.size()); }
    int n_pos() const { return static_cast<int>(pos_tags_.size()); }
    int n_dep() const { return static_cast<int>(dep_labels_.size()); }
    int n_roles() const { return static_cast<int>(roles_.size()); }

    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::string>& roles() const { return roles_; }
    const std::string& role_label(int id) const { return roles_[static_cast<std::size_t>(id)]; }

    bool has_lemma(const std::string& plemma) const { return senses_.count(plemma) > 0; }
    // Known inventory, or the {"<plemma>.01"} fallback for unseen lemmas.
    std::vector<std::string> sense_inventory(const std::string& plemma) const;
    // -1 when the sense string is not in the lemma's inventory.
    int sense_index(const std::string& plemma, const std::string& sense) const;
    const std::map<std::string, std::vector<std::string>>& sense_table() const { return senses_; }

    int min_count() const { return min_count_; }
    bool lowercase() const { return lowercase_; }
    static std::string to_lower(const std::string& s);

    std::string serialize() const;
    static Vocabulary deserialize(const std::string& text);
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);
    std::uint64_t content_hash() const;

private:
    std::vector<std::string> words_, lemmas_, pos_tags_, dep_labels_, roles_;
    std::unordered_map<std::string, int> word_index_, lemma_index_, pos_index_, dep_index_,
        role_index_;
    std::map<std::string, std::vector<std::string>> senses_;
    int min_count_ = 1;
    bool lowercase_ = false;

    static int lookup(const std::unordered_map<std::string, int>& index,
                      const std::string& key) {
        auto it = index.find(key);
        return it == index.end() ? 0 : it->second;
    }
    void reindex();
};

}  // namespace srl
