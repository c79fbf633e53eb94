#include "srl/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "srl/checkpoint.hpp"
#include "srl/common.hpp"

namespace srl {

namespace {

// Frequency-descending, then lexicographic; reserved entries prepended.
std::vector<std::string> ranked(const std::map<std::string, long>& counts, long min_count,
                                const std::string& reserved) {
    std::vector<std::pair<std::string, long>> items;
    for (const auto& [key, count] : counts) {
        if (key == reserved) continue;
        if (count >= min_count) items.emplace_back(key, count);
    }
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out{reserved};
    for (auto& [key, count] : items) out.push_back(key);
    return out;
}

}  // namespace

std::string Vocabulary::to_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

Vocabulary Vocabulary::build(const Corpus& corpus, int min_count, bool lowercase) {
    require(min_count >= 1, "min_count must be >= 1, got ", min_count);
    std::map<std::string, long> word_counts, lemma_counts, pos_counts, dep_counts, role_counts;
    std::map<std::string, std::map<std::string, long>> sense_counts;
    for (const Sentence& sent : corpus) {
        for (const Token& t : sent.tokens) {
            ++word_counts[lowercase ? to_lower(t.form) : t.form];
            ++lemma_counts[t.plemma];
            ++pos_counts[t.ppos];
            ++dep_counts[t.pdeprel];
            if (t.fillpred) ++sense_counts[t.plemma][t.pred];
            for (const std::string& role : t.apreds) {
                if (role != kNullRole) ++role_counts[role];
            }
        }
    }
    Vocabulary v;
    v.min_count_ = min_count;
    v.lowercase_ = lowercase;
    v.words_ = ranked(word_counts, min_count, kUnk);
    v.lemmas_ = ranked(lemma_counts, 1, kUnk);
    v.pos_tags_ = ranked(pos_counts, 1, kUnk);
    v.dep_labels_ = ranked(dep_counts, 1, kUnk);
    v.roles_ = ranked(role_counts, 1, kNullRole);
    for (const auto& [lemma, counts] : sense_counts) {
        std::vector<std::pair<std::string, long>> items(counts.begin(), counts.end());
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::vector<std::string> inventory;
        for (auto& [sense, count] : items) inventory.push_back(sense);
        v.senses_[lemma] = std::move(inventory);
    }
    v.reindex();
    return v;
}

void Vocabulary::reindex() {
    auto fill = [](std::unordered_map<std::string, int>& index,
                   const std::vector<std::string>& items) {
        index.clear();
        for (std::size_t i = 0; i < items.size(); ++i)
            index.emplace(items[i], static_cast<int>(i));
    };
    fill(word_index_, words_);
    fill(lemma_index_, lemmas_);
    fill(pos_index_, pos_tags_);
    fill(dep_index_, dep_labels_);
    fill(role_index_, roles_);
}

int Vocabulary::role_id(const std::string& role) const {
    auto it = role_index_.find(role);
    return it == role_index_.end() ? -1 : it->second;
}

std::vector<std::string> Vocabulary::sense_inventory(const std::string& plemma) const {
    auto it = senses_.find(plemma);
    if (it != senses_.end()) return it->second;
    return {plemma + ".01"};
}

int Vocabulary::sense_index(const std::string& plemma, const std::string& sense) const {
    std::vector<std::string> inventory = sense_inventory(plemma);
    for (std::size_t i = 0; i < inventory.size(); ++i) {
        if (inventory[i] == sense) return static_cast<int>(i);
    }
    return -1;
}

std::string Vocabulary::serialize() const {
    std::ostringstream out;
    out << "SRLVOCAB 1\n";
    out << "min_count " << min_count_ << "\n";
    out << "lowercase " << (lowercase_ ? 1 : 0) << "\n";
    auto section = [&](const char* name, const std::vector<std::string>& items) {
        out << name << " " << items.size() << "\n";
        for (const std::string& s : items) out << percent_encode(s) << "\n";
    };
    section("words", words_);
    section("lemmas", lemmas_);
    section("pos", pos_tags_);
    section("dep", dep_labels_);
    section("roles", roles_);
    out << "senses " << senses_.size() << "\n";
    for (const auto& [lemma, inventory] : senses_) {
        out << "lemma " << percent_encode(lemma) << " " << inventory.size() << "\n";
        for (const std::string& s : inventory) out << percent_encode(s) << "\n";
    }
    out << "end\n";
    return out.str();
}

Vocabulary Vocabulary::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next = [&]() {
        require(static_cast<bool>(std::getline(in, line)), "truncated vocabulary data");
        return line;
    };
    require(next() == "SRLVOCAB 1", "not vocabulary data (bad magic)");

    Vocabulary v;
    {
        std::istringstream ls(next());
        std::string kind;
        ls >> kind >> v.min_count_;
        require(kind == "min_count" && !ls.fail(), "bad vocabulary min_count line");
    }
    {
        std::istringstream ls(next());
        std::string kind;
        int flag = 0;
        ls >> kind >> flag;
        require(kind == "lowercase" && !ls.fail(), "bad vocabulary lowercase line");
        v.lowercase_ = flag != 0;
    }
    auto section = [&](const char* name, std::vector<std::string>& items) {
        std::istringstream ls(next());
        std::string kind;
        std::size_t count = 0;
        ls >> kind >> count;
        require(kind == name && !ls.fail(), "expected vocabulary section ", name);
        items.clear();
        for (std::size_t i = 0; i < count; ++i) items.push_back(percent_decode(next()));
    };
    section("words", v.words_);
    section("lemmas", v.lemmas_);
    section("pos", v.pos_tags_);
    section("dep", v.dep_labels_);
    section("roles", v.roles_);
    std::size_t n_lemmas = 0;
    {
        std::istringstream ls(next());
        std::string kind;
        ls >> kind >> n_lemmas;
        require(kind == "senses" && !ls.fail(), "expected vocabulary senses section");
    }
    for (std::size_t li = 0; li < n_lemmas; ++li) {
        std::istringstream ls(next());
        std::string kind, lemma;
        std::size_t count = 0;
        ls >> kind >> lemma >> count;
        require(kind == "lemma" && !ls.fail(), "bad vocabulary lemma line");
        std::vector<std::string> inventory;
        for (std::size_t i = 0; i < count; ++i) inventory.push_back(percent_decode(next()));
        require(!inventory.empty(), "empty sense inventory for ", lemma);
        v.senses_[percent_decode(lemma)] = std::move(inventory);
    }
    require(next() == "end", "missing vocabulary end marker");
    v.reindex();
    return v;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open for writing: ", path);
    std::string text = serialize();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    require(out.good(), "write failed: ", path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open vocabulary: ", path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(text);
}

std::uint64_t Vocabulary::content_hash() const { return hash64_str(serialize()); }

}  // namespace srl
