#include "srl/conll.hpp"

#include <fstream>
#include <sstream>

#include "srl/common.hpp"

namespace srl {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

int parse_int(const std::string& cell, const char* what, long line_no) {
    if (cell.empty()) throw ParseError(strcat_msg("empty ", what, " column"), line_no);
    int value = 0;
    for (char c : cell) {
        if (c < '0' || c > '9')
            throw ParseError(strcat_msg("non-numeric ", what, " value '", cell, "'"), line_no);
        value = value * 10 + (c - '0');
    }
    return value;
}

void finish_sentence(Corpus& corpus, Sentence& sent, long line_no) {
    if (sent.tokens.empty()) return;
    int n = sent.size();
    std::size_t n_preds = 0;
    for (const Token& t : sent.tokens) {
        if (t.fillpred) ++n_preds;
        if (t.head < 0 || t.head > n)
            throw ParseError(strcat_msg("HEAD ", t.head, " out of range 0..", n), line_no);
        if (t.phead < 0 || t.phead > n)
            throw ParseError(strcat_msg("PHEAD ", t.phead, " out of range 0..", n), line_no);
    }
    for (const Token& t : sent.tokens) {
        if (t.apreds.size() != n_preds)
            throw ParseError(strcat_msg("sentence has ", n_preds, " predicates but a row carries ",
                                        t.apreds.size(), " argument columns"),
                             line_no);
    }
    corpus.push_back(std::move(sent));
    sent = Sentence{};
}

}  // namespace

std::vector<int> Sentence::predicate_positions() const {
    std::vector<int> out;
    for (const Token& t : tokens) {
        if (t.fillpred) out.push_back(t.id);
    }
    return out;
}

Corpus parse_corpus(std::istream& in) {
    Corpus corpus;
    Sentence sent;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            finish_sentence(corpus, sent, line_no);
            continue;
        }
        std::vector<std::string> cells = split_tabs(line);
        if (cells.size() < 14)
            throw ParseError(strcat_msg("expected at least 14 tab-separated columns, got ",
                                        cells.size()),
                             line_no);
        Token t;
        t.id = parse_int(cells[0], "ID", line_no);
        if (t.id != sent.size() + 1)
            throw ParseError(strcat_msg("token ID ", t.id, " breaks the 1..n sequence (expected ",
                                        sent.size() + 1, ")"),
                             line_no);
        t.form = cells[1];
        t.lemma = cells[2];
        t.plemma = cells[3];
        t.pos = cells[4];
        t.ppos = cells[5];
        t.feat = cells[6];
        t.pfeat = cells[7];
        t.head = parse_int(cells[8], "HEAD", line_no);
        t.phead = parse_int(cells[9], "PHEAD", line_no);
        t.deprel = cells[10];
        t.pdeprel = cells[11];
        if (cells[12] == "Y")
            t.fillpred = true;
        else if (cells[12] == "_")
            t.fillpred = false;
        else
            throw ParseError(strcat_msg("FILLPRED must be Y or _, got '", cells[12], "'"),
                             line_no);
        t.pred = cells[13];
        if (t.fillpred && t.pred == "_")
            throw ParseError("FILLPRED row with empty PRED column", line_no);
        if (!t.fillpred && t.pred != "_")
            throw ParseError(strcat_msg("PRED '", t.pred, "' on a row not marked FILLPRED"),
                             line_no);
        t.apreds.assign(cells.begin() + 14, cells.end());
        sent.tokens.push_back(std::move(t));
    }
    finish_sentence(corpus, sent, line_no);
    return corpus;
}

Corpus parse_corpus_text(const std::string& text) {
    std::istringstream in(text);
    return parse_corpus(in);
}

Corpus parse_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open corpus file: ", path);
    return parse_corpus(in);
}

std::string write_corpus(const Corpus& corpus) {
    std::ostringstream out;
    for (const Sentence& sent : corpus) {
        for (const Token& t : sent.tokens) {
            out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.plemma << '\t' << t.pos
                << '\t' << t.ppos << '\t' << t.feat << '\t' << t.pfeat << '\t' << t.head << '\t'
                << t.phead << '\t' << t.deprel << '\t' << t.pdeprel << '\t'
                << (t.fillpred ? "Y" : "_") << '\t' << t.pred;
            for (const std::string& a : t.apreds) out << '\t' << a;
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open for writing: ", path);
    std::string text = write_corpus(corpus);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    require(out.good(), "write failed: ", path);
}

std::vector<PredicateInstance> extract_instances(const Corpus& corpus) {
    std::vector<PredicateInstance> instances;
    for (std::size_t si = 0; si < corpus.size(); ++si) {
        const Sentence& sent = corpus[si];
        int pred_index = 0;
        for (const Token& t : sent.tokens) {
            if (!t.fillpred) continue;
            PredicateInstance inst;
            inst.sentence_index = static_cast<int>(si);
            inst.j = t.id;
            inst.pred_index = pred_index;
            inst.gold_sense = t.pred;
            inst.gold_roles.reserve(sent.tokens.size());
            for (const Token& arg : sent.tokens)
                inst.gold_roles.push_back(arg.apreds[static_cast<std::size_t>(pred_index)]);
            instances.push_back(std::move(inst));
            ++pred_index;
        }
    }
    return instances;
}

std::string write_predictions(const Corpus& corpus,
                              const std::vector<InstancePrediction>& predictions) {
    Corpus out = corpus;
    std::size_t next = 0;
    for (Sentence& sent : out) {
        std::size_t n_preds = sent.predicate_positions().size();
        for (Token& t : sent.tokens) t.apreds.assign(n_preds, "_");
        std::size_t pred_index = 0;
        for (Token& t : sent.tokens) {
            if (!t.fillpred) continue;
            require(next < predictions.size(), "prediction count ", predictions.size(),
                    " is short of the corpus predicate count");
            const InstancePrediction& pred = predictions[next++];
            require(pred.roles.size() == sent.tokens.size(), "prediction for sentence with ",
                    sent.tokens.size(), " tokens carries ", pred.roles.size(), " role cells");
            t.pred = pred.sense;
            for (std::size_t i = 0; i < sent.tokens.size(); ++i)
                sent.tokens[i].apreds[pred_index] = pred.roles[i];
            ++pred_index;
        }
    }
    require(next == predictions.size(), "got ", predictions.size(), " predictions for ", next,
            " predicates");
    return write_corpus(out);
}

}  // namespace srl
