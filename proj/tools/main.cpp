#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srl/checkpoint.hpp"
#include "srl/common.hpp"
#include "srl/config.hpp"
#include "srl/eval.hpp"
#include "srl/model_io.hpp"
#include "srl/synth.hpp"
#include "srl/trainer.hpp"

namespace fs = std::filesystem;
using namespace srl;

namespace {

Config resolve_config(const std::string& path, const std::vector<std::string>& sets) {
    Config c = Config::defaults();
    if (!path.empty()) c.load_file(path);
    for (const std::string& kv : sets) c.set_kv(kv);
    return c;
}

BaselineConfig baseline_config(const Config& c) {
    BaselineConfig b;
    b.emb.d_w = c.geti("d_w");
    b.emb.d_dep = c.geti("d_dep");
    b.emb.d_pos = c.geti("d_pos");
    b.d_h = c.geti("d_h");
    b.layers = c.geti("layers");
    b.d_rho0 = c.geti("d_rho0");
    b.d_rho1 = c.geti("d_rho1");
    b.d_pi = c.geti("d_pi");
    b.dropout = c.getf("dropout");
    b.rdropout = c.getf("rdropout");
    b.pretrained = c.gets("pretrained");
    return b;
}

RefinerConfig refiner_config(const Config& c) {
    RefinerConfig r;
    r.d_h = c.geti("d_h");
    r.layers = c.geti("layers");
    r.d_g = c.geti("d_g");
    r.d_r = c.geti("d_r");
    r.d_pi = c.geti("d_pi");
    r.structured = c.gets("mode") == "structured";
    r.tied = c.getb("tied");
    r.dropout = c.getf("dropout");
    r.rdropout = c.getf("rdropout");
    return r;
}

TrainOptions train_options(const Config& c, bool stage2) {
    TrainOptions t;
    t.epochs = c.geti(stage2 ? "epochs_refiner" : "epochs_baseline");
    t.batch = c.geti("batch");
    t.lr = c.getf("lr");
    t.patience = c.geti("patience");
    t.seed = static_cast<std::uint64_t>(c.getl("seed"));
    t.iterations = c.geti("iterations");
    t.lambda_role = c.getf("lambda_role");
    t.lambda_sense = c.getf("lambda_sense");
    t.gumbel = c.getb("gumbel");
    t.threads = c.geti("threads");
    return t;
}

GrammarConfig grammar_config(const Config& c) {
    GrammarConfig g;
    g.seed = static_cast<std::uint64_t>(c.getl("seed"));
    g.sentences = c.geti("synth_sentences");
    g.q = c.getf("synth_q");
    g.slot_freq = c.getf("synth_slot_freq");
    g.subject_freq = c.getf("synth_subject_freq");
    g.distractor_freq = c.getf("synth_distractor_freq");
    g.dir_freq = c.getf("synth_dir_freq");
    g.adv_freq = c.getf("synth_adv_freq");
    g.lemmas = c.geti("synth_lemmas");
    g.two_sense = c.geti("synth_two_sense");
    g.min_filler = c.geti("synth_min_filler");
    g.max_filler = c.geti("synth_max_filler");
    return g;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot write ", path);
    out << text;
    out.flush();
    require(out.good(), "write failed: ", path);
}

std::vector<double> parse_parts(const std::string& csv) {
    std::vector<double> parts;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        require(!item.empty(), "empty entry in split list: ", csv);
        parts.push_back(std::stod(item));
    }
    require(!parts.empty(), "empty split list");
    return parts;
}

std::vector<std::string> parse_labels(const std::string& csv) {
    std::vector<std::string> labels;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) labels.push_back(item);
    require(!labels.empty(), "empty label list");
    return labels;
}

// ---- gen-synth ----------------------------------------------------------

struct GenSynthOpts {
    std::string config, out, split = "0.7,0.15,0.15";
    std::vector<std::string> sets;
    std::int64_t seed = 0;
    int sentences = 0;
    bool seed_given = false, sentences_given = false;
};

void run_gen_synth(const GenSynthOpts& o) {
    Config c = resolve_config(o.config, o.sets);
    if (o.seed_given) c.set("seed", std::to_string(o.seed));
    if (o.sentences_given) c.set("synth_sentences", std::to_string(o.sentences));
    GrammarConfig gc = grammar_config(c);
    Corpus corpus = generate_corpus(gc);

    std::vector<double> parts = parse_parts(o.split);
    require(parts.size() >= 2 && parts.size() <= 3, "split must name 2 or 3 parts, got ",
            parts.size());
    bool fractional = true;
    for (double p : parts) fractional = fractional && p <= 1.0;
    std::vector<Corpus> splits;
    if (fractional) {
        splits = split_corpus(corpus, parts, gc.seed);
    } else {
        std::vector<int> counts;
        for (double p : parts) counts.push_back(static_cast<int>(p));
        splits = split_corpus_counts(corpus, counts, gc.seed);
    }

    fs::create_directories(o.out);
    write_text_file(o.out + "/synth.conll", write_corpus(corpus));
    const char* names[] = {"train", "dev", "test"};
    nlohmann::json manifest = nlohmann::json::parse(synth_manifest(gc));
    manifest["split"] = parts;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        std::string file = std::string(names[i]) + ".conll";
        write_text_file(o.out + "/" + file, write_corpus(splits[i]));
        manifest["files"][names[i]] = file;
        std::cerr << names[i] << ": " << splits[i].size() << " sentences\n";
    }
    write_text_file(o.out + "/manifest.json", manifest.dump(2) + "\n");
    std::cerr << "wrote " << corpus.size() << " sentences to " << o.out << "\n";
}

// ---- train-baseline -----------------------------------------------------

struct TrainBaselineOpts {
    std::string config, train, dev, out;
    std::vector<std::string> sets;
    std::int64_t seed = 0;
    int threads = 0;
    bool seed_given = false, threads_given = false;
};

void run_train_baseline(const TrainBaselineOpts& o) {
    Config c = resolve_config(o.config, o.sets);
    if (o.seed_given) c.set("seed", std::to_string(o.seed));
    if (o.threads_given) c.set("threads", std::to_string(o.threads));

    Corpus train = parse_corpus_file(o.train);
    Corpus dev = parse_corpus_file(o.dev);
    Vocabulary vocab = Vocabulary::build(train, c.geti("min_count"), c.getb("lowercase"));

    Rng root(static_cast<std::uint64_t>(c.getl("seed")));
    Rng init = root.split();
    ParamStore store;
    BaselineModel model(store, vocab, baseline_config(c), init);
    TrainOptions opts = train_options(c, false);
    opts.seed = root.next_u64();

    TrainResult res = train_baseline(model, train, dev, opts, std::cerr);
    fs::create_directories(o.out);
    vocab.save(o.out + "/vocab.txt");
    save_baseline(o.out + "/baseline.ckpt", store, vocab, model.config());
    std::cerr << "best dev F1 " << res.best_dev_f1 << " at epoch " << res.best_epoch << " ("
              << res.epochs_run << " epochs run)\n";
}

// ---- train-refiner ------------------------------------------------------

struct TrainRefinerOpts {
    std::string config, train, dev, baseline, vocab, out, mode;
    std::vector<std::string> sets;
    std::int64_t seed = 0;
    int threads = 0, iterations = 0;
    bool untied = false, no_gumbel = false;
    bool seed_given = false, threads_given = false, iterations_given = false,
         mode_given = false;
};

void run_train_refiner(const TrainRefinerOpts& o) {
    Config c = resolve_config(o.config, o.sets);
    if (o.seed_given) c.set("seed", std::to_string(o.seed));
    if (o.threads_given) c.set("threads", std::to_string(o.threads));
    if (o.iterations_given) c.set("iterations", std::to_string(o.iterations));
    if (o.mode_given) c.set("mode", o.mode);
    if (o.untied) c.set("tied", "false");
    if (o.no_gumbel) c.set("gumbel", "false");
    require(c.gets("mode") == "structured" || c.gets("mode") == "self",
            "refiner training needs --mode structured or self, got ", c.gets("mode"));

    Corpus train = parse_corpus_file(o.train);
    Corpus dev = parse_corpus_file(o.dev);
    Vocabulary vocab = Vocabulary::load(o.vocab);
    ParamStore baseline_store;
    BaselineModel baseline = load_baseline(o.baseline, baseline_store, vocab);

    RefinerConfig rc = refiner_config(c);
    rc.d_pi = baseline.config().d_pi;
    Rng root(static_cast<std::uint64_t>(c.getl("seed")));
    Rng init = root.split();
    ParamStore store;
    RefinerModel refiner(store, baseline.input_width(), vocab.n_roles(), rc, init);
    TrainOptions opts = train_options(c, true);
    opts.seed = root.next_u64();

    TrainResult res = train_refiner(refiner, baseline, train, dev, opts, std::cerr);
    fs::create_directories(o.out);
    save_refiner(o.out + "/refiner.ckpt", store, rc, baseline.input_width(), vocab.n_roles(),
                 hash_hex(hash64_file(o.baseline)), hash_hex(vocab.content_hash()));
    std::cerr << "best dev F1 " << res.best_dev_f1 << " at epoch " << res.best_epoch << " ("
              << res.epochs_run << " epochs run)\n";
}

// ---- predict ------------------------------------------------------------

struct PredictOpts {
    std::string config, input, model, vocab, refiner, out, mode;
    std::vector<std::string> sets;
    std::int64_t seed = 0;
    int threads = 0, iterations = 0;
    bool seed_given = false, threads_given = false, iterations_given = false,
         mode_given = false;
};

void run_predict(const PredictOpts& o) {
    Config c = resolve_config(o.config, o.sets);
    if (o.threads_given) c.set("threads", std::to_string(o.threads));
    if (o.iterations_given) c.set("iterations", std::to_string(o.iterations));
    if (o.mode_given) c.set("mode", o.mode);
    std::string mode = c.gets("mode");
    require(mode == "baseline" || mode == "self" || mode == "structured",
            "mode must be baseline, self or structured, got ", mode);
    int iterations = mode == "baseline" ? 0 : c.geti("iterations");

    Corpus input = parse_corpus_file(o.input);
    Vocabulary vocab = Vocabulary::load(o.vocab);
    ParamStore baseline_store;
    BaselineModel baseline = load_baseline(o.model, baseline_store, vocab);

    ParamStore refiner_store;
    std::optional<RefinerModel> refiner;
    if (!o.refiner.empty() && iterations > 0) {
        LoadedRefiner loaded = load_refiner(o.refiner, refiner_store);
        require(loaded.baseline_hash_hex == hash_hex(hash64_file(o.model)),
                "refiner was trained against a different baseline checkpoint");
        require(loaded.vocab_hash_hex == hash_hex(vocab.content_hash()),
                "refiner was trained with a different vocabulary");
        require(loaded.model.config().structured == (mode == "structured"),
                "refiner checkpoint is ",
                loaded.model.config().structured ? "structured" : "self", " but mode is ",
                mode);
        refiner.emplace(loaded.model);
    }
    require(iterations == 0 || refiner.has_value(),
            "mode ", mode, " with iterations ", iterations, " needs --refiner");

    auto preds = predict_instances(baseline, refiner ? &*refiner : nullptr, input, iterations,
                                   c.geti("threads"));
    write_text_file(o.out, write_predictions(input, preds));
    std::cerr << "wrote " << preds.size() << " instance predictions to " << o.out << "\n";
}

// ---- evaluate -----------------------------------------------------------

struct EvaluateOpts {
    std::string gold, pred, out, json;
};

void run_evaluate(const EvaluateOpts& o) {
    auto gold_insts = extract_instances(parse_corpus_file(o.gold));
    auto pred_insts = extract_instances(parse_corpus_file(o.pred));
    require_aligned(gold_insts, pred_insts);
    EvalReport rep = evaluate_predictions(gold_insts, instances_as_predictions(pred_insts));
    std::cerr << report_text(rep);
    if (!o.out.empty()) write_text_file(o.out, report_text(rep));
    if (!o.json.empty()) write_text_file(o.json, report_json(rep));
}

// ---- analyze ------------------------------------------------------------

struct AnalyzeOpts {
    std::string gold, first, second, out;
    std::string labels = "_,A0,A1,A2";
};

void run_analyze(const AnalyzeOpts& o) {
    auto gold_insts = extract_instances(parse_corpus_file(o.gold));
    auto first_insts = extract_instances(parse_corpus_file(o.first));
    auto second_insts = extract_instances(parse_corpus_file(o.second));
    require_aligned(gold_insts, first_insts);
    require_aligned(gold_insts, second_insts);
    auto first = instances_as_predictions(first_insts);
    auto second = instances_as_predictions(second_insts);

    ViolationCounts vf = constraint_violations(first);
    ViolationCounts vs = constraint_violations(second);
    ConfusionMatrices m = confusion_and_correction(gold_insts, first, second,
                                                   parse_labels(o.labels));

    fs::create_directories(o.out);
    std::ostringstream text;
    text << "first   " << violations_text(vf);
    text << "second  " << violations_text(vs);
    text << matrices_text(m);
    write_text_file(o.out + "/analysis.txt", text.str());

    std::ostringstream json;
    json << nlohmann::json{{"group", "violations"},
                           {"file", o.first},
                           {"unique", vf.unique},
                           {"continuation", vf.continuation},
                           {"reference", vf.reference}}
                .dump()
         << "\n";
    json << nlohmann::json{{"group", "violations"},
                           {"file", o.second},
                           {"unique", vs.unique},
                           {"continuation", vs.continuation},
                           {"reference", vs.reference}}
                .dump()
         << "\n";
    write_text_file(o.out + "/analysis.json", json.str());
    write_text_file(o.out + "/confusion.csv", matrix_csv(m.labels, m.confusion));
    write_text_file(o.out + "/correction.csv", matrix_csv(m.labels, m.correction));
    std::cerr << text.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dependency semantic role labeling: factorized baseline with iterative "
                 "structured refinement"};
    app.require_subcommand(1);

    GenSynthOpts gen;
    CLI::App* cgen = app.add_subcommand("gen-synth", "generate a synthetic corpus and splits");
    cgen->add_option("--config", gen.config, "key=value configuration file");
    cgen->add_option("--set", gen.sets, "configuration override key=value")->take_all();
    auto* gen_seed = cgen->add_option("--seed", gen.seed, "generator seed");
    auto* gen_sent = cgen->add_option("--sentences", gen.sentences, "sentence count");
    cgen->add_option("--split", gen.split, "fractions (<=1) or counts, comma separated");
    cgen->add_option("--out", gen.out, "output directory")->required();

    TrainBaselineOpts tb;
    CLI::App* ctb = app.add_subcommand("train-baseline", "stage 1: train the factorized model");
    ctb->add_option("--config", tb.config, "key=value configuration file");
    ctb->add_option("--set", tb.sets, "configuration override key=value")->take_all();
    ctb->add_option("--train", tb.train, "training corpus")->required();
    ctb->add_option("--dev", tb.dev, "development corpus")->required();
    auto* tb_seed = ctb->add_option("--seed", tb.seed, "training seed");
    auto* tb_threads = ctb->add_option("--threads", tb.threads, "worker cap");
    ctb->add_option("--out", tb.out, "output directory")->required();

    TrainRefinerOpts tr;
    CLI::App* ctr = app.add_subcommand("train-refiner", "stage 2: train the refinement networks");
    ctr->add_option("--config", tr.config, "key=value configuration file");
    ctr->add_option("--set", tr.sets, "configuration override key=value")->take_all();
    ctr->add_option("--train", tr.train, "training corpus")->required();
    ctr->add_option("--dev", tr.dev, "development corpus")->required();
    ctr->add_option("--baseline", tr.baseline, "frozen baseline checkpoint")->required();
    ctr->add_option("--vocab", tr.vocab, "vocabulary file")->required();
    auto* tr_seed = ctr->add_option("--seed", tr.seed, "training seed");
    auto* tr_threads = ctr->add_option("--threads", tr.threads, "worker cap");
    auto* tr_iters = ctr->add_option("--iterations", tr.iterations, "refinement steps");
    auto* tr_mode = ctr->add_option("--mode", tr.mode, "structured | self")
                        ->check(CLI::IsMember({"structured", "self"}));
    ctr->add_flag("--untied", tr.untied, "do not tie corrector projections");
    ctr->add_flag("--no-gumbel", tr.no_gumbel, "train on unperturbed initial distributions");
    ctr->add_option("--out", tr.out, "output directory")->required();

    PredictOpts pr;
    CLI::App* cpr = app.add_subcommand("predict", "decode a corpus with a trained model");
    cpr->add_option("input", pr.input, "input corpus")->required();
    cpr->add_option("--config", pr.config, "key=value configuration file");
    cpr->add_option("--set", pr.sets, "configuration override key=value")->take_all();
    cpr->add_option("--model", pr.model, "baseline checkpoint")->required();
    cpr->add_option("--vocab", pr.vocab, "vocabulary file")->required();
    cpr->add_option("--refiner", pr.refiner, "refiner checkpoint");
    auto* pr_iters = cpr->add_option("--iterations", pr.iterations, "refinement steps");
    auto* pr_mode = cpr->add_option("--mode", pr.mode, "baseline | self | structured")
                        ->check(CLI::IsMember({"baseline", "self", "structured"}));
    auto* pr_threads = cpr->add_option("--threads", pr.threads, "worker cap");
    cpr->add_option("--out", pr.out, "output corpus file")->required();

    EvaluateOpts ev;
    CLI::App* cev = app.add_subcommand("evaluate", "score a prediction file against gold");
    cev->add_option("gold", ev.gold, "gold corpus")->required();
    cev->add_option("pred", ev.pred, "predicted corpus")->required();
    cev->add_option("--out", ev.out, "report file (plain text)");
    cev->add_option("--json", ev.json, "report file (JSON records)");

    AnalyzeOpts an;
    CLI::App* can = app.add_subcommand("analyze", "constraint violations and matrices for two "
                                                  "prediction files");
    can->add_option("gold", an.gold, "gold corpus")->required();
    can->add_option("first", an.first, "first prediction file (e.g. baseline)")->required();
    can->add_option("second", an.second, "second prediction file (e.g. refined)")->required();
    can->add_option("--labels", an.labels, "matrix label subset, comma separated");
    can->add_option("--out", an.out, "output directory")->required();

    try {
        app.parse(argc, argv);
        gen.seed_given = gen_seed->count() > 0;
        gen.sentences_given = gen_sent->count() > 0;
        tb.seed_given = tb_seed->count() > 0;
        tb.threads_given = tb_threads->count() > 0;
        tr.seed_given = tr_seed->count() > 0;
        tr.threads_given = tr_threads->count() > 0;
        tr.iterations_given = tr_iters->count() > 0;
        tr.mode_given = tr_mode->count() > 0;
        pr.threads_given = pr_threads->count() > 0;
        pr.iterations_given = pr_iters->count() > 0;
        pr.mode_given = pr_mode->count() > 0;

        if (cgen->parsed()) run_gen_synth(gen);
        if (ctb->parsed()) run_train_baseline(tb);
        if (ctr->parsed()) run_train_refiner(tr);
        if (cpr->parsed()) run_predict(pr);
        if (cev->parsed()) run_evaluate(ev);
        if (can->parsed()) run_analyze(an);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
