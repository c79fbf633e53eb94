#include "srl/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "srl/common.hpp"
#include "srl/optimizer.hpp"

namespace srl {
namespace {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> hold(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        });
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

const std::string& predicate_lemma(const Corpus& corpus, const PredicateInstance& inst) {
    return corpus[static_cast<std::size_t>(inst.sentence_index)]
        .tokens[static_cast<std::size_t>(inst.j - 1)]
        .plemma;
}

int inventory_index(const std::vector<std::string>& inventory, const std::string& sense) {
    for (std::size_t k = 0; k < inventory.size(); ++k)
        if (inventory[k] == sense) return static_cast<int>(k);
    return -1;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct DevOutcome {
    double mean_loss = 0.0;
    EvalReport report;
};

void log_epoch(std::ostream& log, int epoch, double train_loss, const DevOutcome& dev) {
    log << "epoch " << epoch << " split train loss " << fmt(train_loss) << "\n";
    log << "epoch " << epoch << " split dev loss " << fmt(dev.mean_loss) << " P "
        << fmt(dev.report.precision) << " R " << fmt(dev.report.recall) << " F1 "
        << fmt(dev.report.f1) << "\n";
    log.flush();
}

// Snapshot bookkeeping shared by both stages: strict improvements reset
// patience; ties refresh the snapshot so the latest equal-best epoch wins.
struct BestTracker {
    double best = -1.0;
    int best_epoch = 0;
    int bad = 0;
    std::vector<Tensor> snapshot;

    explicit BestTracker(const ParamStore& store) : snapshot(store.snapshot_values()) {}

    bool observe(double f1, int epoch, const ParamStore& store) {
        if (f1 > best) {
            best = f1;
            best_epoch = epoch;
            bad = 0;
            snapshot = store.snapshot_values();
        } else if (f1 == best) {
            best_epoch = epoch;
            ++bad;
            snapshot = store.snapshot_values();
        } else {
            ++bad;
        }
        return true;
    }
};

DevOutcome evaluate_baseline_dev(const BaselineModel& model, const Corpus& dev,
                                 const std::vector<PredicateInstance>& insts, int threads) {
    std::vector<InstancePrediction> preds(insts.size());
    std::vector<double> losses(insts.size(), 0.0);
    parallel_for(insts.size(), threads, [&](std::size_t k) {
        const PredicateInstance& inst = insts[k];
        const Sentence& sent = dev[static_cast<std::size_t>(inst.sentence_index)];
        Graph g;
        Rng rng(0);
        auto out = model.run(g, sent, inst.j, predicate_lemma(dev, inst), false, rng);
        losses[k] = static_cast<double>(g.value(model.loss(g, out, inst)).item());
        preds[k] = decode_prediction(softmax_rows_value(g.value(out.i_alpha)),
                                     softmax_vec_value(g.value(out.i_pi)), model.vocab(),
                                     out.inventory);
    });
    DevOutcome outcome;
    for (double l : losses) outcome.mean_loss += l;
    if (!insts.empty()) outcome.mean_loss /= static_cast<double>(insts.size());
    outcome.report = evaluate_predictions(insts, preds);
    return outcome;
}

}  // namespace

TrainResult train_baseline(BaselineModel& model, const Corpus& train, const Corpus& dev,
                           const TrainOptions& opts, std::ostream& log) {
    require(opts.epochs >= 0, "negative epoch count ", opts.epochs);
    require(opts.batch >= 1, "batch size must be positive, got ", opts.batch);
    std::vector<PredicateInstance> train_insts = extract_instances(train);
    std::vector<PredicateInstance> dev_insts = extract_instances(dev);
    require(!train_insts.empty(), "training corpus has no predicates");

    ParamStore& store = model.params();
    Adam adam(store, AdamConfig{opts.lr});
    Rng root(opts.seed);
    BestTracker tracker(store);
    TrainResult result;

    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        result.epochs_run = epoch;
        Rng erng = root.split();
        std::vector<std::size_t> order(train_insts.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[erng.below(i)]);

        double loss_sum = 0.0;
        long loss_count = 0;
        bool aborted = false;
        for (std::size_t start = 0; start < order.size() && !aborted;
             start += static_cast<std::size_t>(opts.batch)) {
            std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(opts.batch));
            std::map<int, std::vector<std::size_t>> by_sentence;
            for (std::size_t k = start; k < stop; ++k)
                by_sentence[train_insts[order[k]].sentence_index].push_back(order[k]);
            double inv_batch = 1.0f / static_cast<double>(stop - start);

            for (const auto& [sentence_index, members] : by_sentence) {
                const Sentence& sent = train[static_cast<std::size_t>(sentence_index)];
                Graph g;
                auto enc = model.encode(g, sent, true, erng);
                Var total = -1;
                for (std::size_t k : members) {
                    const PredicateInstance& inst = train_insts[k];
                    auto out = model.score(g, enc, inst.j, predicate_lemma(train, inst));
                    Var li = model.loss(g, out, inst);
                    loss_sum += static_cast<double>(g.value(li).item());
                    ++loss_count;
                    total = total < 0 ? li : g.add(total, li);
                }
                if (!std::isfinite(g.value(total).item())) {
                    log << "epoch " << epoch << " batch " << start / opts.batch
                        << " non-finite loss; epoch aborted\n";
                    store.zero_grads();
                    aborted = true;
                    break;
                }
                g.backward(g.scale(total, inv_batch));
            }
            if (!aborted) adam.step();
        }

        double train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        DevOutcome dev_outcome = evaluate_baseline_dev(model, dev, dev_insts, opts.threads);
        log_epoch(log, epoch, train_loss, dev_outcome);
        tracker.observe(dev_outcome.report.f1, epoch, store);
        if (tracker.bad > opts.patience) break;
    }

    store.restore_values(tracker.snapshot);
    result.best_dev_f1 = tracker.best;
    result.best_epoch = tracker.best_epoch;
    return result;
}

std::vector<FrozenInstance> freeze_baseline_outputs(const BaselineModel& model,
                                                    const Corpus& corpus, int threads) {
    std::vector<PredicateInstance> insts = extract_instances(corpus);
    std::vector<FrozenInstance> frozen(insts.size());
    int d_pi = model.config().d_pi;
    parallel_for(insts.size(), threads, [&](std::size_t k) {
        const PredicateInstance& inst = insts[k];
        const Sentence& sent = corpus[static_cast<std::size_t>(inst.sentence_index)];
        const std::string& plemma = predicate_lemma(corpus, inst);
        Graph g;
        Rng rng(0);
        auto out = model.run(g, sent, inst.j, plemma, false, rng);
        FrozenInstance& f = frozen[k];
        f.x = g.value(out.x);
        f.i_alpha = g.value(out.i_alpha);
        f.i_pi = g.value(out.i_pi);
        f.pi = model.vocab().has_lemma(plemma)
                   ? model.params().get("sense." + plemma).value
                   : Tensor::zeros({1, d_pi});
        f.inventory = out.inventory;
        f.gold_roles = model.gold_role_ids(inst);
        f.gold_sense = inventory_index(out.inventory, inst.gold_sense);
        f.j = inst.j;
        f.sentence_index = inst.sentence_index;
    });
    return frozen;
}

double gumbel_flip_fraction(const std::vector<FrozenInstance>& frozen, double lambda, Rng& rng) {
    long total = 0, flips = 0;
    for (const FrozenInstance& f : frozen) {
        Tensor noisy = gumbel_softmax_rows(f.i_alpha, lambda, rng);
        for (int i = 0; i < f.i_alpha.rows(); ++i) {
            ++total;
            flips += argmax_row(noisy, i) != argmax_row(f.i_alpha, i) ? 1 : 0;
        }
    }
    return total > 0 ? static_cast<double>(flips) / static_cast<double>(total) : 0.0;
}

double gumbel_sense_flip_fraction(const std::vector<FrozenInstance>& frozen, double lambda,
                                  Rng& rng) {
    long total = 0, flips = 0;
    for (const FrozenInstance& f : frozen) {
        Tensor noisy = gumbel_softmax_vec(f.i_pi, lambda, rng);
        ++total;
        flips += argmax(noisy) != argmax(f.i_pi) ? 1 : 0;
    }
    return total > 0 ? static_cast<double>(flips) / static_cast<double>(total) : 0.0;
}

namespace {

std::vector<RefinerModel::Step> frozen_steps(const RefinerModel& refiner, Graph& g,
                                             const FrozenInstance& f, const Tensor& i_alpha,
                                             const Tensor& i_pi, const Tensor& r0,
                                             const Tensor& p0, int iterations, bool train,
                                             Rng& rng) {
    return refiner.iterate(g, g.constant(f.x), g.constant(i_alpha), g.constant(i_pi),
                           g.constant(f.pi), g.constant(r0), g.constant(p0), f.j, iterations,
                           train, rng);
}

Var steps_loss(Graph& g, const std::vector<RefinerModel::Step>& steps,
               const FrozenInstance& f) {
    Var total = -1;
    for (std::size_t t = 1; t < steps.size(); ++t) {
        Var role = g.mean_vec(g.margin_ce_rows(steps[t].role_logits, f.gold_roles, 1.0f));
        Var term = f.gold_sense >= 0
                       ? g.add(role, g.margin_ce_vec(steps[t].sense_logits, f.gold_sense, 1.0f))
                       : role;
        total = total < 0 ? term : g.add(total, term);
    }
    return total;
}

DevOutcome evaluate_refiner_dev(const RefinerModel& refiner, const Vocabulary& vocab,
                                const std::vector<FrozenInstance>& frozen,
                                const std::vector<PredicateInstance>& insts, int iterations,
                                int threads) {
    std::vector<InstancePrediction> preds(frozen.size());
    std::vector<double> losses(frozen.size(), 0.0);
    parallel_for(frozen.size(), threads, [&](std::size_t k) {
        const FrozenInstance& f = frozen[k];
        Tensor r0 = softmax_rows_value(f.i_alpha);
        Tensor p0 = softmax_vec_value(f.i_pi);
        Graph g;
        Rng rng(0);
        auto steps = frozen_steps(refiner, g, f, f.i_alpha, f.i_pi, r0, p0, iterations, false, rng);
        losses[k] = static_cast<double>(g.value(steps_loss(g, steps, f)).item());
        preds[k] = decode_prediction(g.value(steps.back().R), g.value(steps.back().P), vocab,
                                     f.inventory);
    });
    DevOutcome outcome;
    for (double l : losses) outcome.mean_loss += l;
    if (!frozen.empty()) outcome.mean_loss /= static_cast<double>(frozen.size());
    outcome.report = evaluate_predictions(insts, preds);
    return outcome;
}

}  // namespace

TrainResult train_refiner(RefinerModel& refiner, const BaselineModel& baseline,
                          const Corpus& train, const Corpus& dev, const TrainOptions& opts,
                          std::ostream& log) {
    require(opts.iterations >= 1, "stage 2 needs at least one refinement iteration, got ",
            opts.iterations);
    require(opts.epochs >= 0, "negative epoch count ", opts.epochs);
    require(opts.batch >= 1, "batch size must be positive, got ", opts.batch);
    require(opts.lambda_role >= 0.0f && opts.lambda_sense >= 0.0f,
            "Gumbel scales must be nonnegative");
    require(refiner.config().d_pi == baseline.config().d_pi,
            "sense widths differ: refiner ", refiner.config().d_pi, ", baseline ",
            baseline.config().d_pi);
    require(refiner.n_roles() == baseline.vocab().n_roles(), "role counts differ: refiner ",
            refiner.n_roles(), ", vocabulary ", baseline.vocab().n_roles());

    std::vector<PredicateInstance> dev_insts = extract_instances(dev);
    std::vector<FrozenInstance> frozen_train =
        freeze_baseline_outputs(baseline, train, opts.threads);
    std::vector<FrozenInstance> frozen_dev = freeze_baseline_outputs(baseline, dev, opts.threads);
    require(!frozen_train.empty(), "training corpus has no predicates");

    TrainResult result;
    Rng root(opts.seed);
    {
        Rng role_rng = root.split();
        Rng sense_rng = root.split();
        result.role_flip_fraction =
            gumbel_flip_fraction(frozen_train, opts.lambda_role, role_rng);
        result.sense_flip_fraction =
            gumbel_sense_flip_fraction(frozen_train, opts.lambda_sense, sense_rng);
        log << "gumbel role flip fraction " << fmt(result.role_flip_fraction) << " lambda "
            << opts.lambda_role << "\n";
        log << "gumbel sense flip fraction " << fmt(result.sense_flip_fraction) << " lambda "
            << opts.lambda_sense << "\n";
    }

    ParamStore& store = refiner.params();
    Adam adam(store, AdamConfig{opts.lr});
    BestTracker tracker(store);

    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        result.epochs_run = epoch;
        Rng erng = root.split();
        std::vector<std::size_t> order(frozen_train.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[erng.below(i)]);

        double loss_sum = 0.0;
        long loss_count = 0;
        bool aborted = false;
        for (std::size_t start = 0; start < order.size() && !aborted;
             start += static_cast<std::size_t>(opts.batch)) {
            std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(opts.batch));
            double inv_batch = 1.0f / static_cast<double>(stop - start);
            for (std::size_t k = start; k < stop; ++k) {
                const FrozenInstance& f = frozen_train[order[k]];
                // One Gumbel draw per instance per epoch perturbs the frozen
                // logits themselves; the perturbed logits seed R0/P0 and stay
                // the re-added anchor at every iteration, so the correctors
                // train against anchors that are sometimes confidently wrong.
                Tensor ia = opts.gumbel ? gumbel_perturb(f.i_alpha, opts.lambda_role, erng)
                                        : f.i_alpha;
                Tensor ip = opts.gumbel ? gumbel_perturb(f.i_pi, opts.lambda_sense, erng)
                                        : f.i_pi;
                Tensor r0 = softmax_rows_value(ia);
                Tensor p0 = softmax_vec_value(ip);
                Graph g;
                auto steps =
                    frozen_steps(refiner, g, f, ia, ip, r0, p0, opts.iterations, true, erng);
                Var loss = steps_loss(g, steps, f);
                loss_sum += static_cast<double>(g.value(loss).item());
                ++loss_count;
                if (!std::isfinite(g.value(loss).item())) {
                    log << "epoch " << epoch << " batch " << start / opts.batch
                        << " non-finite loss; epoch aborted\n";
                    store.zero_grads();
                    aborted = true;
                    break;
                }
                g.backward(g.scale(loss, inv_batch));
            }
            if (!aborted) adam.step();
        }

        double train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        DevOutcome dev_outcome = evaluate_refiner_dev(refiner, baseline.vocab(), frozen_dev,
                                                      dev_insts, opts.iterations, opts.threads);
        log_epoch(log, epoch, train_loss, dev_outcome);
        tracker.observe(dev_outcome.report.f1, epoch, store);
        if (tracker.bad > opts.patience) break;
    }

    store.restore_values(tracker.snapshot);
    result.best_dev_f1 = tracker.best;
    result.best_epoch = tracker.best_epoch;
    return result;
}

std::vector<InstancePrediction> predict_instances(const BaselineModel& model,
                                                  const RefinerModel* refiner,
                                                  const Corpus& corpus, int iterations,
                                                  int threads) {
    require(iterations >= 0, "negative iteration count ", iterations);
    if (refiner && iterations > 0) {
        require(refiner->config().d_pi == model.config().d_pi, "sense widths differ: refiner ",
                refiner->config().d_pi, ", baseline ", model.config().d_pi);
        require(refiner->n_roles() == model.vocab().n_roles(), "role counts differ: refiner ",
                refiner->n_roles(), ", vocabulary ", model.vocab().n_roles());
    }
    std::vector<PredicateInstance> insts = extract_instances(corpus);
    std::vector<InstancePrediction> preds(insts.size());
    parallel_for(insts.size(), threads, [&](std::size_t k) {
        const PredicateInstance& inst = insts[k];
        const Sentence& sent = corpus[static_cast<std::size_t>(inst.sentence_index)];
        const std::string& plemma = predicate_lemma(corpus, inst);
        Graph g;
        Rng rng(0);
        auto out = model.run(g, sent, inst.j, plemma, false, rng);
        if (refiner && iterations > 0) {
            Var piv = model.vocab().has_lemma(plemma)
                          ? g.constant(model.params().get("sense." + plemma).value)
                          : g.constant(Tensor::zeros({1, refiner->config().d_pi}));
            auto steps = refiner->iterate(g, out.x, out.i_alpha, out.i_pi, piv,
                                          g.softmax_rows(out.i_alpha),
                                          g.softmax_vec(out.i_pi), inst.j, iterations, false,
                                          rng);
            preds[k] = decode_prediction(g.value(steps.back().R), g.value(steps.back().P),
                                         model.vocab(), out.inventory);
        } else {
            preds[k] = decode_prediction(softmax_rows_value(g.value(out.i_alpha)),
                                         softmax_vec_value(g.value(out.i_pi)), model.vocab(),
                                         out.inventory);
        }
    });
    return preds;
}

}  // namespace srl
