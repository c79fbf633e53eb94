#include "srl/eval.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "srl/common.hpp"

namespace srl {
namespace {

constexpr const char* kNull = "_";

const std::array<const char*, 7> kCoreRoles = {"A0", "A1", "A2", "A3", "A4", "A5", "AA"};

void fill_rates(long correct, long predicted, long gold, double& p, double& r, double& f1) {
    if (predicted == 0 && gold == 0) {
        p = r = f1 = 1.0;
        return;
    }
    p = predicted > 0 ? static_cast<double>(correct) / static_cast<double>(predicted) : 0.0;
    r = gold > 0 ? static_cast<double>(correct) / static_cast<double>(gold) : 0.0;
    f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

int label_index(const std::vector<std::string>& labels, const std::string& label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

void require_aligned(const std::vector<PredicateInstance>& gold,
                     const std::vector<PredicateInstance>& predicted) {
    require(gold.size() == predicted.size(), "instance counts differ: ", gold.size(), " vs ",
            predicted.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        require(gold[i].gold_roles.size() == predicted[i].gold_roles.size(),
                "instance ", i, ": sentence lengths differ");
        require(gold[i].j == predicted[i].j, "instance ", i, ": predicate positions differ: ",
                gold[i].j, " vs ", predicted[i].j);
    }
}

std::vector<InstancePrediction> instances_as_predictions(
    const std::vector<PredicateInstance>& instances) {
    std::vector<InstancePrediction> out;
    out.reserve(instances.size());
    for (const PredicateInstance& inst : instances) out.push_back({inst.gold_sense, inst.gold_roles});
    return out;
}

EvalReport evaluate_predictions(const std::vector<PredicateInstance>& gold,
                                const std::vector<InstancePrediction>& predicted) {
    require(gold.size() == predicted.size(), "instance counts differ: ", gold.size(), " vs ",
            predicted.size());
    EvalReport rep;
    rep.instances = static_cast<long>(gold.size());
    for (std::size_t k = 0; k < gold.size(); ++k) {
        const PredicateInstance& gi = gold[k];
        const InstancePrediction& pi = predicted[k];
        require(gi.gold_roles.size() == pi.roles.size(), "instance ", k,
                ": role list length ", pi.roles.size(), " vs sentence length ",
                gi.gold_roles.size());
        rep.sense_correct += gi.gold_sense == pi.sense ? 1 : 0;
        for (std::size_t i = 0; i < gi.gold_roles.size(); ++i) {
            bool g = gi.gold_roles[i] != kNull;
            bool p = pi.roles[i] != kNull;
            rep.role_gold += g ? 1 : 0;
            rep.role_predicted += p ? 1 : 0;
            rep.role_correct += g && p && gi.gold_roles[i] == pi.roles[i] ? 1 : 0;
        }
    }
    rep.correct = rep.role_correct + rep.sense_correct;
    rep.predicted = rep.role_predicted + rep.instances;
    rep.gold = rep.role_gold + rep.instances;
    fill_rates(rep.correct, rep.predicted, rep.gold, rep.precision, rep.recall, rep.f1);
    fill_rates(rep.role_correct, rep.role_predicted, rep.role_gold, rep.role_precision,
               rep.role_recall, rep.role_f1);
    rep.sense_accuracy =
        rep.instances > 0
            ? static_cast<double>(rep.sense_correct) / static_cast<double>(rep.instances)
            : 1.0;
    return rep;
}

ViolationCounts instance_violations(const std::vector<std::string>& roles) {
    ViolationCounts v;
    for (const char* core : kCoreRoles) {
        long count = std::count(roles.begin(), roles.end(), core);
        v.unique += count >= 2 ? 1 : 0;
    }
    for (std::size_t i = 0; i < roles.size(); ++i) {
        const std::string& label = roles[i];
        if (label.size() <= 2 || label[1] != '-') continue;
        std::string base = label.substr(2);
        if (label[0] == 'C') {
            bool earlier = false;
            for (std::size_t k = 0; k < i; ++k) earlier = earlier || roles[k] == base;
            v.continuation += earlier ? 0 : 1;
        } else if (label[0] == 'R') {
            bool anywhere = false;
            for (const std::string& other : roles) anywhere = anywhere || other == base;
            v.reference += anywhere ? 0 : 1;
        }
    }
    return v;
}

ViolationCounts constraint_violations(const std::vector<InstancePrediction>& predicted) {
    ViolationCounts total;
    for (const InstancePrediction& p : predicted) {
        ViolationCounts v = instance_violations(p.roles);
        total.unique += v.unique;
        total.continuation += v.continuation;
        total.reference += v.reference;
    }
    return total;
}

ConfusionMatrices confusion_and_correction(const std::vector<PredicateInstance>& gold,
                                           const std::vector<InstancePrediction>& first,
                                           const std::vector<InstancePrediction>& second,
                                           const std::vector<std::string>& labels) {
    require(gold.size() == first.size() && gold.size() == second.size(),
            "instance counts differ: ", gold.size(), " vs ", first.size(), " vs ",
            second.size());
    ConfusionMatrices m;
    m.labels = labels;
    std::size_t l = labels.size();
    m.confusion.assign(l, std::vector<long>(l, 0));
    m.correction.assign(l, std::vector<long>(l, 0));
    for (std::size_t k = 0; k < gold.size(); ++k) {
        const auto& gr = gold[k].gold_roles;
        require(gr.size() == first[k].roles.size() && gr.size() == second[k].roles.size(),
                "instance ", k, ": role list lengths differ");
        for (std::size_t i = 0; i < gr.size(); ++i) {
            int gid = label_index(labels, gr[i]);
            int fid = label_index(labels, first[k].roles[i]);
            if (gid < 0 || fid < 0) continue;
            m.confusion[gid][fid] += 1;
            if (gr[i] != first[k].roles[i] && gr[i] == second[k].roles[i])
                m.correction[gid][fid] += 1;
        }
    }
    return m;
}

std::string report_text(const EvalReport& rep) {
    std::ostringstream os;
    os << "labeled   P " << fmt(rep.precision) << "  R " << fmt(rep.recall) << "  F1 "
       << fmt(rep.f1) << "  (" << rep.correct << "/" << rep.predicted << "/" << rep.gold
       << " correct/predicted/gold)\n";
    os << "roles     P " << fmt(rep.role_precision) << "  R " << fmt(rep.role_recall)
       << "  F1 " << fmt(rep.role_f1) << "  (" << rep.role_correct << "/" << rep.role_predicted
       << "/" << rep.role_gold << ")\n";
    os << "senses    acc " << fmt(rep.sense_accuracy) << "  (" << rep.sense_correct << "/"
       << rep.instances << ")\n";
    return os.str();
}

std::string report_json(const EvalReport& rep) {
    std::ostringstream os;
    os << nlohmann::json{{"group", "labeled"},
                         {"precision", rep.precision},
                         {"recall", rep.recall},
                         {"f1", rep.f1},
                         {"correct", rep.correct},
                         {"predicted", rep.predicted},
                         {"gold", rep.gold}}
              .dump()
       << "\n";
    os << nlohmann::json{{"group", "roles"},
                         {"precision", rep.role_precision},
                         {"recall", rep.role_recall},
                         {"f1", rep.role_f1},
                         {"correct", rep.role_correct},
                         {"predicted", rep.role_predicted},
                         {"gold", rep.role_gold}}
              .dump()
       << "\n";
    os << nlohmann::json{{"group", "senses"},
                         {"accuracy", rep.sense_accuracy},
                         {"correct", rep.sense_correct},
                         {"instances", rep.instances}}
              .dump()
       << "\n";
    return os.str();
}

std::string violations_text(const ViolationCounts& v) {
    std::ostringstream os;
    os << "violations  U " << v.unique << "  C " << v.continuation << "  R " << v.reference
       << "\n";
    return os.str();
}

std::string violations_json(const ViolationCounts& v) {
    return nlohmann::json{{"group", "violations"},
                          {"unique", v.unique},
                          {"continuation", v.continuation},
                          {"reference", v.reference}}
               .dump() +
           "\n";
}

std::string matrices_text(const ConfusionMatrices& m) {
    std::ostringstream os;
    auto table = [&](const char* title, const std::vector<std::vector<long>>& cells) {
        os << title << " (rows gold, columns predicted)\n";
        os << "        ";
        for (const std::string& label : m.labels) os << "  " << label;
        os << "\n";
        for (std::size_t i = 0; i < m.labels.size(); ++i) {
            os << "  " << m.labels[i];
            for (std::size_t k = 0; k < m.labels.size(); ++k) os << "  " << cells[i][k];
            os << "\n";
        }
    };
    table("confusion", m.confusion);
    table("correction", m.correction);
    return os.str();
}

std::string matrix_csv(const std::vector<std::string>& labels,
                       const std::vector<std::vector<long>>& cells) {
    std::ostringstream os;
    os << "gold";
    for (const std::string& label : labels) os << "," << label;
    os << "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        os << labels[i];
        for (std::size_t k = 0; k < labels.size(); ++k) os << "," << cells[i][k];
        os << "\n";
    }
    return os.str();
}

}  // namespace srl
