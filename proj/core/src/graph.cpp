#include "srl/graph.hpp"

#include <algorithm>
#include <cmath>

#include "srl/common.hpp"

namespace srl {

// ---------------------------------------------------------------------------
// ParamStore

Param& ParamStore::create(const std::string& name, std::vector<int> shape) {
    require(find(name) == static_cast<std::size_t>(-1), "duplicate parameter name: ", name);
    auto p = std::make_unique<Param>();
    p->name = name;
    p->value = Tensor::zeros(shape);
    p->grad = Tensor::zeros(shape);
    params_.push_back(std::move(p));
    auto entry = std::make_pair(name, params_.size() - 1);
    index_.insert(std::lower_bound(index_.begin(), index_.end(), entry), entry);
    return *params_.back();
}

std::size_t ParamStore::find(const std::string& name) const {
    auto it = std::lower_bound(index_.begin(), index_.end(),
                               std::make_pair(name, std::size_t{0}));
    if (it != index_.end() && it->first == name) return it->second;
    return static_cast<std::size_t>(-1);
}

bool ParamStore::has(const std::string& name) const {
    return find(name) != static_cast<std::size_t>(-1);
}

Param& ParamStore::get(const std::string& name) {
    std::size_t i = find(name);
    require(i != static_cast<std::size_t>(-1), "unknown parameter: ", name);
    return *params_[i];
}

const Param& ParamStore::get(const std::string& name) const {
    std::size_t i = find(name);
    require(i != static_cast<std::size_t>(-1), "unknown parameter: ", name);
    return *params_[i];
}

void ParamStore::zero_grads() {
    for (auto& p : params_) p->grad.fill(0.0f);
}

std::vector<Tensor> ParamStore::snapshot_values() const {
    std::vector<Tensor> out;
    out.reserve(params_.size());
    for (const auto& p : params_) out.push_back(p->value);
    return out;
}

void ParamStore::restore_values(const std::vector<Tensor>& values) {
    require(values.size() == params_.size(), "snapshot size mismatch: ", values.size(),
            " vs ", params_.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(values[i].same_shape(params_[i]->value), "snapshot shape mismatch for ",
                params_[i]->name);
        params_[i]->value = values[i];
    }
}

// ---------------------------------------------------------------------------
// Graph

Graph::Var Graph::emit(Tensor value, std::function<void(Graph&, Node&)> back) {
    Node n;
    n.value = std::move(value);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<Var>(nodes_.size() - 1);
}

Var Graph::constant(Tensor t) { return emit(std::move(t), nullptr); }

Var Graph::param(Param& p) {
    Var v = emit(p.value, nullptr);
    node(v).bound = &p;
    return v;
}

static void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    require(a.same_shape(b), op, ": shape mismatch ", a.shape_str(), " vs ", b.shape_str());
}

Var Graph::add(Var a, Var b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    check_same_shape(x, y, "add");
    Tensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += y.data()[i];
    return emit(std::move(out), [a, b](Graph& g, Node& self) {
        Node& na = g.node(a);
        Node& nb = g.node(b);
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            na.grad.values()[i] += self.grad.data()[i];
            nb.grad.values()[i] += self.grad.data()[i];
        }
    });
}

Var Graph::sub(Var a, Var b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    check_same_shape(x, y, "sub");
    Tensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] -= y.data()[i];
    return emit(std::move(out), [a, b](Graph& g, Node& self) {
        Node& na = g.node(a);
        Node& nb = g.node(b);
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            na.grad.values()[i] += self.grad.data()[i];
            nb.grad.values()[i] -= self.grad.data()[i];
        }
    });
}

Var Graph::mul(Var a, Var b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    check_same_shape(x, y, "mul");
    Tensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= y.data()[i];
    return emit(std::move(out), [a, b](Graph& g, Node& self) {
        Node& na = g.node(a);
        Node& nb = g.node(b);
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            na.grad.values()[i] += self.grad.data()[i] * nb.value.data()[i];
            nb.grad.values()[i] += self.grad.data()[i] * na.value.data()[i];
        }
    });
}

Var Graph::scale(Var a, double c) {
    Tensor out = value(a);
    for (auto& v : out.values()) v *= c;
    return emit(std::move(out), [a, c](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            na.grad.values()[i] += self.grad.data()[i] * c;
    });
}

Var Graph::one_minus(Var a) {
    Tensor out = value(a);
    for (auto& v : out.values()) v = 1.0f - v;
    return emit(std::move(out), [a](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            na.grad.values()[i] -= self.grad.data()[i];
    });
}

Var Graph::sigmoid(Var a) {
    Tensor out = value(a);
    for (auto& v : out.values()) {
        v = v >= 0.0f ? 1.0f / (1.0f + std::exp(-v))
                      : std::exp(v) / (1.0f + std::exp(v));
    }
    return emit(std::move(out), [a](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            double y = self.value.data()[i];
            na.grad.values()[i] += self.grad.data()[i] * y * (1.0f - y);
        }
    });
}

Var Graph::tanh_op(Var a) {
    Tensor out = value(a);
    for (auto& v : out.values()) v = std::tanh(v);
    return emit(std::move(out), [a](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            double y = self.value.data()[i];
            na.grad.values()[i] += self.grad.data()[i] * (1.0f - y * y);
        }
    });
}

Var Graph::elu(Var a) {
    Tensor out = value(a);
    for (auto& v : out.values()) {
        if (v < 0.0f) v = std::expm1(v);
    }
    return emit(std::move(out), [a](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            double x = na.value.data()[i];
            double d = x >= 0.0f ? 1.0f : self.value.data()[i] + 1.0f;
            na.grad.values()[i] += self.grad.data()[i] * d;
        }
    });
}

Var Graph::matmul(Var a, Var b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    require(x.rank() == 2 && y.rank() == 2 && x.cols() == y.rows(),
            "matmul: shape mismatch ", x.shape_str(), " vs ", y.shape_str());
    int p = x.rows(), q = x.cols(), s = y.cols();
    Tensor out({p, s});
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < s; ++j) {
            double acc = 0.0;
            for (int k = 0; k < q; ++k) acc += static_cast<double>(x.at(i, k)) * y.at(k, j);
            out.at(i, j) = static_cast<double>(acc);
        }
    }
    return emit(std::move(out), [a, b, p, q, s](Graph& g, Node& self) {
        Node& na = g.node(a);
        Node& nb = g.node(b);
        for (int i = 0; i < p; ++i) {
            for (int k = 0; k < q; ++k) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j)
                    acc += static_cast<double>(self.grad.at(i, j)) * nb.value.at(k, j);
                na.grad.at(i, k) += static_cast<double>(acc);
            }
        }
        for (int k = 0; k < q; ++k) {
            for (int j = 0; j < s; ++j) {
                double acc = 0.0;
                for (int i = 0; i < p; ++i)
                    acc += static_cast<double>(na.value.at(i, k)) * self.grad.at(i, j);
                nb.grad.at(k, j) += static_cast<double>(acc);
            }
        }
    });
}

Var Graph::matvec(Var a, Var v) {
    const Tensor& m = value(a);
    const Tensor& x = value(v);
    require(m.rank() == 2 && x.rank() == 1 && m.cols() == static_cast<int>(x.size()),
            "matvec: shape mismatch ", m.shape_str(), " vs ", x.shape_str());
    int p = m.rows(), q = m.cols();
    Tensor out({p});
    for (int i = 0; i < p; ++i) {
        double acc = 0.0;
        for (int k = 0; k < q; ++k) acc += static_cast<double>(m.at(i, k)) * x.at(k);
        out.at(i) = static_cast<double>(acc);
    }
    return emit(std::move(out), [a, v, p, q](Graph& g, Node& self) {
        Node& na = g.node(a);
        Node& nv = g.node(v);
        for (int i = 0; i < p; ++i) {
            double gi = self.grad.at(i);
            for (int k = 0; k < q; ++k) {
                na.grad.at(i, k) += gi * nv.value.at(k);
                nv.grad.at(k) += gi * na.value.at(i, k);
            }
        }
    });
}

Var Graph::vecmat(Var v, Var a) {
    const Tensor& x = value(v);
    const Tensor& m = value(a);
    require(x.rank() == 1 && m.rank() == 2 && m.rows() == static_cast<int>(x.size()),
            "vecmat: shape mismatch ", x.shape_str(), " vs ", m.shape_str());
    int p = m.rows(), q = m.cols();
    Tensor out({q});
    for (int j = 0; j < q; ++j) {
        double acc = 0.0;
        for (int k = 0; k < p; ++k) acc += static_cast<double>(x.at(k)) * m.at(k, j);
        out.at(j) = static_cast<double>(acc);
    }
    return emit(std::move(out), [v, a, p, q](Graph& g, Node& self) {
        Node& nv = g.node(v);
        Node& na = g.node(a);
        for (int j = 0; j < q; ++j) {
            double gj = self.grad.at(j);
            for (int k = 0; k < p; ++k) {
                nv.grad.at(k) += gj * na.value.at(k, j);
                na.grad.at(k, j) += gj * nv.value.at(k);
            }
        }
    });
}

Var Graph::dot(Var u, Var v) {
    const Tensor& x = value(u);
    const Tensor& y = value(v);
    require(x.rank() == 1 && y.rank() == 1 && x.size() == y.size(),
            "dot: shape mismatch ", x.shape_str(), " vs ", y.shape_str());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += static_cast<double>(x.data()[i]) * y.data()[i];
    return emit(Tensor::scalar(static_cast<double>(acc)), [u, v](Graph& g, Node& self) {
        Node& nu = g.node(u);
        Node& nv = g.node(v);
        double gs = self.grad.at(0);
        for (std::size_t i = 0; i < nu.value.size(); ++i) {
            nu.grad.values()[i] += gs * nv.value.data()[i];
            nv.grad.values()[i] += gs * nu.value.data()[i];
        }
    });
}

Var Graph::transpose(Var a) {
    const Tensor& x = value(a);
    require(x.rank() == 2, "transpose requires rank-2, got ", x.shape_str());
    int p = x.rows(), q = x.cols();
    Tensor out({q, p});
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) out.at(j, i) = x.at(i, j);
    return emit(std::move(out), [a, p, q](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < q; ++j) na.grad.at(i, j) += self.grad.at(j, i);
    });
}

Var Graph::concat_vec(const std::vector<Var>& parts) {
    require(!parts.empty(), "concat_vec: no operands");
    int total = 0;
    for (Var p : parts) {
        require(value(p).rank() == 1, "concat_vec: rank-1 operands required, got ",
                value(p).shape_str());
        total += static_cast<int>(value(p).size());
    }
    Tensor out({total});
    int off = 0;
    for (Var p : parts) {
        const Tensor& x = value(p);
        for (std::size_t i = 0; i < x.size(); ++i) out.at(off + static_cast<int>(i)) = x.data()[i];
        off += static_cast<int>(x.size());
    }
    return emit(std::move(out), [parts](Graph& g, Node& self) {
        int off = 0;
        for (Var p : parts) {
            Node& np = g.node(p);
            for (std::size_t i = 0; i < np.value.size(); ++i)
                np.grad.values()[i] += self.grad.at(off + static_cast<int>(i));
            off += static_cast<int>(np.value.size());
        }
    });
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
    require(!parts.empty(), "concat_cols: no operands");
    int n = value(parts[0]).rows();
    int total = 0;
    for (Var p : parts) {
        require(value(p).rank() == 2 && value(p).rows() == n,
                "concat_cols: row mismatch ", value(p).shape_str());
        total += value(p).cols();
    }
    Tensor out({n, total});
    int off = 0;
    for (Var p : parts) {
        const Tensor& x = value(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < x.cols(); ++j) out.at(i, off + j) = x.at(i, j);
        off += x.cols();
    }
    return emit(std::move(out), [parts, n](Graph& g, Node& self) {
        int off = 0;
        for (Var p : parts) {
            Node& np = g.node(p);
            int c = np.value.cols();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < c; ++j) np.grad.at(i, j) += self.grad.at(i, off + j);
            off += c;
        }
    });
}

Var Graph::stack_rows(const std::vector<Var>& rows) {
    require(!rows.empty(), "stack_rows: no operands");
    int k = static_cast<int>(value(rows[0]).size());
    Tensor out({static_cast<int>(rows.size()), k});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Tensor& x = value(rows[i]);
        require(x.rank() == 1 && static_cast<int>(x.size()) == k,
                "stack_rows: length mismatch ", x.shape_str());
        for (int j = 0; j < k; ++j) out.at(static_cast<int>(i), j) = x.at(j);
    }
    return emit(std::move(out), [rows, k](Graph& g, Node& self) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Node& np = g.node(rows[i]);
            for (int j = 0; j < k; ++j) np.grad.at(j) += self.grad.at(static_cast<int>(i), j);
        }
    });
}

Var Graph::stack_cols(const std::vector<Var>& cols) {
    require(!cols.empty(), "stack_cols: no operands");
    int n = static_cast<int>(value(cols[0]).size());
    Tensor out({n, static_cast<int>(cols.size())});
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Tensor& x = value(cols[j]);
        require(x.rank() == 1 && static_cast<int>(x.size()) == n,
                "stack_cols: length mismatch ", x.shape_str());
        for (int i = 0; i < n; ++i) out.at(i, static_cast<int>(j)) = x.at(i);
    }
    return emit(std::move(out), [cols, n](Graph& g, Node& self) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            Node& np = g.node(cols[j]);
            for (int i = 0; i < n; ++i) np.grad.at(i) += self.grad.at(i, static_cast<int>(j));
        }
    });
}

Var Graph::slice_vec(Var v, int begin, int end) {
    const Tensor& x = value(v);
    require(x.rank() == 1 && 0 <= begin && begin <= end && end <= static_cast<int>(x.size()),
            "slice_vec: bad range [", begin, ", ", end, ") for ", x.shape_str());
    Tensor out({end - begin});
    for (int i = begin; i < end; ++i) out.at(i - begin) = x.at(i);
    return emit(std::move(out), [v, begin, end](Graph& g, Node& self) {
        Node& nv = g.node(v);
        for (int i = begin; i < end; ++i) nv.grad.at(i) += self.grad.at(i - begin);
    });
}

Var Graph::slice_rows(Var a, int begin, int end) {
    const Tensor& x = value(a);
    require(x.rank() == 2 && 0 <= begin && begin <= end && end <= x.rows(),
            "slice_rows: bad range [", begin, ", ", end, ") for ", x.shape_str());
    Tensor out({end - begin, x.cols()});
    for (int i = begin; i < end; ++i)
        for (int j = 0; j < x.cols(); ++j) out.at(i - begin, j) = x.at(i, j);
    return emit(std::move(out), [a, begin, end](Graph& g, Node& self) {
        Node& na = g.node(a);
        int c = na.value.cols();
        for (int i = begin; i < end; ++i)
            for (int j = 0; j < c; ++j) na.grad.at(i, j) += self.grad.at(i - begin, j);
    });
}

Var Graph::slice_cols(Var a, int begin, int end) {
    const Tensor& x = value(a);
    require(x.rank() == 2 && 0 <= begin && begin <= end && end <= x.cols(),
            "slice_cols: bad range [", begin, ", ", end, ") for ", x.shape_str());
    Tensor out({x.rows(), end - begin});
    for (int i = 0; i < x.rows(); ++i)
        for (int j = begin; j < end; ++j) out.at(i, j - begin) = x.at(i, j);
    return emit(std::move(out), [a, begin, end](Graph& g, Node& self) {
        Node& na = g.node(a);
        int n = na.value.rows();
        for (int i = 0; i < n; ++i)
            for (int j = begin; j < end; ++j) na.grad.at(i, j) += self.grad.at(i, j - begin);
    });
}

Var Graph::row(Var a, int i) {
    const Tensor& x = value(a);
    require(x.rank() == 2 && 0 <= i && i < x.rows(), "row: index ", i, " out of range for ",
            x.shape_str());
    Tensor out({x.cols()});
    for (int j = 0; j < x.cols(); ++j) out.at(j) = x.at(i, j);
    return emit(std::move(out), [a, i](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (int j = 0; j < na.value.cols(); ++j) na.grad.at(i, j) += self.grad.at(j);
    });
}

Var Graph::pick(Var v, int i) {
    const Tensor& x = value(v);
    require(x.rank() == 1 && 0 <= i && i < static_cast<int>(x.size()),
            "pick: index ", i, " out of range for ", x.shape_str());
    return emit(Tensor::scalar(x.at(i)), [v, i](Graph& g, Node& self) {
        g.node(v).grad.at(i) += self.grad.at(0);
    });
}

Var Graph::repeat_rows(Var v, int n) {
    const Tensor& x = value(v);
    require(x.rank() == 1, "repeat_rows requires rank-1, got ", x.shape_str());
    require(n >= 1, "repeat_rows: n must be positive, got ", n);
    int k = static_cast<int>(x.size());
    Tensor out({n, k});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) out.at(i, j) = x.at(j);
    return emit(std::move(out), [v, n, k](Graph& g, Node& self) {
        Node& nv = g.node(v);
        for (int j = 0; j < k; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += self.grad.at(i, j);
            nv.grad.at(j) += static_cast<double>(acc);
        }
    });
}

Var Graph::gather_rows(Var table, std::vector<int> ids) {
    const Tensor& t = value(table);
    require(t.rank() == 2, "gather_rows requires a rank-2 table, got ", t.shape_str());
    for (int id : ids)
        require(0 <= id && id < t.rows(), "gather_rows: row ", id, " out of range for ",
                t.shape_str());
    int n = static_cast<int>(ids.size());
    int d = t.cols();
    Tensor out({n, d});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) out.at(i, j) = t.at(ids[static_cast<std::size_t>(i)], j);
    return emit(std::move(out), [table, ids = std::move(ids), d](Graph& g, Node& self) {
        Node& nt = g.node(table);
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (int j = 0; j < d; ++j)
                nt.grad.at(ids[i], j) += self.grad.at(static_cast<int>(i), j);
    });
}

Var Graph::add_bias_rows(Var a, Var bias) {
    const Tensor& x = value(a);
    const Tensor& b = value(bias);
    require(x.rank() == 2 && b.rank() == 1 && x.cols() == static_cast<int>(b.size()),
            "add_bias_rows: shape mismatch ", x.shape_str(), " vs ", b.shape_str());
    Tensor out = x;
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) out.at(i, j) += b.at(j);
    return emit(std::move(out), [a, bias](Graph& g, Node& self) {
        Node& na = g.node(a);
        Node& nb = g.node(bias);
        int n = na.value.rows(), c = na.value.cols();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < c; ++j) na.grad.at(i, j) += self.grad.at(i, j);
        for (int j = 0; j < c; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += self.grad.at(i, j);
            nb.grad.at(j) += static_cast<double>(acc);
        }
    });
}

Var Graph::add_vec_scalar(Var v, Var s) {
    const Tensor& x = value(v);
    const Tensor& c = value(s);
    require(x.rank() == 1 && c.size() == 1, "add_vec_scalar: need vector + scalar, got ",
            x.shape_str(), " and ", c.shape_str());
    Tensor out = x;
    for (auto& e : out.values()) e += c.at(0);
    return emit(std::move(out), [v, s](Graph& g, Node& self) {
        Node& nv = g.node(v);
        Node& ns = g.node(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            nv.grad.values()[i] += self.grad.data()[i];
            acc += self.grad.data()[i];
        }
        ns.grad.at(0) += static_cast<double>(acc);
    });
}

Var Graph::sum(Var a) {
    const Tensor& x = value(a);
    double acc = 0.0;
    for (double e : x.values()) acc += e;
    return emit(Tensor::scalar(static_cast<double>(acc)), [a](Graph& g, Node& self) {
        Node& na = g.node(a);
        double gs = self.grad.at(0);
        for (auto& e : na.grad.values()) e += gs;
    });
}

Var Graph::mean_vec(Var v) {
    const Tensor& x = value(v);
    require(x.rank() == 1 && x.size() > 0, "mean_vec requires a nonempty vector");
    double acc = 0.0;
    for (double e : x.values()) acc += e;
    double inv = 1.0f / static_cast<double>(x.size());
    return emit(Tensor::scalar(static_cast<double>(acc) * inv), [v, inv](Graph& g, Node& self) {
        Node& nv = g.node(v);
        double gs = self.grad.at(0) * inv;
        for (auto& e : nv.grad.values()) e += gs;
    });
}

Var Graph::col_sum(Var a) {
    const Tensor& x = value(a);
    require(x.rank() == 2, "col_sum requires rank-2, got ", x.shape_str());
    Tensor out({x.cols()});
    for (int j = 0; j < x.cols(); ++j) {
        double acc = 0.0;
        for (int i = 0; i < x.rows(); ++i) acc += x.at(i, j);
        out.at(j) = static_cast<double>(acc);
    }
    return emit(std::move(out), [a](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (int i = 0; i < na.value.rows(); ++i)
            for (int j = 0; j < na.value.cols(); ++j) na.grad.at(i, j) += self.grad.at(j);
    });
}

Var Graph::softmax_rows(Var a) {
    const Tensor& x = value(a);
    require(x.rank() == 2, "softmax_rows requires rank-2, got ", x.shape_str());
    Tensor out = softmax_rows_value(x);
    return emit(std::move(out), [a](Graph& g, Node& self) {
        Node& na = g.node(a);
        int n = self.value.rows(), c = self.value.cols();
        for (int i = 0; i < n; ++i) {
            double inner = 0.0;
            for (int j = 0; j < c; ++j)
                inner += static_cast<double>(self.grad.at(i, j)) * self.value.at(i, j);
            for (int j = 0; j < c; ++j)
                na.grad.at(i, j) += self.value.at(i, j) *
                                    (self.grad.at(i, j) - static_cast<double>(inner));
        }
    });
}

Var Graph::softmax_vec(Var v) {
    const Tensor& x = value(v);
    require(x.rank() == 1 && x.size() > 0, "softmax_vec requires a nonempty vector");
    Tensor out = softmax_vec_value(x);
    return emit(std::move(out), [v](Graph& g, Node& self) {
        Node& nv = g.node(v);
        double inner = 0.0;
        for (std::size_t j = 0; j < self.value.size(); ++j)
            inner += static_cast<double>(self.grad.data()[j]) * self.value.data()[j];
        for (std::size_t j = 0; j < self.value.size(); ++j)
            nv.grad.values()[j] += self.value.data()[j] *
                                   (self.grad.data()[j] - static_cast<double>(inner));
    });
}

Var Graph::other_role_aggregate(Var r_matrix) {
    const Tensor& r = value(r_matrix);
    require(r.rank() == 2 && r.cols() >= 2, "other_role_aggregate requires an (n, r>=2) matrix, got ",
            r.shape_str());
    int n = r.rows(), rr = r.cols();
    Tensor out({n, rr - 1});
    for (int u = 0; u < rr - 1; ++u) {
        double total = 0.0;
        for (int k = 0; k < n; ++k) total += r.at(k, u + 1);
        for (int i = 0; i < n; ++i)
            out.at(i, u) = static_cast<double>(total - static_cast<double>(r.at(i, u + 1)));
    }
    return emit(std::move(out), [r_matrix, n, rr](Graph& g, Node& self) {
        Node& nr = g.node(r_matrix);
        for (int u = 0; u < rr - 1; ++u) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) total += self.grad.at(i, u);
            for (int k = 0; k < n; ++k)
                nr.grad.at(k, u + 1) +=
                    static_cast<double>(total - static_cast<double>(self.grad.at(k, u)));
        }
    });
}

// Shared stable row cross-entropy core. Returns per-row losses and keeps the
// shifted-logit softmax for the backward pass.
Var Graph::margin_ce_rows(Var logits, std::vector<int> gold, double margin) {
    const Tensor& x = value(logits);
    require(x.rank() == 2, "margin_ce_rows requires rank-2 logits, got ", x.shape_str());
    int n = x.rows(), c = x.cols();
    require(static_cast<int>(gold.size()) == n, "margin_ce_rows: ", gold.size(),
            " gold labels for ", n, " rows");
    for (int gi : gold)
        require(0 <= gi && gi < c, "margin_ce_rows: gold index ", gi, " out of range [0, ", c, ")");
    Tensor probs({n, c});
    Tensor out({n});
    for (int i = 0; i < n; ++i) {
        int gi = gold[static_cast<std::size_t>(i)];
        double mx = -1e30;
        for (int j = 0; j < c; ++j) {
            double s = x.at(i, j) - (j == gi ? margin : 0.0);
            if (s > mx) mx = s;
        }
        double denom = 0.0;
        for (int j = 0; j < c; ++j) {
            double s = x.at(i, j) - (j == gi ? margin : 0.0);
            denom += std::exp(s - mx);
        }
        double lse = mx + std::log(denom);
        for (int j = 0; j < c; ++j) {
            double s = x.at(i, j) - (j == gi ? margin : 0.0);
            probs.at(i, j) = static_cast<double>(std::exp(s - lse));
        }
        out.at(i) = static_cast<double>(lse - (static_cast<double>(x.at(i, gi)) - margin));
    }
    return emit(std::move(out),
                [logits, gold = std::move(gold), probs = std::move(probs)](Graph& g, Node& self) {
                    Node& nl = g.node(logits);
                    int n = probs.rows(), c = probs.cols();
                    for (int i = 0; i < n; ++i) {
                        double gi = self.grad.at(i);
                        for (int j = 0; j < c; ++j) {
                            double ind = (j == gold[static_cast<std::size_t>(i)]) ? 1.0f : 0.0f;
                            nl.grad.at(i, j) += gi * (probs.at(i, j) - ind);
                        }
                    }
                });
}

Var Graph::margin_ce_vec(Var logits, int gold, double margin) {
    const Tensor& x = value(logits);
    require(x.rank() == 1 && x.size() > 0, "margin_ce_vec requires a nonempty vector");
    int c = static_cast<int>(x.size());
    require(0 <= gold && gold < c, "margin_ce_vec: gold index ", gold, " out of range [0, ", c, ")");
    Tensor probs({c});
    double mx = -1e30;
    for (int j = 0; j < c; ++j) {
        double s = x.at(j) - (j == gold ? margin : 0.0);
        if (s > mx) mx = s;
    }
    double denom = 0.0;
    for (int j = 0; j < c; ++j) denom += std::exp(x.at(j) - (j == gold ? margin : 0.0) - mx);
    double lse = mx + std::log(denom);
    for (int j = 0; j < c; ++j)
        probs.at(j) = static_cast<double>(std::exp(x.at(j) - (j == gold ? margin : 0.0) - lse));
    double loss = static_cast<double>(lse - (static_cast<double>(x.at(gold)) - margin));
    return emit(Tensor::scalar(loss),
                [logits, gold, probs = std::move(probs)](Graph& g, Node& self) {
                    Node& nl = g.node(logits);
                    double gs = self.grad.at(0);
                    for (std::size_t j = 0; j < probs.size(); ++j) {
                        double ind = (static_cast<int>(j) == gold) ? 1.0f : 0.0f;
                        nl.grad.values()[j] += gs * (probs.data()[j] - ind);
                    }
                });
}

Var Graph::dropout(Var a, double p, Rng& rng, bool train) {
    require(0.0f <= p && p < 1.0f, "dropout rate must be in [0, 1), got ", p);
    if (!train || p == 0.0f) return a;
    Tensor mask = dropout_mask(value(a).shape(), p, rng);
    Tensor out = value(a);
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= mask.data()[i];
    return emit(std::move(out), [a, mask = std::move(mask)](Graph& g, Node& self) {
        Node& na = g.node(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            na.grad.values()[i] += self.grad.data()[i] * mask.data()[i];
    });
}

void Graph::backward(Var loss) {
    require(loss >= 0 && static_cast<std::size_t>(loss) < nodes_.size(),
            "backward: invalid loss node");
    Node& top = node(loss);
    require(top.value.size() == 1, "backward requires a scalar loss, got shape ",
            top.value.shape_str());
    for (Var v = 0; v <= loss; ++v) {
        Node& n = node(v);
        n.grad = Tensor::zeros(n.value.shape());
    }
    top.grad.values()[0] = 1.0f;
    for (Var v = loss; v >= 0; --v) {
        Node& n = node(v);
        if (n.back) n.back(*this, n);
    }
    for (Var v = 0; v <= loss; ++v) {
        Node& n = node(v);
        if (n.bound) {
            for (std::size_t i = 0; i < n.grad.size(); ++i)
                n.bound->grad.values()[i] += n.grad.data()[i];
        }
    }
}

// ---------------------------------------------------------------------------
// Tensor-level helpers

Tensor softmax_vec_value(const Tensor& logits) {
    Tensor out = logits;
    double mx = -1e30;
    for (double v : logits.values())
        if (v > mx) mx = v;
    double denom = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        double e = std::exp(static_cast<double>(logits.data()[j]) - mx);
        out.values()[j] = static_cast<double>(e);
        denom += e;
    }
    for (auto& v : out.values()) v = static_cast<double>(v / denom);
    return out;
}

Tensor softmax_rows_value(const Tensor& logits) {
    Tensor out = logits;
    int n = logits.rows(), c = logits.cols();
    for (int i = 0; i < n; ++i) {
        double mx = -1e30;
        for (int j = 0; j < c; ++j)
            if (logits.at(i, j) > mx) mx = logits.at(i, j);
        double denom = 0.0;
        for (int j = 0; j < c; ++j) {
            double e = std::exp(static_cast<double>(logits.at(i, j)) - mx);
            out.at(i, j) = static_cast<double>(e);
            denom += e;
        }
        for (int j = 0; j < c; ++j) out.at(i, j) = static_cast<double>(out.at(i, j) / denom);
    }
    return out;
}

Tensor gumbel_perturb(const Tensor& logits, double lambda, Rng& rng) {
    Tensor noisy = logits;
    if (lambda == 0.0f) return noisy;
    for (auto& v : noisy.values()) v += lambda * static_cast<double>(rng.gumbel());
    return noisy;
}

Tensor gumbel_softmax_vec(const Tensor& logits, double lambda, Rng& rng) {
    return softmax_vec_value(gumbel_perturb(logits, lambda, rng));
}

Tensor gumbel_softmax_rows(const Tensor& logits, double lambda, Rng& rng) {
    return softmax_rows_value(gumbel_perturb(logits, lambda, rng));
}

Tensor dropout_mask(std::vector<int> shape, double p, Rng& rng) {
    Tensor mask(std::move(shape));
    double keep = 1.0f / (1.0f - p);
    for (auto& v : mask.values()) v = rng.bernoulli(1.0 - p) ? keep : 0.0f;
    return mask;
}

}  // namespace srl
