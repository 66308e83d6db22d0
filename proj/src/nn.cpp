#include "pct/nn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pct/kernels.hpp"
#include "pct/rng.hpp"

namespace pct {

DenseNet make_dense(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                    std::uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("make_dense: need at least one layer");
    if (acts.size() != dims.size() - 1)
        throw std::invalid_argument("make_dense: one activation per layer required");

    DenseNet net;
    net.seed = seed;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.weight = Matrix(dims[l + 1], dims[l]);
        layer.bias.assign(dims[l + 1], 0.0);
        layer.act = acts[l];
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        rng::Stream stream(seed, l);
        for (std::size_t i = 0; i < layer.weight.rows(); ++i)
            for (std::size_t j = 0; j < layer.weight.cols(); ++j)
                layer.weight(i, j) = stream.uniform(-bound, bound);
        for (auto& b : layer.bias) b = stream.uniform(-bound, bound);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

Matrix affine(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    // x: B x in, w: out x in  ->  B x out
    const auto& k = kernels::active();
    Matrix y(x.rows(), w.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t o = 0; o < w.rows(); ++o)
            y(i, o) = k.dot(x.row(i), w.row(o), x.cols()) + b[o];
    return y;
}

}  // namespace

ForwardResult forward(const DenseNet& net, const Matrix& batch) {
    if (batch.cols() != net.in_dim()) throw std::invalid_argument("forward: input dim mismatch");
    ForwardResult res;
    res.tape.net_version = net.version;
    res.tape.input = batch;

    Matrix cur = batch;
    for (const Layer& layer : net.layers) {
        Matrix pre = affine(cur, layer.weight, layer.bias);
        res.tape.preacts.push_back(pre);
        if (layer.act == Activation::relu) {
            for (std::size_t i = 0; i < pre.rows(); ++i)
                for (std::size_t j = 0; j < pre.cols(); ++j)
                    if (pre(i, j) < 0.0) pre(i, j) = 0.0;
        }
        res.tape.outputs.push_back(pre);
        cur = std::move(pre);
    }
    res.features = cur;
    return res;
}

NetGrads backward(const DenseNet& net, const Tape& tape, const Matrix& grad_out) {
    if (tape.net_version != net.version)
        throw std::logic_error("backward: tape is stale (parameters changed since forward)");
    if (tape.preacts.size() != net.layers.size())
        throw std::logic_error("backward: tape does not match the network");

    NetGrads grads;
    grads.d_weight.resize(net.layers.size());
    grads.d_bias.resize(net.layers.size());

    Matrix delta = grad_out;  // gradient w.r.t. the layer output
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const Layer& layer = net.layers[li];
        const Matrix& pre = tape.preacts[li];
        if (delta.rows() != pre.rows() || delta.cols() != pre.cols())
            throw std::invalid_argument("backward: grad_out shape mismatch");

        if (layer.act == Activation::relu) {
            for (std::size_t i = 0; i < delta.rows(); ++i)
                for (std::size_t j = 0; j < delta.cols(); ++j)
                    if (pre(i, j) <= 0.0) delta(i, j) = 0.0;
        }

        const Matrix& input = li == 0 ? tape.input : tape.outputs[li - 1];
        Matrix dw(layer.weight.rows(), layer.weight.cols(), 0.0);
        std::vector<double> db(layer.bias.size(), 0.0);
        const auto& k = kernels::active();
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            for (std::size_t o = 0; o < dw.rows(); ++o) {
                k.axpy(delta(i, o), input.row(i), dw.row(o), dw.cols());
                db[o] += delta(i, o);
            }
        }

        Matrix dx(input.rows(), input.cols(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i)
            for (std::size_t o = 0; o < layer.weight.rows(); ++o)
                k.axpy(delta(i, o), layer.weight.row(o), dx.row(i), dx.cols());

        grads.d_weight[li] = std::move(dw);
        grads.d_bias[li] = std::move(db);
        delta = std::move(dx);
    }
    grads.d_input = std::move(delta);
    return grads;
}

SoftmaxHead make_head(std::size_t classes, std::size_t features, std::uint64_t seed) {
    SoftmaxHead head;
    head.weight = Matrix(classes, features);
    head.bias.assign(classes, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(features));
    rng::Stream stream(seed, 0);
    for (std::size_t i = 0; i < classes; ++i)
        for (std::size_t j = 0; j < features; ++j) head.weight(i, j) = stream.uniform(-bound, bound);
    for (auto& b : head.bias) b = stream.uniform(-bound, bound);
    return head;
}

Matrix head_logits(const SoftmaxHead& head, const Matrix& features) {
    return affine(features, head.weight, head.bias);
}

XentResult softmax_xent(const SoftmaxHead& head, const Matrix& features,
                        const std::vector<std::int64_t>& labels) {
    const std::size_t b = features.rows();
    const std::size_t c = head.classes();
    if (labels.size() != b) throw std::invalid_argument("softmax_xent: label count mismatch");
    for (auto l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= c)
            throw std::invalid_argument("softmax_xent: label out of range");

    Matrix logits = head_logits(head, features);
    Matrix dlogits(b, c);
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double mx = logits(i, 0);
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, logits(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) sum += std::exp(logits(i, j) - mx);
        const double lse = mx + std::log(sum);
        loss += lse - logits(i, static_cast<std::size_t>(labels[i]));
        for (std::size_t j = 0; j < c; ++j) {
            double p = std::exp(logits(i, j) - lse);
            if (j == static_cast<std::size_t>(labels[i])) p -= 1.0;
            dlogits(i, j) = p / static_cast<double>(b);
        }
    }
    loss /= static_cast<double>(b);

    const auto& k = kernels::active();
    XentResult res;
    res.loss = loss;
    res.d_weight = Matrix(c, features.cols(), 0.0);
    res.d_bias.assign(c, 0.0);
    res.d_features = Matrix(b, features.cols(), 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            k.axpy(dlogits(i, j), features.row(i), res.d_weight.row(j), features.cols());
            res.d_bias[j] += dlogits(i, j);
            k.axpy(dlogits(i, j), head.weight.row(j), res.d_features.row(i), features.cols());
        }
    }
    return res;
}

double accuracy(const SoftmaxHead& head, const Matrix& features,
                const std::vector<std::int64_t>& labels) {
    const Matrix logits = head_logits(head, features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < head.classes(); ++j)
            if (logits(i, j) > logits(i, best)) best = j;
        if (static_cast<std::int64_t>(best) == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(features.rows());
}

void OptimizerState::step(const std::vector<ParamRef>& params, const std::vector<GradRef>& grads) {
    if (params.size() != grads.size())
        throw std::invalid_argument("optimizer: parameter/gradient count mismatch");
    if (buf_m_.empty()) {
        buf_m_.resize(params.size());
        for (std::size_t p = 0; p < params.size(); ++p) buf_m_[p].assign(params[p].n, 0.0);
        if (std::holds_alternative<AdamSpec>(spec_)) {
            buf_v_.resize(params.size());
            for (std::size_t p = 0; p < params.size(); ++p) buf_v_[p].assign(params[p].n, 0.0);
        }
    }
    ++step_;

    if (const auto* sgd = std::get_if<SgdSpec>(&spec_)) {
        for (std::size_t p = 0; p < params.size(); ++p) {
            if (params[p].n != grads[p].n || params[p].n != buf_m_[p].size())
                throw std::invalid_argument("optimizer: shape mismatch");
            double* w = params[p].data;
            const double* g = grads[p].data;
            double* m = buf_m_[p].data();
            for (std::size_t i = 0; i < params[p].n; ++i) {
                double gi = g[i] + sgd->weight_decay * w[i];
                double update = gi;
                if (sgd->momentum != 0.0) {
                    m[i] = sgd->momentum * m[i] + gi;
                    update = sgd->nesterov ? gi + sgd->momentum * m[i] : m[i];
                }
                w[i] -= sgd->lr * update;
            }
        }
        return;
    }

    const auto& adam = std::get<AdamSpec>(spec_);
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step_));
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (params[p].n != grads[p].n || params[p].n != buf_m_[p].size())
            throw std::invalid_argument("optimizer: shape mismatch");
        double* w = params[p].data;
        const double* g = grads[p].data;
        double* m = buf_m_[p].data();
        double* v = buf_v_[p].data();
        for (std::size_t i = 0; i < params[p].n; ++i) {
            m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
            v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= adam.lr * mhat / (std::sqrt(vhat) + adam.eps);
        }
    }
}

std::vector<ParamRef> param_refs(DenseNet& net) {
    std::vector<ParamRef> refs;
    for (Layer& layer : net.layers) {
        refs.push_back({layer.weight.data(), layer.weight.size()});
        refs.push_back({layer.bias.data(), layer.bias.size()});
    }
    return refs;
}

std::vector<ParamRef> param_refs(SoftmaxHead& head) {
    return {{head.weight.data(), head.weight.size()}, {head.bias.data(), head.bias.size()}};
}

std::vector<GradRef> grad_refs(const NetGrads& grads) {
    std::vector<GradRef> refs;
    for (std::size_t l = 0; l < grads.d_weight.size(); ++l) {
        refs.push_back({grads.d_weight[l].data(), grads.d_weight[l].size()});
        refs.push_back({grads.d_bias[l].data(), grads.d_bias[l].size()});
    }
    return refs;
}

// Checkpoint layout: header line, then one parameter per line (layer order,
// weights row-major then bias). %.17g keeps the round trip bit-exact.
void save_dense(const DenseNet& net, const std::string& path, std::uint64_t step) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_dense: cannot open " + path);
    out << "# densenet layers=";
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (l > 0) out << ',';
        out << net.layers[l].weight.cols() << 'x' << net.layers[l].weight.rows()
            << (net.layers[l].act == Activation::relu ? 'r' : 'i');
    }
    out << " step=" << step << "\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << '\n';
    };
    for (const Layer& layer : net.layers) {
        for (std::size_t i = 0; i < layer.weight.size(); ++i) emit(layer.weight.data()[i]);
        for (double b : layer.bias) emit(b);
    }
    if (!out) throw std::runtime_error("save_dense: write failed for " + path);
}

DenseNet load_dense(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_dense: cannot open " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("# densenet layers=", 0) != 0)
        throw std::runtime_error("load_dense: bad header in " + path);

    const std::size_t begin = std::string("# densenet layers=").size();
    const std::size_t end = header.find(' ', begin);
    const std::string spec = header.substr(begin, end - begin);

    DenseNet net;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos || item.size() < 4)
            throw std::runtime_error("load_dense: bad layer spec " + item);
        const char act = item.back();
        Layer layer;
        const std::size_t in_dim = std::stoul(item.substr(0, x));
        const std::size_t out_dim = std::stoul(item.substr(x + 1, item.size() - x - 2));
        layer.weight = Matrix(out_dim, in_dim);
        layer.bias.assign(out_dim, 0.0);
        if (act == 'r')
            layer.act = Activation::relu;
        else if (act == 'i')
            layer.act = Activation::identity;
        else
            throw std::runtime_error("load_dense: unknown activation in " + item);
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw std::runtime_error("load_dense: no layers in " + path);

    for (Layer& layer : net.layers) {
        for (std::size_t i = 0; i < layer.weight.size(); ++i)
            if (!(in >> layer.weight.data()[i]))
                throw std::runtime_error("load_dense: truncated parameters in " + path);
        for (auto& b : layer.bias)
            if (!(in >> b)) throw std::runtime_error("load_dense: truncated parameters in " + path);
    }
    // loaded parameters constitute a fresh version
    net.touch();
    return net;
}

}  // namespace pct
