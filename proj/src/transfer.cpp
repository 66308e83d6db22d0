#include "pct/transfer.hpp"

#include <cmath>
#include <stdexcept>

#include "pct/coherence.hpp"
#include "pct/eval.hpp"
#include "pct/rng.hpp"

namespace pct {

namespace {

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& idx, std::size_t begin,
                   std::size_t count) {
    Matrix out(count, src.cols());
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t d = 0; d < src.cols(); ++d) out(i, d) = src(idx[begin + i], d);
    return out;
}

double exact_phi(const Matrix& a, const Matrix& b, const Metric& ma, const Metric& mb) {
    return dc_exact(empirical_cdf(pairwise(a, ma)), empirical_cdf(pairwise(b, mb))).global_phi;
}

}  // namespace

std::pair<PointSet, TransferTrace> transfer_configuration(const PointSet& teacher,
                                                          std::size_t student_dim,
                                                          const TransferConfig& cfg) {
    const std::size_t n = teacher.n();
    if (cfg.batch_size < 2) throw std::invalid_argument("transfer_configuration: batch size >= 2");
    if (cfg.batch_size > n)
        throw std::invalid_argument("transfer_configuration: batch larger than the point set");
    if (cfg.epochs < 1) throw std::invalid_argument("transfer_configuration: epochs >= 1");
    if (student_dim < 1) throw std::invalid_argument("transfer_configuration: student_dim >= 1");

    const Metric euclid = Metric::euclidean();
    TransferTrace trace;
    trace.tie_warning = has_row_ties(pairwise(teacher.points, euclid).values);

    Matrix student(n, student_dim);
    {
        rng::Stream init(cfg.seed, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < student_dim; ++d)
                student(i, d) = cfg.student_init_scale * init.normal();
    }

    OptimizerState opt(cfg.optimizer);
    Matrix full_grad(n, student_dim, 0.0);
    const std::vector<ParamRef> params{{student.data(), student.size()}};
    const std::vector<GradRef> grads{{full_grad.data(), full_grad.size()}};

    rng::Stream shuffle_stream(cfg.seed, 1);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    const std::size_t batches = n / cfg.batch_size;
    auto snapshot = [&](std::size_t epoch) {
        const double phi = exact_phi(teacher.points, student, euclid, euclid);
        trace.phi_checkpoints.emplace_back(epoch, phi);
        trace.config_snapshots.emplace_back(epoch, student);
        return phi;
    };
    snapshot(0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_stream.shuffle(order);
        double loss_acc = 0.0;
        for (std::size_t bi = 0; bi < batches; ++bi) {
            const Matrix tb = gather_rows(teacher.points, order, bi * cfg.batch_size,
                                          cfg.batch_size);
            const Matrix sb = gather_rows(student, order, bi * cfg.batch_size, cfg.batch_size);
            const LossResult lr =
                coherence_loss(pairwise(tb, euclid), pairwise(sb, euclid), cfg.loss);
            const CoordGrad cg = grad_wrt_coords(lr, sb);
            trace.clamp_events += cg.clamp_events;
            loss_acc += lr.value;

            // dense step over the full configuration; rows outside the batch
            // carry zero gradient but still see their momentum state
            std::fill(full_grad.data(), full_grad.data() + full_grad.size(), 0.0);
            for (std::size_t i = 0; i < cfg.batch_size; ++i) {
                const std::size_t row = order[bi * cfg.batch_size + i];
                for (std::size_t d = 0; d < student_dim; ++d)
                    full_grad(row, d) = cg.grad(i, d);
            }
            opt.step(params, grads);
        }
        trace.epoch_loss.push_back(batches > 0 ? loss_acc / static_cast<double>(batches) : 0.0);

        const bool at_checkpoint =
            cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0;
        if (at_checkpoint && epoch != cfg.epochs) snapshot(epoch);
    }
    trace.final_phi = snapshot(cfg.epochs);

    PointSet learned;
    learned.points = std::move(student);
    learned.labels = teacher.labels;
    learned.seed = cfg.seed;
    learned.name = teacher.name + "_transferred";
    return {std::move(learned), std::move(trace)};
}

TransferTrace transfer_features(const DenseNet& teacher, DenseNet& student,
                                const PointSet& transfer_set, const TransferConfig& cfg) {
    const std::size_t n = transfer_set.n();
    if (cfg.batch_size < 2 || cfg.batch_size > n)
        throw std::invalid_argument("transfer_features: bad batch size");
    if (teacher.in_dim() != transfer_set.dim() || student.in_dim() != transfer_set.dim())
        throw std::invalid_argument("transfer_features: input dimension mismatch");

    const Metric cos = Metric::cosine();
    TransferTrace trace;

    OptimizerState opt(cfg.optimizer);
    rng::Stream shuffle_stream(cfg.seed, 1);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    const std::size_t batches = n / cfg.batch_size;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_stream.shuffle(order);
        double loss_acc = 0.0;
        for (std::size_t bi = 0; bi < batches; ++bi) {
            const Matrix xb = gather_rows(transfer_set.points, order, bi * cfg.batch_size,
                                          cfg.batch_size);
            const Matrix tf = forward(teacher, xb).features;
            ForwardResult sf = forward(student, xb);
            const LossResult lr =
                coherence_loss(pairwise(tf, cos), pairwise(sf.features, cos), cfg.loss);
            const FeatureGrad fg = grad_wrt_features(lr, sf.features);
            trace.clamp_events += fg.clamp_events;
            loss_acc += lr.value;

            const NetGrads grads = backward(student, sf.tape, fg.grad);
            opt.step(param_refs(student), grad_refs(grads));
            student.touch();
        }
        trace.epoch_loss.push_back(batches > 0 ? loss_acc / static_cast<double>(batches) : 0.0);

        if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0) {
            const double phi = phi_between_nets(teacher, student, transfer_set.points);
            trace.phi_checkpoints.emplace_back(epoch, phi);
            trace.net_checkpoints.emplace_back(epoch, student);
        }
    }
    trace.final_phi = phi_between_nets(teacher, student, transfer_set.points);
    return trace;
}

double phi_between_nets(const DenseNet& f1, const DenseNet& f2, const Matrix& points) {
    const Matrix a = forward(f1, points).features;
    const Matrix b = forward(f2, points).features;
    return exact_phi(a, b, Metric::cosine(), Metric::cosine());
}

namespace {

// Mini-batch epochs over a shuffled index set; the trailing partial batch is
// kept (no ranking involved in the supervised phases).
template <typename StepFn>
void supervised_epochs(std::size_t n, std::size_t epochs, std::size_t batch_size,
                       std::uint64_t seed, StepFn&& step) {
    rng::Stream shuffle_stream(seed, 1);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    const std::size_t bs = std::min(batch_size == 0 ? n : batch_size, n);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle_stream.shuffle(order);
        for (std::size_t begin = 0; begin < n; begin += bs)
            step(order, begin, std::min(bs, n - begin));
    }
}

std::vector<std::int64_t> gather_labels(const std::vector<std::int64_t>& labels,
                                        const std::vector<std::size_t>& idx, std::size_t begin,
                                        std::size_t count) {
    std::vector<std::int64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = labels[idx[begin + i]];
    return out;
}

}  // namespace

double train_probe(const DenseNet& frozen_net, SoftmaxHead& head, const SplitPointSet& labeled,
                   const ProbeConfig& cfg) {
    if (!labeled.train.labeled() || !labeled.test.labeled())
        throw std::invalid_argument("train_probe: labels required on both sides");

    const Matrix train_feats = forward(frozen_net, labeled.train.points).features;
    const Matrix test_feats = forward(frozen_net, labeled.test.points).features;

    OptimizerState opt(cfg.optimizer);
    supervised_epochs(labeled.train.n(), cfg.epochs, cfg.batch_size, cfg.seed,
                      [&](const std::vector<std::size_t>& order, std::size_t begin,
                          std::size_t count) {
                          const Matrix fb = gather_rows(train_feats, order, begin, count);
                          const auto lb = gather_labels(labeled.train.labels, order, begin, count);
                          const XentResult x = softmax_xent(head, fb, lb);
                          const std::vector<GradRef> grads{
                              {x.d_weight.data(), x.d_weight.size()},
                              {x.d_bias.data(), x.d_bias.size()}};
                          opt.step(param_refs(head), grads);
                      });
    return accuracy(head, test_feats, labeled.test.labels);
}

namespace {

// Supervised training of feature extractor + head.
void train_supervised(DenseNet& net, SoftmaxHead& head, const PointSet& data, std::size_t epochs,
                      std::size_t batch_size, double lr, std::uint64_t seed) {
    OptimizerState opt(AdamSpec{lr});
    std::vector<ParamRef> params = param_refs(net);
    const std::vector<ParamRef> head_params = param_refs(head);
    params.insert(params.end(), head_params.begin(), head_params.end());

    supervised_epochs(data.n(), epochs, batch_size, seed,
                      [&](const std::vector<std::size_t>& order, std::size_t begin,
                          std::size_t count) {
                          const Matrix xb = gather_rows(data.points, order, begin, count);
                          const auto lb = gather_labels(data.labels, order, begin, count);
                          ForwardResult fr = forward(net, xb);
                          const XentResult x = softmax_xent(head, fr.features, lb);
                          const NetGrads ng = backward(net, fr.tape, x.d_features);
                          std::vector<GradRef> grads = grad_refs(ng);
                          grads.push_back({x.d_weight.data(), x.d_weight.size()});
                          grads.push_back({x.d_bias.data(), x.d_bias.size()});
                          opt.step(params, grads);
                          net.touch();
                      });
}

}  // namespace

StylizedResult stylized_study(std::uint64_t seed, const StylizedParams& p) {
    const PointSet moons = gen_two_moons(p.n_points, p.noise, rng::derive_seed(seed, 1));
    const SplitPointSet data = split(moons, p.train_fraction, rng::derive_seed(seed, 2));

    StylizedResult res;

    // teacher: feature extractor + softmax head, fully supervised
    DenseNet teacher = make_dense({2, p.hidden, p.hidden},
                                  {Activation::relu, Activation::identity},
                                  rng::derive_seed(seed, 3));
    SoftmaxHead teacher_head = make_head(2, p.hidden, rng::derive_seed(seed, 4));
    train_supervised(teacher, teacher_head, data.train, p.teacher_epochs, p.supervised_batch,
                     p.lr, rng::derive_seed(seed, 7));
    res.teacher_train_acc =
        accuracy(teacher_head, forward(teacher, data.train.points).features, data.train.labels);
    res.teacher_test_acc =
        accuracy(teacher_head, forward(teacher, data.test.points).features, data.test.labels);

    // unsupervised transfer into a fresh student; the head plays no role here
    DenseNet student = make_dense({2, p.student_hidden, p.student_hidden},
                                  {Activation::relu, Activation::identity},
                                  rng::derive_seed(seed, 5));
    TransferConfig tcfg;
    tcfg.batch_size = p.transfer_batch;
    tcfg.epochs = p.transfer_epochs;
    tcfg.optimizer = AdamSpec{p.lr};
    tcfg.loss = LossConfig{p.tau_teacher, p.tau_student, 1.0};
    tcfg.checkpoint_every = p.checkpoint_every;
    tcfg.seed = rng::derive_seed(seed, 6);
    PointSet transfer_set = data.train;
    transfer_set.labels.clear();  // transfer uses unlabeled data
    TransferTrace trace = transfer_features(teacher, student, transfer_set, tcfg);
    res.transfer_loss = trace.epoch_loss;

    for (std::size_t c = 0; c < trace.net_checkpoints.size(); ++c) {
        const auto& [epoch, net] = trace.net_checkpoints[c];
        res.checkpoint_epochs.push_back(epoch);
        res.phi.push_back(trace.phi_checkpoints[c].second);
        SoftmaxHead probe =
            make_head(2, p.student_hidden, rng::derive_seed(seed, 100 + c));
        ProbeConfig pcfg;
        pcfg.epochs = p.probe_epochs;
        pcfg.optimizer = AdamSpec{p.lr};
        res.acc.push_back(train_probe(net, probe, data, pcfg));
        res.checkpoints.push_back(net);
    }
    res.pearson_r = pearson(res.phi, res.acc);
    return res;
}

double mean_row_spearman(const Matrix& teacher_points, const Matrix& student_points) {
    if (teacher_points.rows() != student_points.rows())
        throw std::invalid_argument("mean_row_spearman: point counts differ");
    const DissimMatrix dt = pairwise(teacher_points, Metric::euclidean());
    const DissimMatrix ds = pairwise(student_points, Metric::euclidean());
    const std::size_t n = dt.size();
    std::vector<double> a(n);
    std::vector<double> b(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a.assign(dt.row(i), dt.row(i) + n);
        b.assign(ds.row(i), ds.row(i) + n);
        acc += spearman(a, b);
    }
    return acc / static_cast<double>(n);
}

}  // namespace pct
