#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pct/dataset.hpp"
#include "pct/loss.hpp"
#include "pct/nn.hpp"

namespace pct {

struct TransferConfig {
    std::size_t batch_size = 64;
    std::size_t epochs = 800;
    OptimizerSpec optimizer = AdamSpec{0.1};
    LossConfig loss;
    std::size_t checkpoint_every = 0;  // 0 = never
    std::uint64_t seed = 1;
    double student_init_scale = 10.0;  // configuration transfer only
};

struct TransferTrace {
    std::vector<double> epoch_loss;
    // epoch -> exact train-set coherence at that checkpoint
    std::vector<std::pair<std::size_t, double>> phi_checkpoints;
    // configuration transfer: snapshot of the student coordinates
    std::vector<std::pair<std::size_t, Matrix>> config_snapshots;
    // feature transfer: snapshot of the student network
    std::vector<std::pair<std::size_t, DenseNet>> net_checkpoints;
    double final_phi = 0.0;
    bool tie_warning = false;  // teacher dissimilarities carried ties
    std::size_t clamp_events = 0;
};

/// Optimizes a free student configuration (one point per teacher point,
/// Euclidean dissimilarities on both sides). The student starts from i.i.d.
/// standard normals scaled by student_init_scale. Per epoch the index set is
/// shuffled into batches of batch_size; a trailing incomplete batch is
/// dropped.
std::pair<PointSet, TransferTrace> transfer_configuration(const PointSet& teacher,
                                                          std::size_t student_dim,
                                                          const TransferConfig& cfg);

/// Distills the teacher network's features into the student network (cosine
/// dissimilarities, teacher frozen, gradients through the student only).
TransferTrace transfer_features(const DenseNet& teacher, DenseNet& student,
                                const PointSet& transfer_set, const TransferConfig& cfg);

struct ProbeConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    OptimizerSpec optimizer = AdamSpec{1e-3};
    std::uint64_t seed = 1;
};

/// Trains only a fresh softmax head on frozen features; returns test accuracy.
double train_probe(const DenseNet& frozen_net, SoftmaxHead& head, const SplitPointSet& labeled,
                   const ProbeConfig& cfg);

/// Exact train-set coherence of two feature extractors under cosine dissim.
double phi_between_nets(const DenseNet& f1, const DenseNet& f2, const Matrix& points);

struct StylizedParams {
    std::size_t n_points = 800;
    double noise = 0.1;
    double train_fraction = 0.5;
    std::size_t hidden = 20;          // teacher hidden width
    std::size_t student_hidden = 20;  // student width (capacity ablation varies this)
    std::size_t teacher_epochs = 200;
    std::size_t transfer_epochs = 40;
    std::size_t probe_epochs = 20;
    std::size_t transfer_batch = 64;
    std::size_t supervised_batch = 32;  // teacher training and probes
    std::size_t checkpoint_every = 4;
    double lr = 1e-3;
    double tau_teacher = 0.1;
    double tau_student = 0.3;
};

struct StylizedResult {
    double teacher_train_acc = 0.0;
    double teacher_test_acc = 0.0;
    std::vector<std::size_t> checkpoint_epochs;
    std::vector<double> phi;  // train-set coherence per checkpoint
    std::vector<double> acc;  // downstream test accuracy per checkpoint
    double pearson_r = 0.0;
    std::vector<double> transfer_loss;  // per transfer epoch
    std::vector<DenseNet> checkpoints;
};

/// Full pipeline: supervised teacher on labeled two-moons, unsupervised
/// feature transfer into the student with periodic checkpoints, then a frozen
/// linear probe per checkpoint. Correlates train coherence with test accuracy.
StylizedResult stylized_study(std::uint64_t seed, const StylizedParams& params = {});

/// Mean over rows of the Spearman correlation between teacher and student
/// dissimilarity rows (computed on the full sets).
double mean_row_spearman(const Matrix& teacher_points, const Matrix& student_points);

}  // namespace pct
