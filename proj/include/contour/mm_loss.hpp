#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "contour/grid.hpp"

namespace contour::mm {

enum class GanVariant {
    original,        // log(1 - D(fake))
    non_saturating,  // -log D(fake)
};

struct LossConfig {
    double lambda = 0.0;
    double epsilon_log = 1e-12;
    GanVariant gan_variant = GanVariant::original;

    void validate() const;
};

/// The M alternative ground truths y(1..M) of one training input.
class TargetSet {
public:
    explicit TargetSet(std::vector<RealGrid> targets);

    std::size_t size() const noexcept { return targets_.size(); }
    const RealGrid& operator[](std::size_t j) const { return targets_[j]; }
    const std::vector<RealGrid>& targets() const noexcept { return targets_; }
    int width() const noexcept { return targets_.front().width(); }
    int height() const noexcept { return targets_.front().height(); }

private:
    std::vector<RealGrid> targets_;
};

struct LossBreakdown {
    std::vector<double> gan_terms;
    std::vector<double> l1_terms;
    std::size_t argmin_index = 0;
    double total = 0.0;
};

double l1_term(const RealGrid& pred, const RealGrid& target);

double gan_generator_term(double d_fake, const LossConfig& cfg);

/// total = (lambda / M) * sum(gan_terms) + min_j l1_term(pred, y(j)),
/// argmin with lowest-index tie-break.
LossBreakdown mm_loss_eval(const RealGrid& pred, const TargetSet& targets, const std::vector<double>& gan_terms,
                           const LossConfig& cfg);

/// Subgradient of the total: lambda * gan_grad + sign(pred - y(argmin)) / n.
/// gan_grad is the gradient of the mean GAN term with respect to pred.
RealGrid mm_loss_grad(const RealGrid& pred, const TargetSet& targets, const RealGrid& gan_grad,
                      const LossConfig& cfg);

/// Scorer standing in for the discriminator: value D(y) in (0,1) and the
/// gradient of the generator term at a fake input.
class DiscriminatorOracle {
public:
    virtual ~DiscriminatorOracle() = default;
    virtual double value(const RealGrid& y) const = 0;
    virtual RealGrid generator_term_gradient(const RealGrid& fake, const LossConfig& cfg) const = 0;
};

/// D(y) = logistic(<w, y> + b).
class LogisticDiscriminator final : public DiscriminatorOracle {
public:
    LogisticDiscriminator(RealGrid weights, double bias);

    double value(const RealGrid& y) const override;
    RealGrid generator_term_gradient(const RealGrid& fake, const LossConfig& cfg) const override;

private:
    double logit(const RealGrid& y) const;

    RealGrid weights_;
    double bias_;
};

/// Per-target cGAN value: log D(y(j)) + generator term of D(fake).
std::vector<double> gan_terms_from_oracle(const DiscriminatorOracle& d, const RealGrid& fake,
                                          const TargetSet& targets, const LossConfig& cfg);

// ---------------------------------------------------------------------------
// Desk-scale trainer.

enum class Aggregation { min, mean };

/// One logit per output pixel for each discrete input index;
/// prediction = logistic(theta).
class TinyModel {
public:
    TinyModel(std::size_t n_inputs, int width, int height);

    RealGrid predict(std::size_t input) const;
    RealGrid& logits(std::size_t input) { return theta_.at(input); }
    const RealGrid& logits(std::size_t input) const { return theta_.at(input); }
    std::size_t n_inputs() const noexcept { return theta_.size(); }

private:
    std::vector<RealGrid> theta_;
};

struct TrainingExample {
    std::size_t input = 0;
    TargetSet targets;
};

struct TrainOptions {
    Aggregation mode = Aggregation::min;
    std::size_t steps = 2000;
    double learning_rate = 50.0;
    std::uint64_t seed = 0;
    double init_scale = 0.1;
};

/// Full-batch gradient descent on sum over examples of min_j L1 (min mode)
/// or mean_j L1 (mean mode), with lambda = 0. Deterministic given the seed.
TinyModel train_toy(const std::vector<TrainingExample>& examples, const TrainOptions& options);

/// 10x10 targets, target j has row {2, 5, 8}[j] set to 1.
TargetSet three_line_fixture();

std::string to_string(Aggregation mode);
Aggregation parse_aggregation(const std::string& text);

}  // namespace contour::mm
