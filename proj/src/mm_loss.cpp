#include "contour/mm_loss.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace contour::mm {

namespace {

double logistic(double a) {
    if (a >= 0.0) {
        return 1.0 / (1.0 + std::exp(-a));
    }
    const double e = std::exp(a);
    return e / (1.0 + e);
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double clamp_probability(double d, const LossConfig& cfg) {
    return std::clamp(d, cfg.epsilon_log, 1.0 - cfg.epsilon_log);
}

std::size_t argmin_lowest(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (values[j] < values[best]) {
            best = j;
        }
    }
    return best;
}

// Uniform in [-1, 1) from the top 53 bits, identical on every platform.
double symmetric_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

void LossConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be a non-negative finite number");
    }
    if (!(epsilon_log > 0.0 && epsilon_log < 1e-6)) {
        throw std::invalid_argument("epsilon_log must lie in (0, 1e-6)");
    }
}

TargetSet::TargetSet(std::vector<RealGrid> targets) : targets_(std::move(targets)) {
    if (targets_.empty()) {
        throw std::invalid_argument("a target set needs at least one target");
    }
    for (const auto& t : targets_) {
        require_same_shape(t, targets_.front(), "TargetSet");
    }
}

double l1_term(const RealGrid& pred, const RealGrid& target) {
    require_same_shape(pred, target, "l1_term");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        sum += std::abs(pred[i] - target[i]);
    }
    return sum / static_cast<double>(pred.size());
}

double gan_generator_term(double d_fake, const LossConfig& cfg) {
    const double d = clamp_probability(d_fake, cfg);
    return cfg.gan_variant == GanVariant::original ? std::log(1.0 - d) : -std::log(d);
}

LossBreakdown mm_loss_eval(const RealGrid& pred, const TargetSet& targets, const std::vector<double>& gan_terms,
                           const LossConfig& cfg) {
    cfg.validate();
    const std::size_t m = targets.size();
    if (gan_terms.size() != m) {
        throw std::invalid_argument("need exactly one GAN term per target");
    }
    LossBreakdown out;
    out.gan_terms = gan_terms;
    out.l1_terms.reserve(m);
    for (const auto& y : targets.targets()) {
        out.l1_terms.push_back(l1_term(pred, y));
    }
    out.argmin_index = argmin_lowest(out.l1_terms);

    double gan_sum = 0.0;
    for (double g : gan_terms) {
        gan_sum += g;
    }
    out.total = cfg.lambda / static_cast<double>(m) * gan_sum + out.l1_terms[out.argmin_index];
    return out;
}

RealGrid mm_loss_grad(const RealGrid& pred, const TargetSet& targets, const RealGrid& gan_grad,
                      const LossConfig& cfg) {
    cfg.validate();
    require_same_shape(pred, gan_grad, "mm_loss_grad");
    std::vector<double> l1;
    l1.reserve(targets.size());
    for (const auto& y : targets.targets()) {
        l1.push_back(l1_term(pred, y));
    }
    const RealGrid& chosen = targets[argmin_lowest(l1)];
    const double inv_n = 1.0 / static_cast<double>(pred.size());

    RealGrid grad(pred.width(), pred.height());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        grad[i] = cfg.lambda * gan_grad[i] + sign(pred[i] - chosen[i]) * inv_n;
    }
    return grad;
}

LogisticDiscriminator::LogisticDiscriminator(RealGrid weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {}

double LogisticDiscriminator::logit(const RealGrid& y) const {
    require_same_shape(y, weights_, "LogisticDiscriminator");
    double a = bias_;
    for (std::size_t i = 0; i < y.size(); ++i) {
        a += weights_[i] * y[i];
    }
    return a;
}

double LogisticDiscriminator::value(const RealGrid& y) const { return logistic(logit(y)); }

RealGrid LogisticDiscriminator::generator_term_gradient(const RealGrid& fake, const LossConfig& cfg) const {
    const double d = value(fake);
    RealGrid grad(fake.width(), fake.height());
    if (d != clamp_probability(d, cfg)) {
        return grad;  // flat inside the clamp
    }
    // d/dy log(1 - D) = -D w ; d/dy (-log D) = -(1 - D) w
    const double scale = cfg.gan_variant == GanVariant::original ? -d : -(1.0 - d);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] = scale * weights_[i];
    }
    return grad;
}

std::vector<double> gan_terms_from_oracle(const DiscriminatorOracle& d, const RealGrid& fake,
                                          const TargetSet& targets, const LossConfig& cfg) {
    const double fake_term = gan_generator_term(d.value(fake), cfg);
    std::vector<double> out;
    out.reserve(targets.size());
    for (const auto& y : targets.targets()) {
        out.push_back(std::log(clamp_probability(d.value(y), cfg)) + fake_term);
    }
    return out;
}

TinyModel::TinyModel(std::size_t n_inputs, int width, int height) {
    if (n_inputs == 0) {
        throw std::invalid_argument("TinyModel needs at least one input");
    }
    theta_.assign(n_inputs, RealGrid(width, height));
}

RealGrid TinyModel::predict(std::size_t input) const {
    const RealGrid& t = theta_.at(input);
    RealGrid out(t.width(), t.height());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out[i] = logistic(t[i]);
    }
    return out;
}

TinyModel train_toy(const std::vector<TrainingExample>& examples, const TrainOptions& options) {
    if (examples.empty()) {
        throw std::invalid_argument("train_toy needs at least one example");
    }
    if (options.steps == 0) {
        throw std::invalid_argument("train_toy needs at least one step");
    }
    if (!(options.learning_rate > 0.0)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    const int w = examples.front().targets.width();
    const int h = examples.front().targets.height();
    std::size_t n_inputs = 0;
    for (const auto& ex : examples) {
        if (ex.targets.width() != w || ex.targets.height() != h) {
            throw DimensionMismatch("all training targets must share one shape");
        }
        n_inputs = std::max(n_inputs, ex.input + 1);
    }

    TinyModel model(n_inputs, w, h);
    std::mt19937_64 rng(options.seed);
    for (std::size_t k = 0; k < n_inputs; ++k) {
        for (double& v : model.logits(k).values()) {
            v = options.init_scale * symmetric_uniform(rng);
        }
    }

    const double inv_n = 1.0 / static_cast<double>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    std::vector<RealGrid> grads(n_inputs, RealGrid(w, h));
    for (std::size_t step = 0; step < options.steps; ++step) {
        for (auto& g : grads) {
            std::fill(g.values().begin(), g.values().end(), 0.0);
        }
        for (const auto& ex : examples) {
            const RealGrid pred = model.predict(ex.input);
            RealGrid& g = grads[ex.input];
            if (options.mode == Aggregation::min) {
                std::vector<double> l1;
                for (const auto& y : ex.targets.targets()) {
                    l1.push_back(l1_term(pred, y));
                }
                const RealGrid& y = ex.targets[argmin_lowest(l1)];
                for (std::size_t i = 0; i < pred.size(); ++i) {
                    g[i] += sign(pred[i] - y[i]) * inv_n;
                }
            } else {
                const double inv_m = 1.0 / static_cast<double>(ex.targets.size());
                for (const auto& y : ex.targets.targets()) {
                    for (std::size_t i = 0; i < pred.size(); ++i) {
                        g[i] += sign(pred[i] - y[i]) * inv_n * inv_m;
                    }
                }
            }
        }
        for (std::size_t k = 0; k < n_inputs; ++k) {
            RealGrid& theta = model.logits(k);
            for (std::size_t i = 0; i < theta.size(); ++i) {
                const double p = logistic(theta[i]);
                theta[i] -= options.learning_rate * grads[k][i] * p * (1.0 - p);
            }
        }
    }
    return model;
}

TargetSet three_line_fixture() {
    std::vector<RealGrid> targets;
    for (int row : {2, 5, 8}) {
        RealGrid t(10, 10);
        for (int x = 0; x < 10; ++x) {
            t.at(x, row) = 1.0;
        }
        targets.push_back(std::move(t));
    }
    return TargetSet(std::move(targets));
}

std::string to_string(Aggregation mode) { return mode == Aggregation::min ? "min" : "mean"; }

Aggregation parse_aggregation(const std::string& text) {
    if (text == "min") {
        return Aggregation::min;
    }
    if (text == "mean") {
        return Aggregation::mean;
    }
    throw std::invalid_argument("aggregation mode must be 'min' or 'mean', got '" + text + "'");
}

}  // namespace contour::mm
