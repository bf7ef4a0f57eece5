#pragma once

#include "types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace lmoq {

enum class HiddenActivation { sigmoid };
enum class OutputActivation { linear };

struct Dataset {
    SampleMatrix inputs;   // n x n_in
    SampleMatrix targets;  // n x n_out

    Eigen::Index size() const { return inputs.rows(); }
};

/// Fully connected feed-forward network over a flat parameter vector.
///
/// Parameters are laid out layer by layer; each layer stores its weight
/// matrix (n_out x n_in, row-major) followed by its n_out biases.
class Network {
public:
    explicit Network(std::vector<int> layer_sizes,
                     HiddenActivation hidden = HiddenActivation::sigmoid,
                     OutputActivation output = OutputActivation::linear)
        : sizes_(std::move(layer_sizes)), hidden_(hidden), output_(output) {
        if (sizes_.size() < 2)
            throw std::invalid_argument("Network: need at least input and output layers");
        for (int n : sizes_)
            if (n <= 0)
                throw std::invalid_argument("Network: layer sizes must be positive");
        offsets_.push_back(0);
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
            offsets_.push_back(offsets_.back() + (sizes_[l] + 1) * sizes_[l + 1]);
    }

    const std::vector<int>& layer_sizes() const { return sizes_; }
    HiddenActivation hidden_activation() const { return hidden_; }
    OutputActivation output_activation() const { return output_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    std::size_t layer_count() const { return sizes_.size() - 1; }

    Eigen::Index parameter_count() const { return offsets_.back(); }

    /// Offset of layer l's weight block within the flat vector.
    Eigen::Index weight_offset(std::size_t l) const { return offsets_[l]; }
    Eigen::Index bias_offset(std::size_t l) const {
        return offsets_[l] + Eigen::Index(sizes_[l]) * sizes_[l + 1];
    }

    ParamVector init_params(std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-0.5, 0.5);
        ParamVector w(parameter_count());
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w[i] = dist(rng);
        return w;
    }

    /// Scratch buffers reused across loss/grad calls on same-sized data.
    struct Workspace {
        std::vector<Eigen::MatrixXd> acts;
        Eigen::MatrixXd delta;
        Eigen::MatrixXd back;
    };

    /// Network outputs for every input row (n x n_out).
    SampleMatrix predict(const ParamVector& w, const SampleMatrix& inputs) const {
        check(w, inputs);
        Workspace ws;
        forward(w, inputs, ws);
        return ws.acts.back();
    }

    /// E(w) = 1/(2n) sum_p |o_p - t_p|^2.
    double loss(const ParamVector& w, const Dataset& data) const {
        Workspace ws;
        return loss(w, data, ws);
    }

    double loss(const ParamVector& w, const Dataset& data, Workspace& ws) const {
        check_data(data);
        check(w, data.inputs);
        const Eigen::Index n = data.size();
        if (n == 0)
            return 0.0;
        forward(w, data.inputs, ws);
        return 0.5 * (ws.acts.back() - data.targets).squaredNorm() / double(n);
    }

    /// Gradient of loss() by backpropagation.
    ParamVector grad(const ParamVector& w, const Dataset& data) const {
        Workspace ws;
        return grad(w, data, ws);
    }

    ParamVector grad(const ParamVector& w, const Dataset& data, Workspace& ws) const {
        check_data(data);
        check(w, data.inputs);
        ParamVector g = ParamVector::Zero(parameter_count());
        const Eigen::Index n = data.size();
        if (n == 0)
            return g;

        forward(w, data.inputs, ws);
        const std::size_t L = layer_count();
        auto& acts = ws.acts;
        ws.delta = (acts[L] - data.targets) / double(n);
        for (std::size_t l = L; l-- > 0;) {
            Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw(
                g.data() + weight_offset(l), sizes_[l + 1], sizes_[l]);
            gw.noalias() = ws.delta.transpose() * acts[l];
            g.segment(bias_offset(l), sizes_[l + 1]) = ws.delta.colwise().sum().transpose();
            if (l > 0) {
                ws.back.noalias() = ws.delta * weights(w, l);
                ws.delta = ws.back.array() * acts[l].array() * (1.0 - acts[l].array());
            }
        }
        return g;
    }

private:
    using ConstWeightMap =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

    ConstWeightMap weights(const ParamVector& w, std::size_t l) const {
        return {w.data() + weight_offset(l), sizes_[l + 1], sizes_[l]};
    }
    Eigen::Map<const Eigen::VectorXd> biases(const ParamVector& w, std::size_t l) const {
        return {w.data() + bias_offset(l), sizes_[l + 1]};
    }

    // acts[0] = inputs, acts[l + 1] = layer l output (sigmoid on hidden layers).
    void forward(const ParamVector& w, const SampleMatrix& inputs, Workspace& ws) const {
        const std::size_t L = layer_count();
        ws.acts.resize(L + 1);
        ws.acts[0] = inputs;
        for (std::size_t l = 0; l < L; ++l) {
            Eigen::MatrixXd& a = ws.acts[l + 1];
            a.noalias() = ws.acts[l] * weights(w, l).transpose();
            a.rowwise() += biases(w, l).transpose();
            if (l + 1 < L)
                a = (1.0 + (-a.array()).exp()).inverse().matrix();
        }
    }

    void check(const ParamVector& w, const SampleMatrix& inputs) const {
        if (w.size() != parameter_count())
            throw std::invalid_argument("Network: parameter vector has wrong length");
        if (inputs.cols() != input_size())
            throw std::invalid_argument("Network: input width does not match layer 0");
    }
    void check_data(const Dataset& data) const {
        if (data.inputs.rows() != data.targets.rows())
            throw std::invalid_argument("Dataset: input and target row counts differ");
        if (data.targets.cols() != output_size())
            throw std::invalid_argument("Dataset: target width does not match output layer");
    }

    std::vector<int> sizes_;
    HiddenActivation hidden_;
    OutputActivation output_;
    std::vector<Eigen::Index> offsets_;
};

/// Binds a network to a training set as an optimization objective.
///
/// Holds scratch buffers, so one instance must not be shared between threads.
struct MlpObjective {
    const Network* net;
    const Dataset* data;
    mutable Network::Workspace ws{};

    double value(const ParamVector& w) const { return net->loss(w, *data, ws); }
    ParamVector gradient(const ParamVector& w) const { return net->grad(w, *data, ws); }
};

} // namespace lmoq
