#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "jamguard/datagen.hpp"

namespace jamguard {

enum class Activation { Tanh, Identity };

struct EsnParams {
    Eigen::Index input_dim = static_cast<Eigen::Index>(kPairedFeatureCount);  // D
    Eigen::Index reservoir_size = 50;                                           // M
    Eigen::Index output_dim = 2;                                                // K
    double spectral_radius = 0.9;
    double density = 0.1;
    double input_scale = 0.5;
    bool feedback = false;  // teacher-forced output feedback W_fb
    double feedback_scale = 0.5;
    Activation activation = Activation::Tanh;
    double ridge = 1e-3;
    std::uint64_t seed = 0;

    void validate() const;
};

/// k consecutive time steps (rows) of D features, with a binary label.
struct SequenceWindow {
    Eigen::MatrixXd steps;  // k x D
    int label = 0;
};

/// Echo state network: fixed random input/reservoir/feedback weights and a linear readout.
class EsnModel {
public:
    EsnParams params;
    Eigen::MatrixXd w_in;   // M x D
    Eigen::MatrixXd w_res;  // M x M
    Eigen::MatrixXd w_fb;   // M x K, empty when feedback is off
    Eigen::MatrixXd w_out;  // K x M, empty until fitted
    int reservoir_resamples = 0;  // times an all-zero or nilpotent reservoir draw was replaced

    bool fitted() const { return w_out.size() != 0; }
    std::size_t trainable_parameters() const {
        return static_cast<std::size_t>(params.output_dim * params.reservoir_size);
    }

    /// Reservoir states, one column per step (M x k), starting from the zero state.
    /// With feedback on, `previous_outputs` (K x k, column t = s(t)) supplies s(t-1); when absent
    /// the model's own outputs are fed back, which requires a fitted readout.
    Eigen::MatrixXd states(const Eigen::MatrixXd& steps,
                           const std::optional<Eigen::MatrixXd>& previous_outputs = std::nullopt) const;

    /// Softmax of W_out applied to the final-step state, positive (jamming) component.
    double score(const Eigen::MatrixXd& steps) const;

    /// Readout output W_out x for the final step.
    Eigen::VectorXd output(const Eigen::MatrixXd& steps) const;
};

EsnModel init_esn(const EsnParams& params);

/// Largest eigenvalue modulus.
double spectral_radius(const Eigen::MatrixXd& m);

/// Closed-form ridge readout W_out = Y X^T (X X^T + lambda I)^-1 for states X (M x T) and targets
/// Y (K x T). With lambda = 0 a singular X X^T is an error.
Eigen::MatrixXd fit_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double lambda);

/// One-hot targets at the final step of each window, readout solved once.
void train_esn(EsnModel& model, std::span<const SequenceWindow> windows);

/// Window ending at each requested row: the k rows of the same (session, label) segment up to
/// and including it; the earliest row repeats where the segment has fewer than k rows before it.
std::vector<SequenceWindow> build_windows(const LabeledDataset& ds, const FeatureMatrix& normalized,
                                          std::span<const std::size_t> rows, std::size_t k = 2);

/// Header line of JSON, then float64 little-endian row-major blocks W_in, W_res, [W_fb], W_out.
void save_esn(std::ostream& out, const EsnModel& m, const nlohmann::json& extra = {});
void save_esn(const std::string& path, const EsnModel& m, const nlohmann::json& extra = {});
EsnModel load_esn(std::istream& in, nlohmann::json* header = nullptr);
EsnModel load_esn(const std::string& path, nlohmann::json* header = nullptr);

}  // namespace jamguard
