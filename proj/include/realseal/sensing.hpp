#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "realseal/geometry.hpp"
#include "realseal/result.hpp"

namespace realseal::sensing {

// Desk-scale harness scoring candidate sensing designs against real and
// adversarial (rendered-plane) scene populations: a design observes a
// one-dimensional planarity feature, a logistic discriminator is fit on it,
// and designs are ranked by mean log-likelihood advantage minus a cost
// penalty.

enum class DesignKind {
    Mono,
    Stereo,
    StereoWide,
    DepthSensor,
};

std::string_view design_kind_text(DesignKind kind);
std::optional<DesignKind> parse_design_kind(std::string_view text);

struct SensingDesign {
    std::string name;
    DesignKind kind = DesignKind::Mono;
    double baseline = 0;           // scene units; > 0 for stereo kinds
    double pixel_noise_sigma = 0;  // pixels, stereo kinds
    double depth_noise_sigma = 0;  // scene units, DepthSensor
    double cost = 0;               // c(theta), >= 0

    bool valid() const;
};

enum class PopulationKind {
    Real,
    Spoof,
};

struct ScenePopulation {
    PopulationKind kind = PopulationKind::Real;
    // Real: depths uniform in [center - halfwidth, center + halfwidth].
    double depth_center = 5.0;
    double depth_halfwidth = 1.0;
    // Spoof: points on z = plane_depth plus Gaussian depth perturbation
    // (0 = flat screen; > 0 models multifocal-display attacks).
    double plane_depth = 5.0;
    double perturbation_sigma = 0.0;
    int points_per_scene = 64;

    bool valid() const;
};

struct Scene {
    std::vector<geometry::Vec3> points;
};

Scene sample_scene(const ScenePopulation& population, std::uint64_t seed);

// The realized feature for one scene under one design:
//   stereo kinds  project->noise->triangulate->plane residual / mean depth
//   depth sensor  plane residual of depth-noised points / mean depth
//   mono          0 (planarity unobservable from one uncalibrated view)
Result<double, geometry::GeometryError> observe(const Scene& scene, const SensingDesign& design,
                                                std::uint64_t seed);

inline constexpr double kProbabilityClamp = 1e-6;
inline constexpr int kTrainIterations = 500;
inline constexpr double kTrainStep = 0.1;
inline constexpr double kHarnessFocalPx = 500.0;

// One-dimensional logistic model over the planarity feature; outputs are
// clamped to [epsilon, 1-epsilon].
struct Discriminator {
    double weight = 0;
    double bias = 0;
    double epsilon_clamp = kProbabilityClamp;

    double probability(double feature) const;
};

struct TrainError {
    std::string detail;
};

struct TrainResult {
    Discriminator discriminator;
    std::vector<double> nll_trace;  // mean negative log-likelihood per iteration
    double train_accuracy = 0;
};

// Mean-log-likelihood and its gradient for the raw (unstandardized) model;
// exposed so tests can check the analytic gradient against finite differences.
double logistic_mean_loglik(std::span<const double> real_features,
                            std::span<const double> spoof_features, double weight, double bias);
std::pair<double, double> logistic_mean_loglik_grad(std::span<const double> real_features,
                                                    std::span<const double> spoof_features,
                                                    double weight, double bias);

// Full-batch gradient ascent, fixed 500 iterations, step 0.1, on features
// standardized over the training set (the affine map folds back into
// weight/bias). Deterministic given inputs.
Result<TrainResult, TrainError> fit_discriminator(std::span<const double> real_features,
                                                  std::span<const double> spoof_features);

struct ObjectiveReport {
    SensingDesign design;
    double j_real = 0;     // mean log D over real evaluation features
    double j_spoof = 0;    // mean log (1 - D) over spoof evaluation features
    double cost_term = 0;  // beta * cost
    double objective = 0;  // j_real + j_spoof - cost_term
    double auc = 0;        // rank AUC of D over the evaluation features
};

ObjectiveReport evaluate_objective(const SensingDesign& design, const Discriminator& discriminator,
                                   std::span<const double> real_features,
                                   std::span<const double> spoof_features, double beta);

// Tie-corrected rank AUC of discriminator scores (real = positive class).
double rank_auc(std::span<const double> real_scores, std::span<const double> spoof_scores);

struct HarnessParams {
    int train_scenes_per_class = 200;
    int eval_scenes_per_class = 200;
};

struct DesignEvaluation {
    SensingDesign design;
    Discriminator discriminator;
    double j_real = 0;
    double j_spoof = 0;
    double auc = 0;
};

struct HarnessError {
    std::string detail;
};

// Samples train/eval scenes, observes features, fits the discriminator, and
// scores the design. Deterministic: sub-seeds derive from (seed, design name).
Result<DesignEvaluation, HarnessError> evaluate_design(const SensingDesign& design,
                                                       const ScenePopulation& real_population,
                                                       const ScenePopulation& spoof_population,
                                                       std::uint64_t seed,
                                                       const HarnessParams& params = {});

struct SelectionResult {
    SensingDesign best;
    std::vector<ObjectiveReport> reports;  // menu order
};

// argmax of the objective; ties break toward lower cost, then name.
Result<SelectionResult, HarnessError> select_design(std::span<const SensingDesign> menu,
                                                    const ScenePopulation& real_population,
                                                    const ScenePopulation& spoof_population,
                                                    double beta, std::uint64_t seed,
                                                    const HarnessParams& params = {});

ObjectiveReport report_for_beta(const DesignEvaluation& evaluation, double beta);

}  // namespace realseal::sensing
