#include "realseal/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "realseal/rng.hpp"

namespace realseal::sensing {

using geometry::CameraRig;
using geometry::PixelPair;
using geometry::Vec3;

std::string_view design_kind_text(DesignKind kind) {
    switch (kind) {
        case DesignKind::Mono: return "mono";
        case DesignKind::Stereo: return "stereo";
        case DesignKind::StereoWide: return "stereo-wide";
        case DesignKind::DepthSensor: return "depth-sensor";
    }
    return "mono";
}

std::optional<DesignKind> parse_design_kind(std::string_view text) {
    if (text == "mono") return DesignKind::Mono;
    if (text == "stereo") return DesignKind::Stereo;
    if (text == "stereo-wide") return DesignKind::StereoWide;
    if (text == "depth-sensor") return DesignKind::DepthSensor;
    return std::nullopt;
}

bool SensingDesign::valid() const {
    if (name.empty() || cost < 0) return false;
    bool stereo = kind == DesignKind::Stereo || kind == DesignKind::StereoWide;
    if (stereo && !(baseline > 0)) return false;
    if (pixel_noise_sigma < 0 || depth_noise_sigma < 0) return false;
    return true;
}

bool ScenePopulation::valid() const {
    if (points_per_scene < 4) return false;
    if (kind == PopulationKind::Real) {
        return depth_halfwidth > 0 && depth_center - depth_halfwidth > 0;
    }
    return plane_depth > 0 && perturbation_sigma >= 0;
}

Scene sample_scene(const ScenePopulation& population, std::uint64_t seed) {
    Rng rng(seed);
    Scene scene;
    scene.points.reserve(static_cast<std::size_t>(population.points_per_scene));
    for (int i = 0; i < population.points_per_scene; ++i) {
        double x = rng.uniform(-1.0, 1.0);
        double y = rng.uniform(-1.0, 1.0);
        double z;
        if (population.kind == PopulationKind::Real) {
            z = rng.uniform(population.depth_center - population.depth_halfwidth,
                            population.depth_center + population.depth_halfwidth);
        } else {
            z = population.plane_depth;
            if (population.perturbation_sigma > 0) {
                z += rng.gaussian(0.0, population.perturbation_sigma);
            }
        }
        scene.points.push_back({x, y, z});
    }
    return scene;
}

Result<double, geometry::GeometryError> observe(const Scene& scene, const SensingDesign& design,
                                                std::uint64_t seed) {
    Rng rng(seed);
    switch (design.kind) {
        case DesignKind::Mono:
            return 0.0;
        case DesignKind::Stereo:
        case DesignKind::StereoWide: {
            CameraRig rig = geometry::make_stereo_rig(kHarnessFocalPx, design.baseline);
            std::vector<PixelPair> pairs;
            pairs.reserve(scene.points.size());
            for (const Vec3& p : scene.points) {
                auto a = geometry::project(p, rig.cam_a);
                if (!a.ok()) return a.error();
                auto b = geometry::project(p, rig.cam_b);
                if (!b.ok()) return b.error();
                PixelPair pair{a.value(), b.value()};
                if (design.pixel_noise_sigma > 0) {
                    pair.a.u += rng.gaussian(0.0, design.pixel_noise_sigma);
                    pair.a.v += rng.gaussian(0.0, design.pixel_noise_sigma);
                    pair.b.u += rng.gaussian(0.0, design.pixel_noise_sigma);
                    pair.b.v += rng.gaussian(0.0, design.pixel_noise_sigma);
                }
                pairs.push_back(pair);
            }
            auto report = geometry::classify_scene(pairs, rig);
            if (!report.ok()) return report.error();
            return report.value().normalized_score;
        }
        case DesignKind::DepthSensor: {
            std::vector<Vec3> noisy = scene.points;
            if (design.depth_noise_sigma > 0) {
                for (Vec3& p : noisy) p.z += rng.gaussian(0.0, design.depth_noise_sigma);
            }
            auto fit = geometry::fit_plane(noisy);
            if (!fit.ok()) return fit.error();
            double mean_depth = 0;
            for (const Vec3& p : noisy) mean_depth += p.z;
            mean_depth /= static_cast<double>(noisy.size());
            if (!(mean_depth > 0)) {
                return geometry::GeometryError{geometry::GeometryErrorKind::DegeneratePoints,
                                               "nonpositive mean depth"};
            }
            return fit.value().rms_residual / mean_depth;
        }
    }
    return 0.0;
}

double Discriminator::probability(double feature) const {
    double p = 1.0 / (1.0 + std::exp(-(weight * feature + bias)));
    return std::clamp(p, epsilon_clamp, 1.0 - epsilon_clamp);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double logistic_mean_loglik(std::span<const double> real_features,
                            std::span<const double> spoof_features, double weight, double bias) {
    double total = 0;
    // log sigmoid(z) = -log(1 + exp(-z)), written via log1p for stability.
    auto log_sigmoid = [](double z) {
        return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
    };
    for (double x : real_features) total += log_sigmoid(weight * x + bias);
    for (double x : spoof_features) total += log_sigmoid(-(weight * x + bias));
    return total / static_cast<double>(real_features.size() + spoof_features.size());
}

std::pair<double, double> logistic_mean_loglik_grad(std::span<const double> real_features,
                                                    std::span<const double> spoof_features,
                                                    double weight, double bias) {
    double gw = 0, gb = 0;
    for (double x : real_features) {
        double r = 1.0 - sigmoid(weight * x + bias);
        gw += r * x;
        gb += r;
    }
    for (double x : spoof_features) {
        double r = -sigmoid(weight * x + bias);
        gw += r * x;
        gb += r;
    }
    double n = static_cast<double>(real_features.size() + spoof_features.size());
    return {gw / n, gb / n};
}

Result<TrainResult, TrainError> fit_discriminator(std::span<const double> real_features,
                                                  std::span<const double> spoof_features) {
    if (real_features.empty() || spoof_features.empty()) {
        return TrainError{"training set must contain both classes"};
    }

    // Standardize over the pooled training set; the affine map is folded back
    // into the returned weight/bias so the model stays a plain 1-D logistic.
    double n = static_cast<double>(real_features.size() + spoof_features.size());
    double mean = 0;
    for (double x : real_features) mean += x;
    for (double x : spoof_features) mean += x;
    mean /= n;
    double var = 0;
    for (double x : real_features) var += (x - mean) * (x - mean);
    for (double x : spoof_features) var += (x - mean) * (x - mean);
    var /= n;
    double scale = var > 1e-24 ? std::sqrt(var) : 1.0;

    std::vector<double> zr(real_features.begin(), real_features.end());
    std::vector<double> zs(spoof_features.begin(), spoof_features.end());
    for (double& x : zr) x = (x - mean) / scale;
    for (double& x : zs) x = (x - mean) / scale;

    double w = 0, b = 0;
    TrainResult result;
    result.nll_trace.reserve(kTrainIterations);
    for (int iter = 0; iter < kTrainIterations; ++iter) {
        result.nll_trace.push_back(-logistic_mean_loglik(zr, zs, w, b));
        auto [gw, gb] = logistic_mean_loglik_grad(zr, zs, w, b);
        w += kTrainStep * gw;
        b += kTrainStep * gb;
    }

    result.discriminator.weight = w / scale;
    result.discriminator.bias = b - w * mean / scale;
    result.discriminator.epsilon_clamp = kProbabilityClamp;

    std::size_t correct = 0;
    for (double x : real_features) {
        if (result.discriminator.probability(x) > 0.5) ++correct;
    }
    for (double x : spoof_features) {
        if (result.discriminator.probability(x) <= 0.5) ++correct;
    }
    result.train_accuracy = static_cast<double>(correct) / n;
    return result;
}

double rank_auc(std::span<const double> real_scores, std::span<const double> spoof_scores) {
    // Mann-Whitney U with 1/2 credit for ties.
    if (real_scores.empty() || spoof_scores.empty()) return 0.5;
    double u = 0;
    for (double r : real_scores) {
        for (double s : spoof_scores) {
            if (r > s) u += 1.0;
            else if (r == s) u += 0.5;
        }
    }
    return u / (static_cast<double>(real_scores.size()) *
                static_cast<double>(spoof_scores.size()));
}

ObjectiveReport evaluate_objective(const SensingDesign& design, const Discriminator& discriminator,
                                   std::span<const double> real_features,
                                   std::span<const double> spoof_features, double beta) {
    ObjectiveReport report;
    report.design = design;
    double sum_real = 0;
    for (double x : real_features) sum_real += std::log(discriminator.probability(x));
    report.j_real = real_features.empty() ? 0 : sum_real / static_cast<double>(real_features.size());
    double sum_spoof = 0;
    for (double x : spoof_features) sum_spoof += std::log(1.0 - discriminator.probability(x));
    report.j_spoof =
        spoof_features.empty() ? 0 : sum_spoof / static_cast<double>(spoof_features.size());
    report.cost_term = beta * design.cost;
    report.objective = report.j_real + report.j_spoof - report.cost_term;

    std::vector<double> real_scores, spoof_scores;
    real_scores.reserve(real_features.size());
    spoof_scores.reserve(spoof_features.size());
    for (double x : real_features) real_scores.push_back(discriminator.probability(x));
    for (double x : spoof_features) spoof_scores.push_back(discriminator.probability(x));
    report.auc = rank_auc(real_scores, spoof_scores);
    return report;
}

Result<DesignEvaluation, HarnessError> evaluate_design(const SensingDesign& design,
                                                       const ScenePopulation& real_population,
                                                       const ScenePopulation& spoof_population,
                                                       std::uint64_t seed,
                                                       const HarnessParams& params) {
    if (!design.valid()) return HarnessError{"invalid design: " + design.name};
    if (!real_population.valid() || real_population.kind != PopulationKind::Real) {
        return HarnessError{"invalid real population"};
    }
    if (!spoof_population.valid() || spoof_population.kind != PopulationKind::Spoof) {
        return HarnessError{"invalid spoof population"};
    }
    if (params.train_scenes_per_class < 1 || params.eval_scenes_per_class < 1) {
        return HarnessError{"scene counts must be positive"};
    }

    std::uint64_t design_seed = derive_seed(seed, design.name);
    auto features = [&](const ScenePopulation& population, std::uint64_t stream,
                        int count) -> Result<std::vector<double>, HarnessError> {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            std::uint64_t scene_seed =
                derive_seed(design_seed, stream * 1000003ull + static_cast<std::uint64_t>(i));
            Scene scene = sample_scene(population, scene_seed);
            auto feature = observe(scene, design, derive_seed(scene_seed, 1));
            if (!feature.ok()) {
                return HarnessError{"observe failed for " + design.name + ": " +
                                    feature.error().detail};
            }
            out.push_back(feature.value());
        }
        return out;
    };

    auto train_real = features(real_population, 1, params.train_scenes_per_class);
    if (!train_real.ok()) return train_real.error();
    auto train_spoof = features(spoof_population, 2, params.train_scenes_per_class);
    if (!train_spoof.ok()) return train_spoof.error();
    auto eval_real = features(real_population, 3, params.eval_scenes_per_class);
    if (!eval_real.ok()) return eval_real.error();
    auto eval_spoof = features(spoof_population, 4, params.eval_scenes_per_class);
    if (!eval_spoof.ok()) return eval_spoof.error();

    auto trained = fit_discriminator(train_real.value(), train_spoof.value());
    if (!trained.ok()) return HarnessError{trained.error().detail};

    DesignEvaluation evaluation;
    evaluation.design = design;
    evaluation.discriminator = trained.value().discriminator;
    ObjectiveReport base = evaluate_objective(design, evaluation.discriminator,
                                              eval_real.value(), eval_spoof.value(), 0.0);
    evaluation.j_real = base.j_real;
    evaluation.j_spoof = base.j_spoof;
    evaluation.auc = base.auc;
    return evaluation;
}

ObjectiveReport report_for_beta(const DesignEvaluation& evaluation, double beta) {
    ObjectiveReport report;
    report.design = evaluation.design;
    report.j_real = evaluation.j_real;
    report.j_spoof = evaluation.j_spoof;
    report.auc = evaluation.auc;
    report.cost_term = beta * evaluation.design.cost;
    report.objective = report.j_real + report.j_spoof - report.cost_term;
    return report;
}

Result<SelectionResult, HarnessError> select_design(std::span<const SensingDesign> menu,
                                                    const ScenePopulation& real_population,
                                                    const ScenePopulation& spoof_population,
                                                    double beta, std::uint64_t seed,
                                                    const HarnessParams& params) {
    if (menu.empty()) return HarnessError{"design menu is empty"};
    if (beta < 0) return HarnessError{"beta must be nonnegative"};

    SelectionResult result;
    const ObjectiveReport* best = nullptr;
    for (const SensingDesign& design : menu) {
        auto evaluation = evaluate_design(design, real_population, spoof_population, seed, params);
        if (!evaluation.ok()) return evaluation.error();
        result.reports.push_back(report_for_beta(evaluation.value(), beta));
    }
    for (const ObjectiveReport& report : result.reports) {
        if (!best || report.objective > best->objective ||
            (report.objective == best->objective &&
             (report.design.cost < best->design.cost ||
              (report.design.cost == best->design.cost &&
               report.design.name < best->design.name)))) {
            best = &report;
        }
    }
    result.best = best->design;
    return result;
}

}  // namespace realseal::sensing
