#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "fri/data.hpp"

namespace fri::datagen {

enum class LupiMode { None, CleanPrivileged, NoisePrivileged };

struct GenSpec {
    int n_samples = 0;
    int n_strong = 0;
    int n_weak = 0;
    int n_irrelevant = 0;
    int n_bins = 5;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    LupiMode lupi_mode = LupiMode::None;
    int n_priv_irrelevant = 0;  // NoisePrivileged only
};

/// Synthetic ordinal-regression set with known per-feature ground truth.
/// Strong features enter the generating score directly; weak features come
/// in groups of scaled copies of a 2-term combination of withheld parent
/// variables, so each copy is substitutable by construction; irrelevant
/// columns are i.i.d. Gaussian. Labels = equal-frequency bins of the
/// score; all columns standardized.
std::pair<data::Dataset, data::GroundTruth> generate(const GenSpec& spec);

/// Privileged block = the clean generating features x*; regular block
/// x = x* + standard Gaussian noise. Same relevance structure on both.
std::pair<data::LupiDataset, data::GroundTruth> generate_lupi_clean(
    const GenSpec& spec);

/// Regular block from generate(); privileged block = pure Gaussian noise
/// columns (all Irrelevant).
std::pair<data::LupiDataset, data::GroundTruth> generate_lupi_noise_priv(
    const GenSpec& spec);

/// Dispatches on spec.lupi_mode (must not be None).
std::pair<data::LupiDataset, data::GroundTruth> generate_lupi(
    const GenSpec& spec);

/// 400 samples in four groups of 100; 3 strong + 3 irrelevant regular
/// features; group g in {1,2,3} gets Gaussian noise of sigma 0.1 / 0.5 / 2
/// added to strong feature g, and privileged column g records the realized
/// noise (zero elsewhere); group 4 is clean.
std::pair<data::LupiDataset, data::GroundTruth> generate_semantic_scenario(
    std::uint64_t seed);

/// Named presets ("set1".."set9", "lupi-set1".."lupi-set8"); unknown names
/// raise an error listing the options.
GenSpec preset(const std::string& name);

}  // namespace fri::datagen
