#pragma once

#include "diforge/codebook.hpp"

#include <optional>
#include <string>
#include <vector>

namespace diforge {

enum class DecoderMode { Capacity, Poisson, RateReliability, Custom };

std::string to_string(DecoderMode m);

/// One acceptance radius shared by all layers; acceptance is closed (<= t).
struct DecoderParams {
    double t = 0.0;
    DecoderMode mode = DecoderMode::Custom;
};

DecoderParams capacity_decoder(int n);                 // t = ln n
DecoderParams poisson_decoder(int n, double A);        // t = A ln n
DecoderParams rate_reliability_decoder(int n, double E); // t = sqrt(nE)
DecoderParams custom_decoder(double t);

struct LayerTest {
    bool pass = false;
    double distance = 0.0;
};

/// distance = |<y - parent_center, v/|v|> - |v||, the projected distance from
/// y to the layer center along the layer direction.
LayerTest layer_test(const Vec& y, const Vec& parent_center, const Vec& direction,
                     double t);

struct Decision {
    bool accepted = false;
    std::optional<int> failed_layer; // 1-based; absent iff accepted
    std::vector<double> per_layer_distance; // filled up to the failing layer
};

/// Runs the per-layer tests along the path of `id`, short-circuiting on the
/// first failure.
Decision identify(const Vec& y, const PrimitiveCodebook& cb, const CodewordId& id,
                  const DecoderParams& params);

} // namespace diforge
