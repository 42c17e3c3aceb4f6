#include "diforge/decoder.hpp"

#include <cmath>

namespace diforge {

std::string to_string(DecoderMode m) {
    switch (m) {
        case DecoderMode::Capacity: return "capacity";
        case DecoderMode::Poisson: return "poisson";
        case DecoderMode::RateReliability: return "rate-reliability";
        default: return "custom";
    }
}

DecoderParams capacity_decoder(int n) {
    if (n < 2) throw UsageError("decoder: n must be >= 2");
    return {std::log(static_cast<double>(n)), DecoderMode::Capacity};
}

DecoderParams poisson_decoder(int n, double A) {
    if (n < 2) throw UsageError("decoder: n must be >= 2");
    if (!(A > 0.0)) throw UsageError("decoder: A must be positive");
    return {A * std::log(static_cast<double>(n)), DecoderMode::Poisson};
}

DecoderParams rate_reliability_decoder(int n, double E) {
    if (n < 2) throw UsageError("decoder: n must be >= 2");
    if (!(E > 0.0)) throw UsageError("decoder: E must be positive");
    return {std::sqrt(static_cast<double>(n) * E), DecoderMode::RateReliability};
}

DecoderParams custom_decoder(double t) {
    if (!(t >= 0.0)) throw UsageError("decoder: t must be nonnegative");
    return {t, DecoderMode::Custom};
}

LayerTest layer_test(const Vec& y, const Vec& parent_center, const Vec& direction,
                     double t) {
    double r = norm(direction);
    if (r == 0.0) throw ZeroDirection("layer_test: zero direction");
    if (y.size() != parent_center.size() || y.size() != direction.size()) {
        throw DimMismatch("layer_test: dimension mismatch");
    }
    double coeff = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        coeff += (y[i] - parent_center[i]) * direction[i];
    }
    coeff /= r;
    double distance = std::fabs(coeff - r);
    return {distance <= t, distance};
}

Decision identify(const Vec& y, const PrimitiveCodebook& cb, const CodewordId& id,
                  const DecoderParams& params) {
    int node = cb.node_of(id); // validates the id up front
    (void)node;

    Decision dec;
    int cur = 0;
    for (int l = 0; l < cb.params.L; ++l) {
        const auto& parent = cb.nodes[static_cast<std::size_t>(cur)];
        cur = parent.children[static_cast<std::size_t>(
            id.indices[static_cast<std::size_t>(l)])];
        const auto& child = cb.nodes[static_cast<std::size_t>(cur)];
        auto lt = layer_test(y, parent.center, child.direction, params.t);
        dec.per_layer_distance.push_back(lt.distance);
        if (!lt.pass) {
            dec.failed_layer = l + 1;
            return dec;
        }
    }
    dec.accepted = true;
    return dec;
}

} // namespace diforge
