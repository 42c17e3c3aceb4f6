#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "diforge/bounds.hpp"
#include "diforge/channels.hpp"
#include "diforge/codebook.hpp"
#include "diforge/decoder.hpp"
#include "diforge/errors.hpp"
#include "diforge/experiments.hpp"
#include "diforge/geometry.hpp"
#include "diforge/serialize.hpp"

namespace py = pybind11;
using namespace diforge;

PYBIND11_MODULE(diforge, m) {
    m.doc() = "deterministic-identification codebooks: construction, decoding, "
              "and error estimation";
    m.attr("__version__") = "0.1.0";

    py::register_exception<PlacementExhausted>(m, "PlacementExhausted");
    py::register_exception<RegimeViolation>(m, "RegimeViolation");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const UsageError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::enum_<BuildMode>(m, "BuildMode")
        .value("Custom", BuildMode::Custom)
        .value("Capacity", BuildMode::Capacity)
        .value("RateReliability", BuildMode::RateReliability);
    py::enum_<ChannelKind>(m, "ChannelKind")
        .value("Bernoulli", ChannelKind::Bernoulli)
        .value("RestrictedBernoulli", ChannelKind::RestrictedBernoulli)
        .value("Poisson", ChannelKind::Poisson);
    py::enum_<DecoderMode>(m, "DecoderMode")
        .value("Capacity", DecoderMode::Capacity)
        .value("Poisson", DecoderMode::Poisson)
        .value("RateReliability", DecoderMode::RateReliability)
        .value("Custom", DecoderMode::Custom);

    py::class_<CodewordId>(m, "CodewordId")
        .def(py::init<>())
        .def(py::init([](std::vector<int> idx) {
                 return CodewordId{std::move(idx)};
             }),
             py::arg("indices"))
        .def_readwrite("indices", &CodewordId::indices)
        .def("__eq__", [](const CodewordId& a, const CodewordId& b) { return a == b; })
        .def("__repr__", [](const CodewordId& id) { return "CodewordId(" + id.str() + ")"; })
        .def("__str__", &CodewordId::str);

    py::class_<CodebookParams>(m, "CodebookParams")
        .def(py::init<>())
        .def_readwrite("n", &CodebookParams::n)
        .def_readwrite("L", &CodebookParams::L)
        .def_readwrite("delta", &CodebookParams::delta)
        .def_readwrite("radii", &CodebookParams::radii)
        .def_readwrite("min_proj_dist", &CodebookParams::min_proj_dist)
        .def_readwrite("branching", &CodebookParams::branching)
        .def_readwrite("seed", &CodebookParams::seed)
        .def_readwrite("mode", &CodebookParams::mode)
        .def_readwrite("max_attempts", &CodebookParams::max_attempts)
        .def("validate", &CodebookParams::validate)
        .def("leaf_count", &CodebookParams::leaf_count);

    py::class_<CodebookNode>(m, "CodebookNode")
        .def_readonly("layer", &CodebookNode::layer)
        .def_readonly("sibling", &CodebookNode::sibling)
        .def_readonly("parent", &CodebookNode::parent)
        .def_readonly("direction", &CodebookNode::direction)
        .def_readonly("center", &CodebookNode::center)
        .def_readonly("children", &CodebookNode::children);

    py::class_<PrimitiveCodebook>(m, "PrimitiveCodebook")
        .def_readonly("params", &PrimitiveCodebook::params)
        .def_readonly("center", &PrimitiveCodebook::center)
        .def_readonly("nodes", &PrimitiveCodebook::nodes)
        .def_readonly("leaf_ids", &PrimitiveCodebook::leaf_ids)
        .def("node_of", &PrimitiveCodebook::node_of, py::arg("id"));

    py::class_<InputBox>(m, "InputBox")
        .def(py::init([](double lo, double hi, int n) {
                 return InputBox{lo, hi, n};
             }),
             py::arg("lo"), py::arg("hi"), py::arg("n"))
        .def_readonly("lo", &InputBox::lo)
        .def_readonly("hi", &InputBox::hi)
        .def_readonly("n", &InputBox::n)
        .def("contains", &InputBox::contains, py::arg("x"));

    py::class_<ChannelModel>(m, "ChannelModel")
        .def_readonly("kind", &ChannelModel::kind)
        .def_readonly("n", &ChannelModel::n)
        .def_readonly("a", &ChannelModel::a)
        .def_readonly("b", &ChannelModel::b)
        .def_readonly("A", &ChannelModel::A)
        .def("input_box", &ChannelModel::input_box);

    py::class_<DecoderParams>(m, "DecoderParams")
        .def_readonly("t", &DecoderParams::t)
        .def_readonly("mode", &DecoderParams::mode);

    py::class_<LayerTest>(m, "LayerTest")
        .def_readonly("passed", &LayerTest::pass)
        .def_readonly("distance", &LayerTest::distance);

    py::class_<Decision>(m, "Decision")
        .def_readonly("accepted", &Decision::accepted)
        .def_readonly("failed_layer", &Decision::failed_layer)
        .def_readonly("per_layer_distance", &Decision::per_layer_distance);

    py::class_<SeparationReport>(m, "SeparationReport")
        .def_readonly("min_sep", &SeparationReport::min_sep)
        .def_readonly("bound", &SeparationReport::bound)
        .def_readonly("tested", &SeparationReport::tested)
        .def_readonly("transmitted", &SeparationReport::transmitted)
        .def_readonly("pairs_checked", &SeparationReport::pairs_checked)
        .def_readonly("exhaustive", &SeparationReport::exhaustive);

    py::class_<ExpurgationReport>(m, "ExpurgationReport")
        .def_readonly("total", &ExpurgationReport::total)
        .def_readonly("retained", &ExpurgationReport::retained)
        .def_readonly("fraction_out", &ExpurgationReport::fraction_out)
        .def_readonly("rotation_seed", &ExpurgationReport::rotation_seed)
        .def_readonly("used_rotation", &ExpurgationReport::used_rotation);

    py::class_<CodebookCheck>(m, "CodebookCheck")
        .def_readonly("ok", &CodebookCheck::ok)
        .def_readonly("max_path_inner", &CodebookCheck::max_path_inner)
        .def_readonly("max_radius_rel_err", &CodebookCheck::max_radius_rel_err)
        .def_readonly("max_word_radius_rel_err", &CodebookCheck::max_word_radius_rel_err)
        .def_readonly("min_sibling_sep", &CodebookCheck::min_sibling_sep)
        .def_readonly("min_projective_sep", &CodebookCheck::min_projective_sep)
        .def_readonly("projective_bound", &CodebookCheck::projective_bound)
        .def_readonly("leaf_count_ok", &CodebookCheck::leaf_count_ok)
        .def_readonly("failures", &CodebookCheck::failures);

    py::class_<ErrorEstimate>(m, "ErrorEstimate")
        .def_readonly("p_hat", &ErrorEstimate::p_hat)
        .def_readonly("trials", &ErrorEstimate::trials)
        .def_readonly("failures", &ErrorEstimate::failures)
        .def_readonly("ci_lo", &ErrorEstimate::ci_lo)
        .def_readonly("ci_hi", &ErrorEstimate::ci_hi)
        .def_readonly("level", &ErrorEstimate::level)
        .def_readonly("bound", &ErrorEstimate::bound)
        .def_readonly("zero_failure_regime", &ErrorEstimate::zero_failure_regime)
        .def_readonly("consistent", &ErrorEstimate::consistent);

    py::class_<RateReport>(m, "RateReport")
        .def_readonly("n", &RateReport::n)
        .def_readonly("L", &RateReport::L)
        .def_readonly("N_retained", &RateReport::N_retained)
        .def_readonly("linear_rate", &RateReport::linear_rate)
        .def_readonly("linearithmic_rate", &RateReport::linearithmic_rate)
        .def_readonly("theoretical_primitive_log2N",
                      &RateReport::theoretical_primitive_log2N)
        .def_readonly("rr_lower_bound", &RateReport::rr_lower_bound)
        .def_readonly("rr_upper_bound", &RateReport::rr_upper_bound);

    py::class_<BoundCatalog>(m, "BoundCatalog")
        .def_readonly("n", &BoundCatalog::n)
        .def_readonly("L", &BoundCatalog::L)
        .def_readonly("delta", &BoundCatalog::delta)
        .def_readonly("t", &BoundCatalog::t)
        .def_readonly("d", &BoundCatalog::d)
        .def_readonly("radii", &BoundCatalog::radii)
        .def_readonly("lambda_", &BoundCatalog::lambda)
        .def_readonly("lambda1", &BoundCatalog::lambda1)
        .def_readonly("lambda2", &BoundCatalog::lambda2)
        .def_readonly("theta", &BoundCatalog::theta)
        .def_readonly("Delta_bound", &BoundCatalog::Delta_bound)
        .def_readonly("prop4_log2N", &BoundCatalog::prop4_log2N)
        .def_readonly("linearithmic_rate_bound", &BoundCatalog::linearithmic_rate_bound)
        .def_readonly("eta_L", &BoundCatalog::eta_L)
        .def_readonly("R_sq", &BoundCatalog::R_sq)
        .def_readonly("vertex_distance_sq", &BoundCatalog::vertex_distance_sq)
        .def_readonly("E", &BoundCatalog::E)
        .def_readonly("E1", &BoundCatalog::E1)
        .def_readonly("E2", &BoundCatalog::E2)
        .def_readonly("rr_lower_bound", &BoundCatalog::rr_lower_bound)
        .def_readonly("rr_converse_bound", &BoundCatalog::rr_converse_bound);

    py::class_<ReductionSpec>(m, "ReductionSpec")
        .def_readonly("A", &ReductionSpec::A)
        .def("induced_param", &ReductionSpec::induced_param, py::arg("x"))
        .def("interval_lo", &ReductionSpec::interval_lo)
        .def_property_readonly_static("interval_hi",
                                      [](py::object) { return ReductionSpec::interval_hi; })
        .def("post_process", &ReductionSpec::post_process, py::arg("raw"));

    py::class_<ReductionCheck>(m, "ReductionCheck")
        .def_readonly("x", &ReductionCheck::x)
        .def_readonly("p0", &ReductionCheck::p0)
        .def_readonly("trials", &ReductionCheck::trials)
        .def_readonly("pipeline_ones", &ReductionCheck::pipeline_ones)
        .def_readonly("direct_ones", &ReductionCheck::direct_ones)
        .def_readonly("pipeline_pvalue", &ReductionCheck::pipeline_pvalue)
        .def_readonly("direct_pvalue", &ReductionCheck::direct_pvalue);

    py::class_<RrBuild>(m, "RrBuild")
        .def_readonly("codebook", &RrBuild::codebook)
        .def_readonly("catalog", &RrBuild::catalog);

    // geometry
    m.def("project_onto", &project_onto, py::arg("z"), py::arg("v"),
          "returns (coefficient, norm of the projection of z onto span(v))");
    m.def("min_separation_angle", &min_separation_angle, py::arg("r"), py::arg("d"),
          "smallest angle between points at distance-to-projection d on a radius-r sphere");

    // codebook
    m.def("capacity_params", &capacity_params, py::arg("n"), py::arg("L"),
          py::arg("delta"), py::arg("branching"), py::arg("seed"));
    m.def("build_primitive", &build_primitive, py::arg("params"),
          py::arg("center") = std::nullopt);
    m.def("codeword_vector", &codeword_vector, py::arg("codebook"), py::arg("id"));
    m.def(
        "pairwise_projective_separation",
        [](const PrimitiveCodebook& cb, std::optional<long long> sample_pairs) {
            return pairwise_projective_separation(cb, sample_pairs);
        },
        py::arg("codebook"), py::arg("sample_pairs") = std::nullopt);
    m.def("expurgate", &expurgate, py::arg("codebook"), py::arg("box"),
          py::arg("rotation_seed") = 0, py::arg("use_rotation") = false);
    m.def("rotated_copy", &rotated_copy, py::arg("codebook"), py::arg("rotation_seed"));
    m.def("affine_map", &affine_map, py::arg("codebook"), py::arg("scale"),
          py::arg("new_center"));
    m.def("verify_codebook", &verify_codebook, py::arg("codebook"));
    m.def("save_codebook", &save_codebook, py::arg("codebook"), py::arg("path"));
    m.def("load_codebook", &load_codebook, py::arg("path"));

    // channels
    m.def("bernoulli_channel", &bernoulli_channel, py::arg("n"));
    m.def("restricted_bernoulli_channel", &restricted_bernoulli_channel, py::arg("n"),
          py::arg("a"), py::arg("b"));
    m.def("poisson_channel", &poisson_channel, py::arg("n"), py::arg("A"));
    m.def("transmit", &transmit, py::arg("channel"), py::arg("x"), py::arg("seed"));
    m.def("poisson_to_bernoulli_reduction", &poisson_to_bernoulli_reduction,
          py::arg("A"));
    m.def("apply_reduction", &apply_reduction, py::arg("spec"), py::arg("raw_y"));

    // decoder
    m.def("capacity_decoder", &capacity_decoder, py::arg("n"));
    m.def("poisson_decoder", &poisson_decoder, py::arg("n"), py::arg("A"));
    m.def("rate_reliability_decoder", &rate_reliability_decoder, py::arg("n"),
          py::arg("E"));
    m.def("custom_decoder", &custom_decoder, py::arg("t"));
    m.def("layer_test", &layer_test, py::arg("y"), py::arg("parent_center"),
          py::arg("direction"), py::arg("t"));
    m.def("identify", &identify, py::arg("y"), py::arg("codebook"), py::arg("id"),
          py::arg("decoder"));

    // experiments
    m.def("concentration_experiment", &concentration_experiment, py::arg("channel"),
          py::arg("x"), py::arg("direction"), py::arg("t"), py::arg("trials"),
          py::arg("seed"));
    m.def("estimate_missed_id", &estimate_missed_id, py::arg("codebook"),
          py::arg("channel"), py::arg("decoder"), py::arg("ids"), py::arg("trials"),
          py::arg("seed"));
    m.def(
        "estimate_false_id",
        [](const PrimitiveCodebook& cb, const ChannelModel& ch,
           const DecoderParams& dec, const std::vector<CodewordId>& ids,
           long long trials, std::uint64_t seed, bool adversarial,
           std::optional<std::pair<CodewordId, CodewordId>> pair) {
            FalseIdOptions opts;
            if (pair) {
                opts.sampling = PairSampling::Explicit;
                opts.pair = std::move(pair);
            } else {
                opts.sampling = adversarial ? PairSampling::AdversarialMinSep
                                            : PairSampling::Random;
            }
            return estimate_false_id(cb, ch, dec, ids, opts, trials, seed);
        },
        py::arg("codebook"), py::arg("channel"), py::arg("decoder"), py::arg("ids"),
        py::arg("trials"), py::arg("seed"), py::arg("adversarial") = true,
        py::arg("pair") = std::nullopt);
    m.def("per_layer_lambda", &per_layer_lambda, py::arg("channel"), py::arg("decoder"),
          py::arg("n"), py::arg("L"));
    m.def("rate_report", &rate_report, py::arg("codebook"), py::arg("expurgation"),
          py::arg("E") = std::nullopt);
    m.def("reduction_check", &reduction_check, py::arg("A"), py::arg("x"),
          py::arg("trials"), py::arg("seed"));
    m.def("rr_build", &rr_build, py::arg("n"), py::arg("L"), py::arg("delta"),
          py::arg("E"), py::arg("branching"), py::arg("seed"),
          py::arg("gen_separation") = std::nullopt);

    // bounds
    m.def("bernoulli_tail_bound", &bernoulli_tail_bound, py::arg("t"));
    m.def("poisson_tail_bound", &poisson_tail_bound, py::arg("t"), py::arg("A"));
    m.def("capacity_radii", &capacity_radii, py::arg("n"), py::arg("L"),
          py::arg("delta"));
    m.def("rr_radii_closed", &rr_radii_closed, py::arg("n"), py::arg("L"),
          py::arg("delta"), py::arg("E"));
    m.def("rr_radii_recursive", &rr_radii_recursive, py::arg("n"), py::arg("L"),
          py::arg("delta"), py::arg("E"));
    m.def("rr_regime_limit", &rr_regime_limit, py::arg("n"), py::arg("delta"));
    m.def("rr_lower_bound_bits", &rr_lower_bound_bits, py::arg("n"), py::arg("L"),
          py::arg("delta"), py::arg("E"));
    m.def("rr_converse_bound_bits", &rr_converse_bound_bits, py::arg("E"));
    m.def("capacity_catalog", &capacity_catalog, py::arg("n"), py::arg("L"),
          py::arg("delta"));
    m.def("poisson_catalog", &poisson_catalog, py::arg("n"), py::arg("L"),
          py::arg("delta"), py::arg("A"));
    m.def("rr_catalog", &rr_catalog, py::arg("n"), py::arg("L"), py::arg("delta"),
          py::arg("E"));
}
