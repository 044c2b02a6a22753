#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xmodal/checkpoint.hpp"
#include "xmodal/clustering.hpp"
#include "xmodal/data.hpp"
#include "xmodal/geometry.hpp"
#include "xmodal/metrics.hpp"
#include "xmodal/mining.hpp"
#include "xmodal/runner.hpp"
#include "xmodal/train.hpp"

namespace py = pybind11;
using namespace xmodal;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Crossmodal metric-learning toolkit: hypersphere triplet losses, "
              "transfer triplet mining, clustering and verification metrics.";

    py::register_exception<Error>(m, "XmodalError");

    py::enum_<Modality>(m, "Modality")
        .value("Audio", Modality::Audio)
        .value("Visual", Modality::Visual);

    py::enum_<TransferKind>(m, "TransferKind")
        .value("None_", TransferKind::None)
        .value("Target", TransferKind::Target)
        .value("Relative", TransferKind::Relative)
        .value("Structure", TransferKind::Structure);

    py::class_<Triplet>(m, "Triplet")
        .def(py::init<int, int, int>(), py::arg("anchor"), py::arg("positive"), py::arg("negative"))
        .def_readwrite("anchor", &Triplet::anchor)
        .def_readwrite("positive", &Triplet::positive)
        .def_readwrite("negative", &Triplet::negative)
        .def("__repr__", [](const Triplet& t) {
            return "Triplet(" + std::to_string(t.anchor) + ", " + std::to_string(t.positive) + ", " +
                   std::to_string(t.negative) + ")";
        });

    py::class_<CrossmodalTriplet>(m, "CrossmodalTriplet")
        .def_readwrite("anchor", &CrossmodalTriplet::anchor)
        .def_readwrite("anchor_mod", &CrossmodalTriplet::anchor_mod)
        .def_readwrite("positive", &CrossmodalTriplet::positive)
        .def_readwrite("positive_mod", &CrossmodalTriplet::positive_mod)
        .def_readwrite("negative", &CrossmodalTriplet::negative)
        .def_readwrite("negative_mod", &CrossmodalTriplet::negative_mod);

    // geometry
    m.def("l2_normalize", &l2_normalize, py::arg("v"));
    m.def("pairwise_distance", &pairwise_distance, py::arg("e1"), py::arg("e2"));
    m.def("triplet_hinge", &triplet_hinge, py::arg("anchor"), py::arg("positive"), py::arg("negative"),
          py::arg("alpha") = 0.2);
    m.def("mean_triplet_loss",
          py::overload_cast<const std::vector<Vec>&, const TripletSet&, double>(&mean_triplet_loss),
          py::arg("embeddings"), py::arg("triples"), py::arg("alpha") = 0.2);
    m.def("crossmodal_triplet_loss",
          py::overload_cast<const std::vector<Vec>&, const std::vector<Vec>&,
                            const CrossmodalTripletSet&, double>(&mean_triplet_loss),
          py::arg("audio"), py::arg("visual"), py::arg("triples"), py::arg("alpha") = 0.2);
    m.def("combined_loss", &combined_loss, py::arg("primary_loss"), py::arg("transfer_loss"),
          py::arg("lambda_"));
    m.def("identity_centroid", &identity_centroid, py::arg("embeddings"));

    // mining
    py::class_<MiningPolicy>(m, "MiningPolicy")
        .def(py::init<>())
        .def_readwrite("use_hard", &MiningPolicy::use_hard)
        .def_readwrite("use_semihard", &MiningPolicy::use_semihard)
        .def_readwrite("cap", &MiningPolicy::cap)
        .def_readwrite("seed", &MiningPolicy::seed);

    py::class_<ClusterMapping>(m, "ClusterMapping")
        .def(py::init<>())
        .def_readwrite("num_clusters", &ClusterMapping::num_clusters)
        .def_readwrite("cluster_of", &ClusterMapping::cluster_of);

    m.def("mine_within_modality", &mine_within_modality, py::arg("embeddings"), py::arg("identities"),
          py::arg("alpha") = 0.2, py::arg("policy") = MiningPolicy{});
    m.def("build_target_set", &build_target_set, py::arg("audio_embeddings"),
          py::arg("audio_identities"), py::arg("visual_embeddings"), py::arg("visual_identities"),
          py::arg("alpha") = 0.2);
    m.def("build_relative_set", &build_relative_set, py::arg("audio_embeddings"),
          py::arg("audio_identities"), py::arg("visual_centroids"), py::arg("alpha") = 0.2);
    m.def("build_structure_set", &build_structure_set, py::arg("audio_embeddings"),
          py::arg("audio_identities"), py::arg("mapping"), py::arg("alpha") = 0.2,
          py::arg("literal_alg3") = false);
    m.def("cap_triplets",
          py::overload_cast<const TripletSet&, std::size_t, std::uint64_t>(&cap_triplets),
          py::arg("triples"), py::arg("cap"), py::arg("seed") = 0);

    // clustering
    py::class_<KMeansResult>(m, "KMeansResult")
        .def_readonly("centers", &KMeansResult::centers)
        .def_readonly("assignment", &KMeansResult::assignment)
        .def_readonly("inertia", &KMeansResult::inertia)
        .def_readonly("inertia_history", &KMeansResult::inertia_history);
    m.def("kmeans", &kmeans, py::arg("points"), py::arg("num_clusters"), py::arg("seed") = 0);
    m.def("cluster_mapping", &cluster_mapping, py::arg("result"), py::arg("identities"));

    py::class_<MergeEvent>(m, "MergeEvent")
        .def_readonly("left", &MergeEvent::left)
        .def_readonly("right", &MergeEvent::right)
        .def_readonly("distance", &MergeEvent::distance)
        .def_readonly("merged", &MergeEvent::merged);
    py::class_<MergeTrace>(m, "MergeTrace")
        .def_readonly("num_leaves", &MergeTrace::num_leaves)
        .def_readonly("merges", &MergeTrace::merges);
    m.def("agglomerative", &agglomerative, py::arg("points"));

    // metrics
    py::class_<ScorePairs>(m, "ScorePairs")
        .def(py::init<>())
        .def(py::init([](std::vector<double> pos, std::vector<double> neg) {
                 return ScorePairs{std::move(pos), std::move(neg)};
             }),
             py::arg("positives"), py::arg("negatives"))
        .def_readwrite("positives", &ScorePairs::positives)
        .def_readwrite("negatives", &ScorePairs::negatives);
    m.def("eer", &eer, py::arg("scores"));
    m.def("roc_auc", &roc_auc, py::arg("scores"));
    m.def("wcp", &wcp, py::arg("partition"));
    m.def("wce", &wce, py::arg("partition"));
    m.def("oci_k", &oci_k, py::arg("partition"));
    py::class_<RetrievalQuery>(m, "RetrievalQuery")
        .def(py::init([](Vec query, Vec correct, std::vector<Vec> distractors) {
                 return RetrievalQuery{std::move(query), std::move(correct), std::move(distractors)};
             }),
             py::arg("query"), py::arg("correct"), py::arg("distractors"))
        .def_readwrite("query", &RetrievalQuery::query)
        .def_readwrite("correct", &RetrievalQuery::correct)
        .def_readwrite("distractors", &RetrievalQuery::distractors);
    m.def("prec_at_k", &prec_at_k, py::arg("queries"), py::arg("k"),
          py::arg("strict_precision") = false);
    py::class_<CurvePoint>(m, "CurvePoint")
        .def_readonly("num_clusters", &CurvePoint::num_clusters)
        .def_readonly("wcp", &CurvePoint::wcp)
        .def_readonly("wce", &CurvePoint::wce)
        .def_readonly("oci_k", &CurvePoint::oci_k);
    py::class_<ClusteringCurve>(m, "ClusteringCurve")
        .def_readonly("points", &ClusteringCurve::points)
        .def_readonly("min_ocik", &ClusteringCurve::min_ocik)
        .def_readonly("min_ocik_nclusters", &ClusteringCurve::min_ocik_nclusters)
        .def_readonly("ocik_at_ideal", &ClusteringCurve::ocik_at_ideal)
        .def_readonly("ideal_nclusters", &ClusteringCurve::ideal_nclusters);
    m.def("clustering_curve", &clustering_curve, py::arg("trace"), py::arg("labels"),
          py::arg("ideal_nclusters"));

    // data
    py::class_<Sample>(m, "Sample")
        .def(py::init<>())
        .def_readwrite("sample_id", &Sample::sample_id)
        .def_readwrite("identity", &Sample::identity)
        .def_readwrite("modality", &Sample::modality)
        .def_readwrite("split", &Sample::split)
        .def_readwrite("frames", &Sample::frames);
    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("samples", &Dataset::samples)
        .def("identities", &Dataset::identities, py::arg("split"))
        .def("validate", &Dataset::validate);
    py::class_<SyntheticConfig>(m, "SyntheticConfig")
        .def(py::init<>())
        .def_readwrite("num_identities", &SyntheticConfig::num_identities)
        .def_readwrite("groups", &SyntheticConfig::groups)
        .def_readwrite("latent_dim", &SyntheticConfig::latent_dim)
        .def_readwrite("audio_frame_dim", &SyntheticConfig::audio_frame_dim)
        .def_readwrite("visual_frame_dim", &SyntheticConfig::visual_frame_dim)
        .def_readwrite("frames_per_audio_sample", &SyntheticConfig::frames_per_audio_sample)
        .def_readwrite("samples_per_identity", &SyntheticConfig::samples_per_identity)
        .def_readwrite("noise_sigma_audio", &SyntheticConfig::noise_sigma_audio)
        .def_readwrite("noise_sigma_visual", &SyntheticConfig::noise_sigma_visual)
        .def_readwrite("crossmodal_share", &SyntheticConfig::crossmodal_share)
        .def_readwrite("within_group_sigma", &SyntheticConfig::within_group_sigma)
        .def_readwrite("test_fraction", &SyntheticConfig::test_fraction)
        .def_readwrite("seed", &SyntheticConfig::seed);
    py::class_<SyntheticData>(m, "SyntheticData")
        .def_readonly("dataset", &SyntheticData::dataset)
        .def_readonly("group_of", &SyntheticData::group_of);
    m.def("generate_synthetic", &generate_synthetic, py::arg("config"));
    m.def("split_by_identity", &split_by_identity, py::arg("dataset"), py::arg("test_fraction"),
          py::arg("seed"));
    m.def("load_jsonl", &load_jsonl, py::arg("path"));
    m.def("save_jsonl", &save_jsonl, py::arg("dataset"), py::arg("path"));

    // encoder + training
    py::class_<EncoderSpec>(m, "EncoderSpec")
        .def(py::init<>())
        .def_readwrite("input_frame_dim", &EncoderSpec::input_frame_dim)
        .def_readwrite("hidden_dim", &EncoderSpec::hidden_dim)
        .def_readwrite("embedding_dim", &EncoderSpec::embedding_dim);
    py::class_<EncoderParams>(m, "EncoderParams");
    m.def("init_encoder", &init_encoder, py::arg("spec"), py::arg("seed"));
    m.def("encode", &encode, py::arg("params"), py::arg("frames"));

    py::class_<LossConfig>(m, "LossConfig")
        .def(py::init<>())
        .def_readwrite("margin", &LossConfig::margin)
        .def_readwrite("lambda_", &LossConfig::lambda)
        .def_readwrite("transfer_margin", &LossConfig::transfer_margin);
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_identities", &TrainConfig::batch_identities)
        .def_readwrite("batch_samples", &TrainConfig::batch_samples)
        .def_readwrite("loss", &TrainConfig::loss)
        .def_readwrite("transfer", &TrainConfig::transfer)
        .def_readwrite("structure_clusters", &TrainConfig::structure_clusters)
        .def_readwrite("mining", &TrainConfig::mining)
        .def_readwrite("transfer_cap", &TrainConfig::transfer_cap)
        .def_readwrite("literal_alg3", &TrainConfig::literal_alg3)
        .def_readwrite("renormalize_centroids", &TrainConfig::renormalize_centroids)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("seed", &TrainConfig::seed);
    py::class_<SourceEmbeddings>(m, "SourceEmbeddings")
        .def(py::init<>())
        .def_readwrite("embeddings", &SourceEmbeddings::embeddings)
        .def_readwrite("identities", &SourceEmbeddings::identities);
    py::class_<EpochStats>(m, "EpochStats")
        .def_readonly("epoch", &EpochStats::epoch)
        .def_readonly("primary_loss", &EpochStats::primary_loss)
        .def_readonly("transfer_loss", &EpochStats::transfer_loss)
        .def_readonly("total_loss", &EpochStats::total_loss)
        .def_readonly("primary_triplets", &EpochStats::primary_triplets)
        .def_readonly("transfer_triplets", &EpochStats::transfer_triplets);
    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("params", &TrainResult::params)
        .def_readonly("history", &TrainResult::history);
    m.def("train", &train, py::arg("audio_train"), py::arg("source"), py::arg("spec"),
          py::arg("config"));

    py::class_<FiniteDiffReport::Block>(m, "FiniteDiffBlock")
        .def_readonly("name", &FiniteDiffReport::Block::name)
        .def_readonly("max_rel_error", &FiniteDiffReport::Block::max_rel_error);
    py::class_<FiniteDiffReport>(m, "FiniteDiffReport")
        .def_readonly("blocks", &FiniteDiffReport::blocks)
        .def_readonly("max_rel_error", &FiniteDiffReport::max_rel_error)
        .def_readonly("pass_", &FiniteDiffReport::pass)
        .def_readonly("tolerance", &FiniteDiffReport::tolerance);
    m.def("finite_diff_check", &finite_diff_check, py::arg("params"), py::arg("audio"),
          py::arg("source"), py::arg("config"), py::arg("tolerance") = 1e-4);

    // checkpoints and experiment runner
    py::class_<Checkpoint>(m, "Checkpoint")
        .def(py::init<>())
        .def_readwrite("spec", &Checkpoint::spec)
        .def_readwrite("params", &Checkpoint::params)
        .def_readwrite("modality", &Checkpoint::modality)
        .def_readwrite("seed", &Checkpoint::seed);
    m.def("save_checkpoint", &save_checkpoint, py::arg("checkpoint"), py::arg("path"));
    m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("train", &ExperimentConfig::train)
        .def_readwrite("hidden_dim", &ExperimentConfig::hidden_dim)
        .def_readwrite("embedding_dim", &ExperimentConfig::embedding_dim)
        .def_readwrite("source_epochs", &ExperimentConfig::source_epochs)
        .def_readwrite("source_checkpoint", &ExperimentConfig::source_checkpoint);
    py::class_<TrainRunResult>(m, "TrainRunResult")
        .def_readonly("audio", &TrainRunResult::audio)
        .def_readonly("source", &TrainRunResult::source)
        .def_readonly("history", &TrainRunResult::history);
    m.def("train_run", &train_run, py::arg("dataset"), py::arg("config"));

    py::class_<RetrievalSetting>(m, "RetrievalSetting")
        .def_readonly("name", &RetrievalSetting::name)
        .def_readonly("prec_at", &RetrievalSetting::prec_at);
    py::class_<EvalOptions>(m, "EvalOptions")
        .def(py::init<>())
        .def_readwrite("ideal_clusters", &EvalOptions::ideal_clusters)
        .def_readwrite("retrieval", &EvalOptions::retrieval)
        .def_readwrite("retrieval_draws", &EvalOptions::retrieval_draws)
        .def_readwrite("strict_precision", &EvalOptions::strict_precision)
        .def_readwrite("source_checkpoint", &EvalOptions::source_checkpoint)
        .def_readwrite("seed", &EvalOptions::seed);
    py::class_<EvalResult>(m, "EvalResult")
        .def_readonly("eer", &EvalResult::eer)
        .def_readonly("auc", &EvalResult::auc)
        .def_readonly("curve", &EvalResult::curve)
        .def_readonly("retrieval", &EvalResult::retrieval)
        .def_readonly("test_identities", &EvalResult::test_identities)
        .def_readonly("test_samples", &EvalResult::test_samples);
    m.def("eval_run", &eval_run, py::arg("dataset"), py::arg("audio"), py::arg("options"));
}
