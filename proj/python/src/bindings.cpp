#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kgp/agent.hpp"
#include "kgp/config.hpp"
#include "kgp/corpus.hpp"
#include "kgp/error.hpp"
#include "kgp/eval.hpp"
#include "kgp/graph.hpp"
#include "kgp/lexical.hpp"
#include "kgp/synth.hpp"
#include "kgp/traversal.hpp"

namespace py = pybind11;

namespace {

std::vector<float> to_list(const kgp::EmbeddingVector& v) { return {v.values().begin(), v.values().end()}; }

py::dict passage_dict(const kgp::Passage& p) {
    py::dict d;
    d["id"] = p.id;
    d["title"] = p.title;
    d["text"] = p.text;
    return d;
}

// Everything traverse needs, loaded once.
struct Engine {
    std::shared_ptr<const kgp::Corpus> corpus;
    std::shared_ptr<const kgp::KnowledgeGraph> graph;
    std::shared_ptr<const kgp::TfidfModel> tfidf;
    std::shared_ptr<const kgp::EmbeddingProvider> ranker;
    kgp::OracleKnowledge knowledge;

    Engine(const std::filesystem::path& corpus_path, const std::filesystem::path& graph_path,
           const std::string& ranker_spec, const std::optional<std::filesystem::path>& questions) {
        corpus = std::make_shared<const kgp::Corpus>(kgp::load_corpus(corpus_path));
        graph = std::make_shared<const kgp::KnowledgeGraph>(kgp::load_graph(graph_path, corpus));
        tfidf = std::make_shared<const kgp::TfidfModel>(kgp::TfidfModel::fit(corpus));
        ranker = kgp::make_provider(kgp::parse_provider_spec(ranker_spec));
        if (questions) knowledge = kgp::knowledge_from(kgp::load_golden_records(*questions));
    }

    py::dict traverse(const std::string& query, const std::string& agent_name, std::size_t budget, std::size_t n_seed,
                      std::size_t top_k, std::size_t max_hops, bool early_termination) const {
        std::shared_ptr<const kgp::TraversalAgent> agent;
        if (agent_name == "keyword") agent = std::make_shared<kgp::KeywordDiffAgent>();
        else if (agent_name == "stop") agent = std::make_shared<kgp::StopAgent>();
        else if (agent_name == "oracle") agent = std::make_shared<kgp::OracleAgent>(corpus, knowledge);
        else throw kgp::UsageError("agent must be keyword, stop or oracle");
        kgp::TraversalConfig c{budget, n_seed, top_k, max_hops, early_termination};
        kgp::TraversalResult r;
        {
            py::gil_scoped_release release;
            r = kgp::traverse(*graph, *tfidf, *agent, *ranker, query, c);
        }
        py::dict d;
        d["retrieved"] = r.retrieved;
        d["paths"] = r.paths;
        d["iterations"] = r.iterations;
        d["nodes_visited"] = r.nodes_visited;
        d["terminated_early"] = r.terminated_early;
        d["budget_exhausted"] = r.budget_exhausted;
        return d;
    }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Knowledge-graph retrieval core";

    auto base = py::register_exception<kgp::Error>(m, "Error");
    py::register_exception<kgp::UsageError>(m, "UsageError", base.ptr());
    auto data = py::register_exception<kgp::DataError>(m, "DataError", base.ptr());
    py::register_exception<kgp::NetworkError>(m, "NetworkError", base.ptr());
    py::register_exception<kgp::CorruptFileError>(m, "CorruptFileError", data.ptr());
    py::register_exception<kgp::ProvenanceError>(m, "ProvenanceError", data.ptr());

    m.def("tokenize", &kgp::tokenize, py::arg("text"));
    m.def(
        "hash_embed",
        [](const std::string& text, std::size_t dimension, std::uint64_t seed) {
            return to_list(kgp::hash_embed(text, dimension, seed));
        },
        py::arg("text"), py::arg("dimension") = kgp::HashEmbedder::kDefaultDimension, py::arg("seed") = 0);
    m.def("rouge1_f", &kgp::rouge1_f, py::arg("candidate"), py::arg("reference"));
    m.def("rougeL_f", &kgp::rougeL_f, py::arg("candidate"), py::arg("reference"));
    m.def(
        "parse_decision",
        [](const std::string& raw) -> std::optional<std::string> {
            auto d = kgp::parse_decision(raw);
            if (d.is_stop()) return std::nullopt;
            return d.question();
        },
        py::arg("raw"), "Follow-up question text, or None for a stop.");

    py::class_<kgp::Corpus, std::shared_ptr<kgp::Corpus>>(m, "Corpus")
        .def_static("load", [](const std::filesystem::path& p) { return std::make_shared<kgp::Corpus>(kgp::load_corpus(p)); })
        .def("__len__", &kgp::Corpus::size)
        .def("__contains__", &kgp::Corpus::contains)
        .def("__getitem__", [](const kgp::Corpus& c, const std::string& id) { return passage_dict(c.get(id)); })
        .def("ids", [](const kgp::Corpus& c) {
            std::vector<std::string> ids;
            for (const auto& p : c) ids.push_back(p.id);
            return ids;
        });

    m.def(
        "tfidf_top_k",
        [](std::shared_ptr<kgp::Corpus> corpus, const std::string& query, std::size_t k) {
            auto model = kgp::TfidfModel::fit(corpus);
            std::vector<std::pair<std::string, double>> out;
            for (const auto& s : model.top_k(query, k)) out.emplace_back(s.id, s.score);
            return out;
        },
        py::arg("corpus"), py::arg("query"), py::arg("k"));

    m.def(
        "build_graph",
        [](std::shared_ptr<kgp::Corpus> corpus, const std::filesystem::path& out, std::size_t k_edges,
           const std::string& provider, std::size_t workers) {
            auto p = kgp::make_provider(kgp::parse_provider_spec(provider));
            py::gil_scoped_release release;
            auto g = kgp::build_graph(corpus, *p, k_edges, workers);
            kgp::save_graph(g, out);
            return g.edge_count();
        },
        py::arg("corpus"), py::arg("out"), py::arg("k_edges") = 10, py::arg("provider") = "hash",
        py::arg("workers") = 1, "Builds and saves a graph; returns the undirected edge count.");

    m.def(
        "generate_synthetic",
        [](const std::filesystem::path& out, std::size_t total, std::uint64_t seed) {
            auto b = kgp::generate_synthetic(kgp::SynthSpec::from_total(total, seed));
            kgp::save_bundle(b, out);
            return b.corpus->size();
        },
        py::arg("out"), py::arg("total") = 200, py::arg("seed") = 0, "Writes a bundle; returns the passage count.");

    py::class_<Engine>(m, "Engine")
        .def(py::init<const std::filesystem::path&, const std::filesystem::path&, const std::string&,
                      const std::optional<std::filesystem::path>&>(),
             py::arg("corpus"), py::arg("graph"), py::arg("ranker") = "hash", py::arg("questions") = std::nullopt)
        .def("traverse", &Engine::traverse, py::arg("query"), py::arg("agent") = "keyword", py::arg("budget") = 30,
             py::arg("n_seed") = 5, py::arg("top_k") = 3, py::arg("max_hops") = 2, py::arg("early_termination") = true);
}
