#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bmq/ablation.hpp"
#include "bmq/context.hpp"
#include "bmq/corpus.hpp"
#include "bmq/evalkit.hpp"
#include "bmq/index.hpp"
#include "bmq/llm.hpp"
#include "bmq/ontology.hpp"
#include "bmq/pipeline.hpp"

namespace py = pybind11;
using namespace bmq;

namespace {

std::map<std::string, int> dict_to_judgments(const py::dict& d) {
    std::map<std::string, int> out;
    for (const auto& item : d)
        out[item.first.cast<std::string>()] = item.second.cast<int>();
    return out;
}

std::vector<ScoredHit> ids_to_ranking(const std::vector<std::string>& doc_ids) {
    std::vector<ScoredHit> hits;
    hits.reserve(doc_ids.size());
    for (size_t i = 0; i < doc_ids.size(); ++i)
        hits.push_back({doc_ids[i], static_cast<double>(doc_ids.size() - i), uint32_t(i + 1)});
    return hits;
}

}  // namespace

PYBIND11_MODULE(_bmq, m) {
    m.doc() = "BM25 retrieval with ontology-guided query expansion";

    py::register_exception<Error>(m, "BmqError");

    py::class_<Document>(m, "Document")
        .def(py::init([](std::string id, std::string title, std::string body) {
                 return Document{std::move(id), std::move(title), std::move(body)};
             }),
             py::arg("id"), py::arg("title"), py::arg("body"))
        .def_readonly("id", &Document::id)
        .def_readonly("title", &Document::title)
        .def_readonly("body", &Document::body);

    py::class_<Corpus>(m, "Corpus")
        .def(py::init<>())
        .def("add", &Corpus::add)
        .def("__len__", &Corpus::size)
        .def("at", &Corpus::at, py::return_value_policy::reference_internal)
        .def("indexed_text", &Corpus::indexed_text);

    m.def("load_corpus", &load_corpus, py::arg("path"));
    m.def("load_queries", [](const std::filesystem::path& path) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const Query& q : load_queries(path)) out.emplace_back(q.id, q.text);
        return out;
    });

    m.def("tokenize",
          [](std::string_view text, bool stem) { return tokenize(text, {stem}); },
          py::arg("text"), py::arg("stem") = false);
    m.def("porter_stem", &porter_stem);

    py::class_<Bm25Params>(m, "Bm25Params")
        .def(py::init([](double k1, double b) { return Bm25Params{k1, b}; }),
             py::arg("k1") = 0.9, py::arg("b") = 0.4)
        .def_readwrite("k1", &Bm25Params::k1)
        .def_readwrite("b", &Bm25Params::b);

    py::class_<ScoredHit>(m, "ScoredHit")
        .def_readonly("doc_id", &ScoredHit::doc_id)
        .def_readonly("score", &ScoredHit::score)
        .def_readonly("rank", &ScoredHit::rank)
        .def("__repr__", [](const ScoredHit& h) {
            return "ScoredHit(doc_id='" + h.doc_id + "', rank=" + std::to_string(h.rank) +
                   ", score=" + std::to_string(h.score) + ")";
        });

    py::class_<InvertedIndex>(m, "InvertedIndex")
        .def_static(
            "build",
            [](const Corpus& corpus, bool stem, unsigned jobs) {
                return InvertedIndex::build(corpus, {stem}, jobs);
            },
            py::arg("corpus"), py::arg("stem") = false, py::arg("jobs") = 1)
        .def_static("load", &InvertedIndex::load)
        .def("save", &InvertedIndex::save)
        .def_property_readonly("doc_count", &InvertedIndex::doc_count)
        .def_property_readonly("vocab_size", &InvertedIndex::vocab_size)
        .def_property_readonly("avg_doc_len", &InvertedIndex::avg_doc_len)
        .def("bm25_score",
             [](const InvertedIndex& idx, const std::vector<std::string>& tokens, size_t ordinal,
                const Bm25Params& params) { return idx.bm25_score(tokens, ordinal, params); },
             py::arg("query_tokens"), py::arg("ordinal"), py::arg("params") = Bm25Params{})
        .def("search",
             [](const InvertedIndex& idx, std::string_view query, size_t k,
                const Bm25Params& params) { return idx.search(query, k, params); },
             py::arg("query"), py::arg("k") = 10, py::arg("params") = Bm25Params{});

    m.def("ndcg_at_k",
          [](const std::vector<std::string>& ranking, const py::dict& qrels, int k,
             bool exp_gain) {
              return ndcg_at_k(ids_to_ranking(ranking), dict_to_judgments(qrels), k, exp_gain);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("k") = 10, py::arg("exp_gain") = false);
    m.def("map_at_k",
          [](const std::vector<std::string>& ranking, const py::dict& qrels, int k) {
              return map_at_k(ids_to_ranking(ranking), dict_to_judgments(qrels), k);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("k") = 10);
    m.def("recall_at_k",
          [](const std::vector<std::string>& ranking, const py::dict& qrels, int k) {
              return recall_at_k(ids_to_ranking(ranking), dict_to_judgments(qrels), k);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("k") = 10);

    m.def("evaluate_files",
          [](const std::filesystem::path& run_path, const std::filesystem::path& qrels_path,
             int k, bool exp_gain) {
              MetricReport r = evaluate(read_trec_run(run_path), load_qrels(qrels_path), k,
                                        exp_gain);
              py::dict out;
              out["ndcg"] = r.mean.ndcg;
              out["map"] = r.mean.map;
              out["recall"] = r.mean.recall;
              out["evaluated_queries"] = r.evaluated_queries;
              return out;
          },
          py::arg("run"), py::arg("qrels"), py::arg("k") = 10, py::arg("exp_gain") = false);

    py::class_<DefinitionEntry>(m, "DefinitionEntry")
        .def(py::init([](std::string text, std::string source) {
                 return DefinitionEntry{std::move(text), std::move(source)};
             }),
             py::arg("text"), py::arg("source"))
        .def_readonly("text", &DefinitionEntry::text)
        .def_readonly("source", &DefinitionEntry::source);

    m.def("serialize_definitions",
          [](const std::vector<std::pair<std::string, std::vector<DefinitionEntry>>>& concepts) {
              std::vector<Concept> cs;
              int n = 0;
              for (const auto& [name, defs] : concepts) {
                  char cui[16];
                  std::snprintf(cui, sizeof(cui), "C%07d", ++n);
                  cs.push_back({Cui(cui), name, defs});
              }
              return serialize_definitions(cs);
          },
          "Serialize [(concept_name, [DefinitionEntry...]) ...] to prompt text");

    m.def("serialize_relations",
          [](const std::vector<std::pair<std::string,
                                         std::vector<std::pair<std::string, std::string>>>>&
                 graphs) {
              std::vector<SemanticGraph> gs;
              int n = 0;
              for (const auto& [center_name, edges] : graphs) {
                  char cui[16];
                  std::snprintf(cui, sizeof(cui), "C%07d", ++n);
                  SemanticGraph g{Cui(cui), center_name};
                  g.nodes.push_back({g.center, center_name});
                  for (const auto& [label, neighbor] : edges) {
                      char ncui[16];
                      std::snprintf(ncui, sizeof(ncui), "C%07d", ++n);
                      Cui to(ncui);
                      g.nodes.push_back({to, neighbor});
                      g.edges.push_back({g.center, to, RelationLabel::parse(label)});
                  }
                  gs.push_back(std::move(g));
              }
              return serialize_relations(gs);
          },
          "Serialize [(center_name, [(label, neighbor_name)...])...] to prompt text");

    m.def("parse_terms_response",
          [](std::string_view reply) { return parse_terms_response(reply).terms; });
    m.def("compose_expanded_query",
          [](std::string_view q, const std::optional<std::string>& pseudo, int alpha) {
              return compose_expanded_query(
                  q, pseudo ? std::optional<std::string_view>(*pseudo) : std::nullopt, alpha);
          },
          py::arg("query"), py::arg("pseudo_doc"), py::arg("alpha") = 5);

    m.def("render_term_extraction_prompt", &render_term_extraction_prompt);
    m.def("render_generation_prompt",
          [](std::string_view q, const std::string& defs, const std::string& rels, bool cot) {
              return render_generation_prompt(q, {defs, rels}, cot);
          },
          py::arg("query"), py::arg("definitions"), py::arg("relations"), py::arg("cot") = false);
    m.def("render_paraphrase_prompt", &render_paraphrase_prompt);
}
