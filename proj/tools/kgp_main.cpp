// kgp: command-line front end for graph building, traversal and evaluation.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "kgp/agent.hpp"
#include "kgp/answer.hpp"
#include "kgp/config.hpp"
#include "kgp/corpus.hpp"
#include "kgp/error.hpp"
#include "kgp/eval.hpp"
#include "kgp/graph.hpp"
#include "kgp/lexical.hpp"
#include "kgp/synth.hpp"
#include "kgp/traversal.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;

    kgp::EngineConfig load() const {
        kgp::EngineConfig c = config_path.empty() ? kgp::EngineConfig{} : kgp::load_engine_config(config_path);
        if (seed) c.seed = *seed;
        if (workers) c.workers = *workers;
        if (c.workers == 0) throw kgp::UsageError("--workers must be >= 1");
        return c;
    }
};

struct TraversalFlags {
    std::optional<std::size_t> budget, n_seed, top_k, max_hops;
    bool no_early_termination = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--budget", budget, "Passages retrieved per query (K)");
        cmd->add_option("--n-seed", n_seed, "TF-IDF seed passages");
        cmd->add_option("--top-k", top_k, "Neighbors selected per expansion");
        cmd->add_option("--max-hops", max_hops, "Maximum hops from a seed");
        cmd->add_flag("--no-early-termination", no_early_termination, "A stop only retires its own path");
    }

    kgp::TraversalConfig apply(kgp::TraversalConfig t) const {
        if (budget) t.budget = *budget;
        if (n_seed) t.n_seed = *n_seed;
        if (top_k) t.top_k = *top_k;
        if (max_hops) t.max_hops = *max_hops;
        if (no_early_termination) t.early_termination = false;
        t.validate();
        return t;
    }
};

fs::path require_path(const std::string& flag_value, const std::optional<fs::path>& from_config, const char* what) {
    if (!flag_value.empty()) return flag_value;
    if (from_config) return *from_config;
    throw kgp::UsageError(std::string("no ") + what + " given (flag or config file)");
}

std::shared_ptr<const kgp::Corpus> open_corpus(const fs::path& path) {
    if (!fs::exists(path)) throw kgp::NotFoundError("corpus file '" + path.string() + "' does not exist");
    return std::make_shared<const kgp::Corpus>(kgp::load_corpus(path));
}

kgp::PromptSet prompts_for(const kgp::EngineConfig& c) {
    return c.prompts_dir ? kgp::load_prompts(*c.prompts_dir) : kgp::default_prompts();
}

kgp::RoleConfig require_role(const std::optional<kgp::RoleConfig>& role, const char* name) {
    if (!role) throw kgp::UsageError(std::string("config has no llm.") + name + " section");
    return *role;
}

std::shared_ptr<const kgp::TraversalAgent> make_agent(const std::string& name, const kgp::EngineConfig& c,
                                                      const std::shared_ptr<const kgp::Corpus>& corpus,
                                                      const std::vector<kgp::GoldenRecord>* questions) {
    if (name == "keyword") return std::make_shared<kgp::KeywordDiffAgent>();
    if (name == "stop") return std::make_shared<kgp::StopAgent>();
    if (name == "oracle") {
        if (!questions) throw kgp::UsageError("the oracle agent needs --questions with golden chains");
        return std::make_shared<kgp::OracleAgent>(corpus, kgp::knowledge_from(*questions));
    }
    if (name == "llm") {
        auto role = require_role(c.agent, "agent");
        auto client = std::make_shared<const kgp::ChatClient>(role.endpoint);
        return std::make_shared<kgp::LlmAgent>(client, role, prompts_for(c), c.evidence_budget);
    }
    throw kgp::UsageError("unknown agent '" + name + "' (expected llm, oracle, keyword or stop)");
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kgp::DataError("cannot write '" + path.string() + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// ---- build-graph ----

struct BuildGraphArgs {
    std::string corpus, out, k_edges, provider, bundle;
};

int cmd_build_graph(const Common& common, const BuildGraphArgs& a) {
    auto c = common.load();
    fs::path corpus_path = a.bundle.empty() ? require_path(a.corpus, c.corpus, "corpus")
                                            : (a.corpus.empty() ? fs::path(a.bundle) / "corpus.jsonl" : fs::path(a.corpus));
    auto corpus = open_corpus(corpus_path);
    auto role = a.provider.empty() ? c.graph_embedding : kgp::parse_provider_spec(a.provider, c.graph_embedding);
    auto provider = kgp::make_provider(role);

    std::optional<kgp::SyntheticBundle> bundle;
    if (!a.bundle.empty()) bundle = kgp::load_bundle(a.bundle);

    std::size_t k = c.k_edges;
    std::vector<kgp::EmbeddingVector> embeddings;
    if (a.k_edges == "auto") {
        if (!bundle) throw kgp::UsageError("--k-edges auto needs --bundle");
        std::vector<std::string> texts;
        for (const auto& p : *corpus) texts.push_back(p.text);
        embeddings = provider->embed_batch(texts);
        k = std::max(k, kgp::minimum_k_edges(embeddings, *corpus, bundle->questions));
    } else if (!a.k_edges.empty()) {
        try {
            k = std::stoul(a.k_edges);
        } catch (const std::exception&) {
            throw kgp::UsageError("--k-edges must be a positive integer or 'auto'");
        }
    }

    auto graph = embeddings.empty()
                     ? kgp::build_graph(corpus, *provider, k, c.workers)
                     : kgp::KnowledgeGraph(corpus, embeddings, kgp::symmetric_knn(embeddings, k, c.workers), k,
                                           provider->name());
    fs::path out = a.out.empty() ? require_path("", c.graph, "output graph path") : fs::path(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    kgp::save_graph(graph, out);

    std::cerr << "graph: " << graph.size() << " nodes, " << graph.edge_count() << " edges, k_edges=" << k << "\n";
    if (bundle) {
        kgp::attach_edge_report(bundle->report, graph);
        auto report_path = fs::path(a.bundle) / "report.jsonl";
        auto rout = open_out(report_path);
        kgp::write_construction_report(bundle->report, rout);
        if (!bundle->report.all_edges_present()) {
            std::cerr << "warning: some golden chain edges are missing at k_edges=" << k << "\n";
        }
    }
    return 0;
}

// ---- traverse ----

struct TraverseArgs {
    std::string graph, corpus, query, questions, agent = "keyword", out, trace, ranker;
    TraversalFlags flags;
};

ojson result_json(const std::string& qid, const std::string& query, const kgp::TraversalResult& r,
                  const kgp::Corpus& corpus) {
    ojson j;
    j["query_id"] = qid;
    j["query"] = query;
    j["retrieved"] = r.retrieved;
    ojson paths = ojson::array();
    for (const auto& p : r.paths) {
        ojson ids = ojson::array();
        for (auto o : p) ids.push_back(corpus[o].id);
        paths.push_back(ids);
    }
    j["paths"] = paths;
    j["iterations"] = r.iterations;
    j["nodes_visited"] = r.nodes_visited;
    j["terminated_early"] = r.terminated_early;
    j["budget_exhausted"] = r.budget_exhausted;
    j["wall_time_ms"] = static_cast<double>(r.wall_time.count()) / 1000.0;
    return j;
}

int cmd_traverse(const Common& common, const TraverseArgs& a) {
    auto c = common.load();
    auto corpus = open_corpus(require_path(a.corpus, c.corpus, "corpus"));
    auto graph = kgp::load_graph(require_path(a.graph, c.graph, "graph"), corpus);
    auto tfidf = kgp::TfidfModel::fit(corpus);
    auto ranker = kgp::make_provider(a.ranker.empty() ? c.ranker : kgp::parse_provider_spec(a.ranker, c.ranker));
    auto tconf = a.flags.apply(c.traversal);

    std::vector<kgp::GoldenRecord> questions;
    if (!a.questions.empty()) questions = kgp::load_golden_records(a.questions);
    std::vector<std::pair<std::string, std::string>> queries;
    if (!a.query.empty()) {
        queries.push_back({"query", a.query});
    } else {
        for (const auto& q : questions) queries.push_back({q.id, q.question});
    }
    if (queries.empty()) throw kgp::UsageError("give --query or --questions");
    auto agent = make_agent(a.agent, c, corpus, questions.empty() ? nullptr : &questions);

    std::optional<std::ofstream> trace_out;
    if (!a.trace.empty()) trace_out = open_out(a.trace);
    kgp::TraceSink sink;
    if (trace_out) {
        sink = [&](const kgp::TraceRecord& t) {
            ojson j;
            j["query_id"] = t.query_id;
            j["step"] = t.step;
            j["path"] = t.path;
            j["decision"] = kgp::to_string(t.decision.kind());
            j["follow_up"] = t.decision.is_stop() ? ojson(nullptr) : ojson(t.decision.question());
            j["selected"] = t.selected;
            j["k"] = t.k;
            *trace_out << j.dump() << '\n';
        };
    }

    std::optional<std::ofstream> file_out;
    if (!a.out.empty()) file_out = open_out(a.out);
    std::ostream& out = file_out ? *file_out : std::cout;
    for (const auto& [qid, text] : queries) {
        auto r = kgp::traverse(graph, tfidf, *agent, *ranker, text, tconf, sink, qid);
        out << result_json(qid, text, r, *corpus).dump() << '\n';
    }
    return 0;
}

// ---- eval ----

struct EvalArgs {
    std::string graph, corpus, questions, agents = "oracle", out, ranker, judge = "none";
    std::optional<double> threshold;
    bool answer = false;
    TraversalFlags flags;
};

int cmd_eval(const Common& common, const EvalArgs& a) {
    auto c = common.load();
    auto corpus = open_corpus(require_path(a.corpus, c.corpus, "corpus"));
    auto graph = kgp::load_graph(require_path(a.graph, c.graph, "graph"), corpus);
    auto tfidf = kgp::TfidfModel::fit(corpus);
    auto ranker = kgp::make_provider(a.ranker.empty() ? c.ranker : kgp::parse_provider_spec(a.ranker, c.ranker));
    if (a.questions.empty()) throw kgp::UsageError("--questions is required");
    auto questions = kgp::load_golden_records(a.questions);

    kgp::EvalConfig ec;
    ec.traversal = a.flags.apply(c.traversal);
    ec.threshold = a.threshold.value_or(c.threshold);
    ec.workers = c.workers;
    if (a.answer) {
        kgp::AnsweringConfig ans;
        ans.answer_role = require_role(c.answerer, "answerer");
        ans.answer_client = std::make_shared<const kgp::ChatClient>(ans.answer_role.endpoint);
        ans.prompts = prompts_for(c);
        ans.char_budget = c.answer_budget;
        if (a.judge == "llm") {
            ans.judge = kgp::JudgeMode::llm;
            ans.judge_role = require_role(c.judge, "judge");
            ans.judge_client = std::make_shared<const kgp::ChatClient>(ans.judge_role.endpoint);
        } else if (a.judge == "exact") {
            ans.judge = kgp::JudgeMode::exact;
        } else {
            ans.judge = kgp::JudgeMode::none;
        }
        ec.answering = std::move(ans);
    } else if (a.judge != "none") {
        throw kgp::UsageError("--judge needs --answer");
    }

    std::vector<kgp::NamedAgent> agents;
    bool dense = false;
    for (const auto& name : split_list(a.agents)) {
        if (name == "dense") {
            dense = true;
            continue;
        }
        agents.push_back({name, make_agent(name, c, corpus, &questions)});
    }
    kgp::EvalReport report;
    if (!agents.empty()) report = kgp::run_eval(graph, tfidf, agents, *ranker, questions, ec);
    if (dense) {
        auto d = kgp::run_dense_eval(graph, *ranker, questions, ec.traversal.budget, ec.threshold, ec.workers);
        report.rows.insert(report.rows.end(), d.rows.begin(), d.rows.end());
        report.summaries = kgp::summarize_eval(report.rows);
    }
    if (report.rows.empty()) throw kgp::UsageError("--agents named no agent");

    if (a.out.empty()) {
        kgp::write_eval_summary(report, std::cout);
        return 0;
    }
    fs::create_directories(a.out);
    auto rows = open_out(fs::path(a.out) / "rows.jsonl");
    kgp::write_eval_rows(report, rows);
    auto summary = open_out(fs::path(a.out) / "summary.jsonl");
    kgp::write_eval_summary(report, summary);
    auto hist = open_out(fs::path(a.out) / "histograms.tsv");
    kgp::write_eval_histograms(report, hist);
    kgp::write_eval_summary(report, std::cout);
    return 0;
}

// ---- gen-synth ----

struct GenSynthArgs {
    std::string spec, out;
    std::optional<std::size_t> total;
};

int cmd_gen_synth(const Common& common, const GenSynthArgs& a) {
    kgp::SynthSpec spec = a.spec.empty() ? kgp::SynthSpec{} : kgp::load_synth_spec(a.spec);
    if (a.total) {
        auto resized = kgp::SynthSpec::from_total(*a.total, spec.seed, spec.proportions);
        spec.bridge = resized.bridge;
        spec.comparison = resized.comparison;
        spec.single = resized.single;
    }
    if (common.seed) spec.seed = *common.seed;
    auto bundle = kgp::generate_synthetic(spec);
    kgp::save_bundle(bundle, a.out);
    auto hotpot = open_out(fs::path(a.out) / "hotpot.jsonl");
    for (const auto& r : kgp::hotpot_records_from(bundle)) kgp::write_hotpot_record(r, hotpot);
    std::cerr << "bundle: " << bundle.corpus->size() << " passages, " << bundle.questions.size() << " questions ("
              << spec.bridge << " bridge, " << spec.comparison << " comparison, " << spec.single << " single)\n";
    if (!bundle.report.all_linked()) std::cerr << "warning: some chains share fewer than m tokens\n";
    return 0;
}

// ---- gen-followupqa ----

struct FollowupArgs {
    std::string in, out, mode = "oracle";
    std::size_t budget = 0;
    bool split = false;
};

int cmd_gen_followupqa(const Common& common, const FollowupArgs& a) {
    auto c = common.load();
    std::ifstream in(a.in);
    if (!in) throw kgp::NotFoundError("cannot open '" + a.in + "'");
    auto records = kgp::read_hotpot_records(in, a.in);

    kgp::FollowUpConfig fc;
    fc.seed = c.seed;
    fc.budget = a.budget;
    fc.workers = c.workers;
    if (a.mode == "llm") {
        fc.mode = kgp::FollowUpMode::llm;
        fc.role = require_role(c.dataset, "dataset");
        fc.client = std::make_shared<const kgp::ChatClient>(fc.role.endpoint);
        fc.prompts = prompts_for(c);
    } else if (a.mode != "oracle") {
        throw kgp::UsageError("--mode must be llm or oracle");
    }
    auto built = kgp::build_followupqa(records, fc);

    auto write = [](const fs::path& p, const std::vector<kgp::FollowUpSample>& samples) {
        auto out = open_out(p);
        for (const auto& s : samples) kgp::write_followup_sample(s, out);
    };
    write(a.out, built.samples);
    if (a.split && !built.samples.empty()) {
        auto splits = kgp::split_dataset(built.samples, {}, c.seed);
        fs::path base = fs::path(a.out).replace_extension();
        write(base.string() + ".train.jsonl", splits.train);
        write(base.string() + ".val.jsonl", splits.val);
        write(base.string() + ".test.jsonl", splits.test);
    }
    for (const auto& reason : built.skip_reasons) std::cerr << "skipped: " << reason << "\n";
    std::cerr << "samples: " << built.samples.size() << " of " << built.considered << " (" << built.skipped
              << " skipped)\n";
    return 0;
}

// ---- benchmark-agent ----

struct BenchmarkArgs {
    std::string testset, agent = "llm", out, provider;
    std::size_t bins = 10;
};

int cmd_benchmark_agent(const Common& common, const BenchmarkArgs& a) {
    auto c = common.load();
    std::ifstream in(a.testset);
    if (!in) throw kgp::NotFoundError("cannot open '" + a.testset + "'");
    auto samples = kgp::read_followup_samples(in, a.testset);
    if (a.agent == "oracle") throw kgp::UsageError("benchmark-agent supports llm, keyword and stop agents");
    auto agent = make_agent(a.agent, c, nullptr, nullptr);
    auto provider = kgp::make_provider(a.provider.empty() ? c.ranker : kgp::parse_provider_spec(a.provider, c.ranker));
    auto report = kgp::benchmark_agent(*agent, samples, *provider);

    fs::create_directories(a.out);
    auto rows = open_out(fs::path(a.out) / "rows.jsonl");
    kgp::write_benchmark_rows(report, rows);
    auto summary = open_out(fs::path(a.out) / "summary.jsonl");
    kgp::write_benchmark_summary(report, summary);
    auto hist = open_out(fs::path(a.out) / "histograms.tsv");
    kgp::write_benchmark_histograms(report, hist, a.bins);
    kgp::write_benchmark_summary(report, std::cout);
    return 0;
}

// ---- answer ----

struct AnswerArgs {
    std::string graph, corpus, questions, out, agent = "keyword", judge = "none", ranker;
    TraversalFlags flags;
};

int cmd_answer(const Common& common, const AnswerArgs& a) {
    auto c = common.load();
    auto corpus = open_corpus(require_path(a.corpus, c.corpus, "corpus"));
    auto graph = kgp::load_graph(require_path(a.graph, c.graph, "graph"), corpus);
    auto tfidf = kgp::TfidfModel::fit(corpus);
    auto ranker = kgp::make_provider(a.ranker.empty() ? c.ranker : kgp::parse_provider_spec(a.ranker, c.ranker));
    auto tconf = a.flags.apply(c.traversal);
    if (a.questions.empty()) throw kgp::UsageError("--questions is required");
    auto questions = kgp::load_golden_records(a.questions);
    auto agent = make_agent(a.agent, c, corpus, &questions);

    auto role = require_role(c.answerer, "answerer");
    auto client = std::make_shared<const kgp::ChatClient>(role.endpoint);
    std::shared_ptr<const kgp::ChatClient> judge_client;
    kgp::RoleConfig judge_role;
    if (a.judge == "llm") {
        judge_role = require_role(c.judge, "judge");
        judge_client = std::make_shared<const kgp::ChatClient>(judge_role.endpoint);
    } else if (a.judge != "exact" && a.judge != "none") {
        throw kgp::UsageError("--judge must be none, exact or llm");
    }
    auto prompts = prompts_for(c);

    std::optional<std::ofstream> file_out;
    if (!a.out.empty()) file_out = open_out(a.out);
    std::ostream& out = file_out ? *file_out : std::cout;
    for (const auto& q : questions) {
        auto r = kgp::traverse(graph, tfidf, *agent, *ranker, q.question, tconf, {}, q.id);
        std::vector<kgp::Passage> passages;
        for (auto o : r.retrieved_ordinals) passages.push_back((*corpus)[o]);
        kgp::AnswerRecord rec;
        rec.question_id = q.id;
        rec.question = q.question;
        rec.retrieved = r.retrieved;
        rec.answer = kgp::generate_answer(*client, role, q.question, passages, prompts, c.answer_budget);
        if (!q.answer.empty()) rec.gold = q.answer;
        if (rec.gold && a.judge == "exact") rec.verdict = kgp::judge_exact(rec.answer, *rec.gold);
        if (rec.gold && a.judge == "llm") {
            rec.verdict = kgp::judge_llm(*judge_client, judge_role, q.question, rec.answer, *rec.gold, prompts);
        }
        kgp::write_answer_record(rec, out);
    }
    return 0;
}

int exit_code_for(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const kgp::TraversalFailure& e) {
        return e.cause() ? exit_code_for(e.cause()) : 2;
    } catch (const kgp::UsageError&) {
        return 1;
    } catch (const kgp::NetworkError&) {
        return 3;
    } catch (const kgp::DataError&) {
        return 2;
    } catch (const CLI::Error&) {
        return 1;
    } catch (...) {
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph retrieval for multi-document question answering"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "Engine config file (JSON)");
    app.add_option("--seed", common.seed, "Seed for every random choice");
    app.add_option("--workers", common.workers, "Worker threads");

    BuildGraphArgs bg;
    auto* build = app.add_subcommand("build-graph", "Embed a corpus and write its kNN graph");
    build->add_option("--corpus", bg.corpus, "Corpus JSONL");
    build->add_option("--out", bg.out, "Graph file to write");
    build->add_option("--k-edges", bg.k_edges, "Neighbors per node before symmetrization, or 'auto'");
    build->add_option("--provider", bg.provider, "Embedding provider: hash[:dim=N,seed=S] or remote");
    build->add_option("--bundle", bg.bundle, "Synthetic bundle directory; updates its construction report");

    TraverseArgs tr;
    auto* trav = app.add_subcommand("traverse", "Retrieve passages for queries by graph traversal");
    trav->add_option("--graph", tr.graph, "Graph file");
    trav->add_option("--corpus", tr.corpus, "Corpus JSONL the graph was built from");
    trav->add_option("--query", tr.query, "Query text");
    trav->add_option("--questions", tr.questions, "Golden question file (all questions are traversed)");
    trav->add_option("--agent", tr.agent, "llm, oracle, keyword or stop")->capture_default_str();
    trav->add_option("--ranker", tr.ranker, "Neighbor-ranking embedding provider");
    trav->add_option("--out", tr.out, "Result JSONL (default stdout)");
    trav->add_option("--trace", tr.trace, "Per-step trace JSONL");
    tr.flags.add(trav);

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Score agents against golden chains");
    eval->add_option("--graph", ev.graph, "Graph file");
    eval->add_option("--corpus", ev.corpus, "Corpus JSONL");
    eval->add_option("--questions", ev.questions, "Golden question file");
    eval->add_option("--agents", ev.agents, "Comma list of llm, oracle, keyword, stop, dense")->capture_default_str();
    eval->add_option("--out", ev.out, "Output directory");
    eval->add_option("--ranker", ev.ranker, "Neighbor-ranking embedding provider");
    eval->add_option("--threshold", ev.threshold, "Cosine threshold for a golden match");
    eval->add_flag("--answer", ev.answer, "Generate answers with the answerer role");
    eval->add_option("--judge", ev.judge, "none, exact or llm")->capture_default_str();
    ev.flags.add(eval);

    GenSynthArgs gs;
    auto* synth = app.add_subcommand("gen-synth", "Generate a synthetic multi-hop bundle");
    synth->add_option("--spec", gs.spec, "Synth spec JSON");
    synth->add_option("--out", gs.out, "Output directory")->required();
    synth->add_option("--total", gs.total, "Total questions, split by the type proportions");

    FollowupArgs fu;
    auto* follow = app.add_subcommand("gen-followupqa", "Build follow-up question samples");
    follow->add_option("--in", fu.in, "HotpotQA-style records JSONL")->required();
    follow->add_option("--out", fu.out, "Samples JSONL")->required();
    follow->add_option("--mode", fu.mode, "llm or oracle")->capture_default_str();
    follow->add_option("--budget", fu.budget, "Maximum records sampled (0 = all)");
    follow->add_flag("--split", fu.split, "Also write 90/5/5 train/val/test files");

    BenchmarkArgs bm;
    auto* bench = app.add_subcommand("benchmark-agent", "Score an agent's follow-up questions");
    bench->add_option("--testset", bm.testset, "Follow-up samples JSONL")->required();
    bench->add_option("--agent", bm.agent, "llm, keyword or stop")->capture_default_str();
    bench->add_option("--out", bm.out, "Output directory")->required();
    bench->add_option("--provider", bm.provider, "Embedding provider for cosine");
    bench->add_option("--bins", bm.bins, "Histogram bins")->capture_default_str();

    AnswerArgs an;
    auto* answer = app.add_subcommand("answer", "Traverse, then answer each question with the answerer role");
    answer->add_option("--graph", an.graph, "Graph file");
    answer->add_option("--corpus", an.corpus, "Corpus JSONL");
    answer->add_option("--questions", an.questions, "Golden question file");
    answer->add_option("--out", an.out, "Answer records JSONL (default stdout)");
    answer->add_option("--agent", an.agent, "Traversal agent")->capture_default_str();
    answer->add_option("--ranker", an.ranker, "Neighbor-ranking embedding provider");
    answer->add_option("--judge", an.judge, "none, exact or llm")->capture_default_str();
    an.flags.add(answer);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    try {
        if (*build) return cmd_build_graph(common, bg);
        if (*trav) return cmd_traverse(common, tr);
        if (*eval) return cmd_eval(common, ev);
        if (*synth) return cmd_gen_synth(common, gs);
        if (*follow) return cmd_gen_followupqa(common, fu);
        if (*bench) return cmd_benchmark_agent(common, bm);
        if (*answer) return cmd_answer(common, an);
    } catch (const std::exception& e) {
        std::cerr << "kgp: error: " << e.what() << "\n";
        return exit_code_for(std::current_exception());
    }
    return 1;
}
