#include "kgp/eval.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>
#include <unordered_map>

#include "kgp/error.hpp"
#include "kgp/text.hpp"

namespace kgp {

using ojson = nlohmann::ordered_json;

const char* to_string(QuestionType t) {
    switch (t) {
        case QuestionType::bridge: return "bridge";
        case QuestionType::comparison: return "comparison";
        case QuestionType::single: return "single";
    }
    return "single";
}

QuestionType parse_question_type(std::string_view s) {
    if (s == "bridge") return QuestionType::bridge;
    if (s == "comparison") return QuestionType::comparison;
    if (s == "single" || s == "single-hop" || s == "single_hop") return QuestionType::single;
    throw DataError("unknown question type '" + std::string(s) + "'");
}

void GoldenRecord::validate() const {
    if (id.empty()) throw DataError("golden record without id");
    if (type == QuestionType::single && golden_ids.size() != 1) {
        throw DataError("single-hop question '" + id + "' must have exactly one golden id");
    }
    if (type != QuestionType::single && golden_ids.size() < 2) {
        throw DataError(std::string(to_string(type)) + " question '" + id + "' needs at least two golden ids");
    }
}

void write_golden_record(const GoldenRecord& r, std::ostream& out) {
    ojson j;
    j["id"] = r.id;
    j["question"] = r.question;
    j["answer"] = r.answer;
    j["golden_ids"] = r.golden_ids;
    j["type"] = to_string(r.type);
    out << j.dump() << '\n';
}

std::vector<GoldenRecord> read_golden_records(std::istream& in, const std::string& source_name) {
    std::vector<GoldenRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            GoldenRecord r;
            r.id = j.at("id").get<std::string>();
            r.question = j.at("question").get<std::string>();
            r.answer = j.value("answer", std::string());
            r.golden_ids = j.at("golden_ids").get<std::vector<std::string>>();
            r.type = parse_question_type(j.at("type").get<std::string>());
            r.validate();
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<GoldenRecord> load_golden_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open questions file '" + path.string() + "'");
    return read_golden_records(in, path.string());
}

void save_golden_records(const std::vector<GoldenRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    for (const auto& r : records) write_golden_record(r, out);
}

double exact_match(std::span<const EmbeddingVector> retrieved, std::span<const EmbeddingVector> golden,
                   double threshold, std::size_t* matched) {
    if (golden.empty()) throw UsageError("exact_match: golden set is empty");
    std::size_t hits = 0;
    for (const auto& g : golden) {
        double best = -2.0;
        for (const auto& r : retrieved) best = std::max(best, cosine(g, r));
        if (best >= threshold) ++hits;
    }
    if (matched) *matched = hits;
    return static_cast<double>(hits) / static_cast<double>(golden.size());
}

double exact_match(const std::vector<std::string>& retrieved_texts, const std::vector<std::string>& golden_texts,
                   const EmbeddingProvider& provider, double threshold) {
    if (golden_texts.empty()) throw UsageError("exact_match: golden set is empty");
    auto golden = provider.embed_batch(golden_texts);
    std::vector<EmbeddingVector> retrieved;
    if (!retrieved_texts.empty()) retrieved = provider.embed_batch(retrieved_texts);
    return exact_match(retrieved, golden, threshold);
}

namespace {

double f1(double overlap, std::size_t cand, std::size_t ref) {
    if (overlap == 0.0) return 0.0;
    double p = overlap / static_cast<double>(cand);
    double r = overlap / static_cast<double>(ref);
    return 2 * p * r / (p + r);
}

}  // namespace

double rouge1_f(std::string_view candidate, std::string_view reference) {
    auto c = tokenize(candidate);
    auto r = tokenize(reference);
    if (c.empty() || r.empty()) return 0.0;
    std::unordered_map<std::string, std::size_t> ref_counts;
    for (const auto& t : r) ++ref_counts[t];
    std::size_t overlap = 0;
    for (const auto& t : c) {
        auto it = ref_counts.find(t);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return f1(static_cast<double>(overlap), c.size(), r.size());
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rougeL_f(std::string_view candidate, std::string_view reference) {
    auto c = tokenize(candidate);
    auto r = tokenize(reference);
    if (c.empty() || r.empty()) return 0.0;
    return f1(static_cast<double>(lcs_length(c, r)), c.size(), r.size());
}

void write_followup_sample(const FollowUpSample& s, std::ostream& out) {
    ojson j;
    j["question"] = s.question;
    j["given"] = s.given;
    j["target"] = s.target;
    out << j.dump() << '\n';
}

std::vector<FollowUpSample> read_followup_samples(std::istream& in, const std::string& source_name) {
    std::vector<FollowUpSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            FollowUpSample s{j.at("question").get<std::string>(), j.at("given").get<std::string>(),
                             j.at("target").get<std::string>()};
            if (trim(s.target).empty()) throw DataError("empty target");
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

Histogram histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw UsageError("histogram needs bins >= 1 and hi > lo");
    Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        if (v < lo || v > hi) continue;
        auto b = static_cast<std::size_t>((v - lo) / width);
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

BenchmarkReport summarize_benchmark(std::string agent, std::vector<BenchmarkRow> rows) {
    BenchmarkReport rep;
    rep.agent = std::move(agent);
    rep.rows = std::move(rows);
    double r1 = 0, rl = 0, cs = 0;
    for (const auto& row : rep.rows) {
        if (row.error) {
            ++rep.errors;
            continue;
        }
        if (row.gold_stop) {
            ++rep.stop_count;
            if (row.predicted_stop) ++rep.stop_correct;
        } else {
            ++rep.followup_count;
            r1 += row.rouge1;
            rl += row.rougeL;
            cs += row.cosine;
        }
    }
    if (rep.followup_count) {
        const auto n = static_cast<double>(rep.followup_count);
        rep.mean_rouge1 = r1 / n;
        rep.mean_rougeL = rl / n;
        rep.mean_cosine = cs / n;
    }
    if (rep.stop_count) rep.stop_accuracy = static_cast<double>(rep.stop_correct) / static_cast<double>(rep.stop_count);
    return rep;
}

BenchmarkReport benchmark_agent(const TraversalAgent& agent, const std::vector<FollowUpSample>& samples,
                                const EmbeddingProvider& provider) {
    std::vector<BenchmarkRow> rows;
    rows.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        BenchmarkRow row;
        row.index = i;
        row.gold_stop = s.is_stop();
        try {
            Passage given{"given", "", s.given};
            auto d = agent.decide(s.question, std::span<const Passage>(&given, 1));
            row.predicted_stop = d.is_stop();
            row.generated = d.is_stop() ? "NA" : d.question();
            if (!row.gold_stop && !row.predicted_stop) {
                row.rouge1 = rouge1_f(row.generated, s.target);
                row.rougeL = rougeL_f(row.generated, s.target);
                row.cosine = cosine(provider.embed(row.generated), provider.embed(s.target));
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return summarize_benchmark(agent.name(), std::move(rows));
}

void write_benchmark_rows(const BenchmarkReport& report, std::ostream& out) {
    for (const auto& row : report.rows) {
        ojson j;
        j["index"] = row.index;
        j["gold_stop"] = row.gold_stop;
        j["generated"] = row.generated;
        j["predicted_stop"] = row.predicted_stop;
        j["rouge1"] = row.rouge1;
        j["rougeL"] = row.rougeL;
        j["cosine"] = row.cosine;
        if (row.error) j["error"] = *row.error;
        out << j.dump() << '\n';
    }
}

void write_benchmark_summary(const BenchmarkReport& r, std::ostream& out) {
    ojson j;
    j["agent"] = r.agent;
    j["samples"] = r.rows.size();
    j["followup_count"] = r.followup_count;
    j["stop_count"] = r.stop_count;
    j["stop_correct"] = r.stop_correct;
    j["errors"] = r.errors;
    j["mean_rouge1"] = r.mean_rouge1;
    j["mean_rougeL"] = r.mean_rougeL;
    j["mean_cosine"] = r.mean_cosine;
    j["stop_accuracy"] = r.stop_accuracy;
    out << j.dump() << '\n';
}

namespace {

void write_histogram(std::ostream& out, const std::string& metric, const Histogram& h) {
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out << metric << '\t' << h.lo + width * static_cast<double>(b) << '\t'
            << h.lo + width * static_cast<double>(b + 1) << '\t' << h.counts[b] << '\n';
    }
}

}  // namespace

void write_benchmark_histograms(const BenchmarkReport& report, std::ostream& out, std::size_t bins) {
    std::vector<double> r1, rl, cs;
    for (const auto& row : report.rows) {
        if (row.error || row.gold_stop) continue;
        r1.push_back(row.rouge1);
        rl.push_back(row.rougeL);
        cs.push_back(row.cosine);
    }
    out << "metric\tbin_lo\tbin_hi\tcount\n";
    write_histogram(out, "rouge1", histogram(r1, bins));
    write_histogram(out, "rougeL", histogram(rl, bins));
    write_histogram(out, "cosine", histogram(cs, bins, -1.0, 1.0));
}

std::vector<AgentSummary> summarize_eval(const std::vector<EvalRow>& rows) {
    std::vector<AgentSummary> out;
    std::map<std::string, std::size_t> slot;
    struct Acc {
        double em = 0, iters = 0, nodes = 0, ms = 0;
        std::size_t judged = 0, correct = 0, ok = 0;
    };
    std::vector<Acc> acc;
    for (const auto& row : rows) {
        auto [it, fresh] = slot.try_emplace(row.agent, out.size());
        if (fresh) {
            out.emplace_back().agent = row.agent;
            acc.emplace_back();
        }
        auto& s = out[it->second];
        auto& a = acc[it->second];
        ++s.questions;
        if (row.error) {
            ++s.errors;
            continue;
        }
        ++a.ok;
        a.em += row.em;
        a.iters += static_cast<double>(row.iterations);
        a.nodes += static_cast<double>(row.nodes_visited);
        a.ms += static_cast<double>(row.wall_time.count()) / 1000.0;
        if (row.terminated_early) ++s.terminated_early;
        if (row.verdict) {
            ++a.judged;
            if (*row.verdict == Verdict::correct) ++a.correct;
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& a = acc[i];
        if (a.ok == 0) continue;
        const auto n = static_cast<double>(a.ok);
        out[i].mean_em = a.em / n;
        out[i].mean_iterations = a.iters / n;
        out[i].mean_nodes_visited = a.nodes / n;
        out[i].mean_runtime_ms = a.ms / n;
        if (a.judged) out[i].accuracy_pct = 100.0 * static_cast<double>(a.correct) / static_cast<double>(a.judged);
    }
    return out;
}

namespace {

// Runs fn(i) for i in [0, n) on `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
}

std::vector<std::size_t> golden_ordinals(const Corpus& corpus, const GoldenRecord& q) {
    std::vector<std::size_t> out;
    for (const auto& id : q.golden_ids) {
        auto ord = corpus.find(id);
        if (!ord) throw DataError("question '" + q.id + "' references golden id '" + id + "' missing from the corpus");
        out.push_back(*ord);
    }
    return out;
}

void score_em(const KnowledgeGraph& graph, const std::vector<std::size_t>& retrieved,
              const std::vector<std::size_t>& golden, double threshold, EvalRow& row) {
    std::vector<EmbeddingVector> r, g;
    for (auto o : retrieved) r.push_back(graph.embedding(o));
    for (auto o : golden) g.push_back(graph.embedding(o));
    row.golden = golden.size();
    row.em = exact_match(r, g, threshold, &row.matched);
}

void sort_rows(std::vector<EvalRow>& rows, std::size_t per_agent) {
    for (std::size_t start = 0; start < rows.size(); start += per_agent) {
        std::sort(rows.begin() + static_cast<std::ptrdiff_t>(start),
                  rows.begin() + static_cast<std::ptrdiff_t>(std::min(rows.size(), start + per_agent)),
                  [](const EvalRow& a, const EvalRow& b) { return a.question_id < b.question_id; });
    }
}

}  // namespace

EvalReport run_eval(const KnowledgeGraph& graph, const TfidfModel& tfidf, const std::vector<NamedAgent>& agents,
                    const EmbeddingProvider& ranker, const std::vector<GoldenRecord>& questions,
                    const EvalConfig& config) {
    config.traversal.validate();
    std::vector<std::vector<std::size_t>> golden;
    golden.reserve(questions.size());
    for (const auto& q : questions) golden.push_back(golden_ordinals(graph.corpus(), q));
    if (config.answering && config.answering->judge == JudgeMode::llm && !config.answering->judge_client) {
        throw UsageError("llm judging requested without a judge endpoint");
    }

    const std::size_t nq = questions.size();
    EvalReport report;
    report.rows.resize(agents.size() * nq);
    parallel_for(report.rows.size(), config.workers, [&](std::size_t slot) {
        const auto& named = agents[slot / nq];
        const auto& q = questions[slot % nq];
        EvalRow& row = report.rows[slot];
        row.agent = named.name;
        row.question_id = q.id;
        row.type = q.type;
        row.golden = q.golden_ids.size();
        try {
            auto result = traverse(graph, tfidf, *named.agent, ranker, q.question, config.traversal);
            row.iterations = result.iterations;
            row.nodes_visited = result.nodes_visited;
            row.terminated_early = result.terminated_early;
            row.budget_exhausted = result.budget_exhausted;
            row.wall_time = result.wall_time;
            row.retrieved = result.retrieved;
            score_em(graph, result.retrieved_ordinals, golden[slot % nq], config.threshold, row);
            if (config.answering) {
                const auto& ans = *config.answering;
                std::vector<Passage> passages;
                for (auto o : result.retrieved_ordinals) passages.push_back(graph.corpus()[o]);
                if (passages.empty()) throw DataError("nothing retrieved to answer from");
                row.answer = generate_answer(*ans.answer_client, ans.answer_role, q.question, passages, ans.prompts,
                                             ans.char_budget);
                if (ans.judge == JudgeMode::exact) row.verdict = judge_exact(*row.answer, q.answer);
                if (ans.judge == JudgeMode::llm) {
                    row.verdict = judge_llm(*ans.judge_client, ans.judge_role, q.question, *row.answer, q.answer,
                                            ans.prompts);
                }
            }
        } catch (const TraversalFailure& e) {
            row.error = e.what();
            row.iterations = e.partial().iterations;
            row.retrieved = e.partial().retrieved;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    sort_rows(report.rows, nq == 0 ? 1 : nq);
    report.summaries = summarize_eval(report.rows);
    return report;
}

EvalReport run_dense_eval(const KnowledgeGraph& graph, const EmbeddingProvider& ranker,
                          const std::vector<GoldenRecord>& questions, std::size_t k, double threshold,
                          std::size_t workers) {
    std::vector<std::vector<std::size_t>> golden;
    for (const auto& q : questions) golden.push_back(golden_ordinals(graph.corpus(), q));
    EvalReport report;
    report.rows.resize(questions.size());
    parallel_for(questions.size(), workers, [&](std::size_t i) {
        const auto& q = questions[i];
        EvalRow& row = report.rows[i];
        row.agent = "dense";
        row.question_id = q.id;
        row.type = q.type;
        row.golden = q.golden_ids.size();
        const auto started = std::chrono::steady_clock::now();
        try {
            std::vector<std::size_t> ords;
            for (const auto& hit : dense_retrieve_baseline(graph, ranker, q.question, k)) {
                ords.push_back(hit.ordinal);
                row.retrieved.push_back(hit.id);
            }
            row.nodes_visited = ords.size();
            score_em(graph, ords, golden[i], threshold, row);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_time =
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
    });
    sort_rows(report.rows, questions.empty() ? 1 : questions.size());
    report.summaries = summarize_eval(report.rows);
    return report;
}

void write_eval_rows(const EvalReport& report, std::ostream& out) {
    for (const auto& row : report.rows) {
        ojson j;
        j["agent"] = row.agent;
        j["question_id"] = row.question_id;
        j["type"] = to_string(row.type);
        j["em"] = row.em;
        j["matched"] = row.matched;
        j["golden"] = row.golden;
        j["iterations"] = row.iterations;
        j["nodes_visited"] = row.nodes_visited;
        j["terminated_early"] = row.terminated_early;
        j["budget_exhausted"] = row.budget_exhausted;
        j["retrieved"] = row.retrieved;
        if (row.answer) j["answer"] = *row.answer;
        if (row.verdict) j["verdict"] = to_string(*row.verdict);
        if (row.error) j["error"] = *row.error;
        j["wall_time_ms"] = static_cast<double>(row.wall_time.count()) / 1000.0;
        out << j.dump() << '\n';
    }
}

void write_eval_summary(const EvalReport& report, std::ostream& out) {
    for (const auto& s : report.summaries) {
        ojson j;
        j["agent"] = s.agent;
        j["questions"] = s.questions;
        j["errors"] = s.errors;
        j["mean_em"] = s.mean_em;
        j["accuracy_pct"] = s.accuracy_pct ? ojson(*s.accuracy_pct) : ojson(nullptr);
        j["mean_iterations"] = s.mean_iterations;
        j["mean_nodes_visited"] = s.mean_nodes_visited;
        j["terminated_early"] = s.terminated_early;
        j["mean_runtime_ms"] = s.mean_runtime_ms;
        out << j.dump() << '\n';
    }
}

void write_eval_histograms(const EvalReport& report, std::ostream& out, std::size_t bins) {
    out << "agent\tmetric\tbin_lo\tbin_hi\tcount\n";
    for (const auto& s : report.summaries) {
        std::vector<double> em;
        std::map<std::size_t, std::size_t> iters;
        for (const auto& row : report.rows) {
            if (row.agent != s.agent || row.error) continue;
            em.push_back(row.em);
            ++iters[row.iterations];
        }
        auto h = histogram(em, bins);
        const double width = 1.0 / static_cast<double>(bins);
        for (std::size_t b = 0; b < bins; ++b) {
            out << s.agent << "\tem\t" << width * static_cast<double>(b) << '\t' << width * static_cast<double>(b + 1)
                << '\t' << h.counts[b] << '\n';
        }
        for (auto [value, count] : iters) {
            out << s.agent << "\titerations\t" << value << '\t' << value + 1 << '\t' << count << '\n';
        }
    }
}

}  // namespace kgp
