#include "kgp/corpus.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgp/error.hpp"
#include "kgp/text.hpp"

namespace kgp {

using nlohmann::json;

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
    index_.reserve(passages_.size());
    for (std::size_t i = 0; i < passages_.size(); ++i) {
        const auto& p = passages_[i];
        if (p.id.empty()) throw DataError("passage " + std::to_string(i) + ": empty id");
        if (trim(p.text).empty()) throw DataError("passage '" + p.id + "': empty text");
        if (!index_.emplace(p.id, i).second) throw DataError("duplicate passage id '" + p.id + "'");
    }
}

const Passage& Corpus::at(std::size_t ordinal) const {
    if (ordinal >= passages_.size()) {
        throw NotFoundError("passage ordinal " + std::to_string(ordinal) + " out of range (size " +
                            std::to_string(passages_.size()) + ")");
    }
    return passages_[ordinal];
}

const Passage& Corpus::get(const std::string& id) const { return passages_[ordinal_of(id)]; }

std::size_t Corpus::ordinal_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw NotFoundError("unknown passage id '" + id + "'");
    return it->second;
}

std::optional<std::size_t> Corpus::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Corpus parse_corpus_jsonl(std::istream& in, const std::string& source_name) {
    std::vector<Passage> passages;
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw DataError(source_name + ":" + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(std::string("malformed JSON: ") + e.what());
        }
        if (!rec.is_object()) fail("record is not an object");
        if (!rec.contains("id") || !rec["id"].is_string()) fail("missing string field 'id'");
        if (!rec.contains("text") || !rec["text"].is_string()) fail("missing string field 'text'");
        Passage p;
        p.id = rec["id"].get<std::string>();
        p.text = rec["text"].get<std::string>();
        if (rec.contains("title") && !rec["title"].is_null()) {
            if (!rec["title"].is_string()) fail("field 'title' is not a string");
            p.title = rec["title"].get<std::string>();
        }
        if (p.id.empty()) fail("empty id");
        if (trim(p.text).empty()) fail("empty text for id '" + p.id + "'");
        auto [it, inserted] = first_line.emplace(p.id, line_no);
        if (!inserted) {
            fail("duplicate id '" + p.id + "' (first seen on line " + std::to_string(it->second) + ")");
        }
        passages.push_back(std::move(p));
    }
    return Corpus(std::move(passages));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    if (format != CorpusFormat::jsonl) throw UsageError("unsupported corpus format");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read corpus file '" + path.string() + "'");
    return parse_corpus_jsonl(in, path.string());
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const auto& p : corpus) {
        nlohmann::ordered_json rec = {{"id", p.id}, {"title", p.title}, {"text", p.text}};
        out << rec.dump() << '\n';
    }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write corpus file '" + path.string() + "'");
    write_corpus_jsonl(corpus, out);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace kgp
