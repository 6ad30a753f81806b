#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgp {

struct Passage {
    std::string id;
    std::string title;
    std::string text;

    bool operator==(const Passage&) const = default;
};

/// Ordered, immutable passage collection. Ordinals are load positions.
class Corpus {
public:
    Corpus() = default;

    /// Validates ids (unique) and text (non-blank); throws DataError otherwise.
    explicit Corpus(std::vector<Passage> passages);

    std::size_t size() const noexcept { return passages_.size(); }
    bool empty() const noexcept { return passages_.empty(); }

    const Passage& operator[](std::size_t ordinal) const { return passages_[ordinal]; }
    const Passage& at(std::size_t ordinal) const;

    /// Throws NotFoundError for unknown ids.
    const Passage& get(const std::string& id) const;
    std::size_t ordinal_of(const std::string& id) const;
    std::optional<std::size_t> find(const std::string& id) const;
    bool contains(const std::string& id) const { return index_.count(id) != 0; }

    const std::vector<Passage>& passages() const noexcept { return passages_; }
    auto begin() const noexcept { return passages_.begin(); }
    auto end() const noexcept { return passages_.end(); }

    bool operator==(const Corpus& other) const { return passages_ == other.passages_; }

private:
    std::vector<Passage> passages_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class CorpusFormat { jsonl };

/// One JSON object per line: {"id": str, "title": str (optional), "text": str}.
/// Blank lines are skipped. Errors carry the 1-based line number.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::jsonl);
Corpus parse_corpus_jsonl(std::istream& in, const std::string& source_name = "<stream>");

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

}  // namespace kgp
