#include "augsearch/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "augsearch/errors.hpp"
#include "augsearch/tokenizer.hpp"
#include "json.hpp"

using nlohmann::json;

namespace augsearch::corpus {

std::string trim(const std::string& text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return text.substr(b, e - b);
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::istringstream in(text);
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

std::size_t word_count(const std::string& text) { return split_words(text).size(); }

namespace {

json parse_line(const std::string& line, long line_no) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what(),
                         line_no);
    }
}

template <typename T>
T get_field(const json& obj, const char* name, long line_no) {
    if (!obj.contains(name)) {
        throw ParseError(
            "line " + std::to_string(line_no) + ": missing field \"" + name + "\"", line_no);
    }
    try {
        return obj.at(name).get<T>();
    } catch (const json::exception&) {
        throw ParseError(
            "line " + std::to_string(line_no) + ": field \"" + name + "\" has wrong type",
            line_no);
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

std::vector<QueryCodePair> load_pairs(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<QueryCodePair> pairs;
    std::unordered_set<std::int64_t> seen;
    long line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj = parse_line(line, line_no);
        QueryCodePair p;
        p.id = get_field<std::int64_t>(obj, "id", line_no);
        p.query = get_field<std::string>(obj, "query", line_no);
        p.code = get_field<std::string>(obj, "code", line_no);
        if (p.id < 0) throw ValidationError("line " + std::to_string(line_no) + ": negative id");
        if (trim(p.query).empty())
            throw ValidationError("line " + std::to_string(line_no) + ": empty query");
        if (trim(p.code).empty())
            throw ValidationError("line " + std::to_string(line_no) + ": empty code");
        if (!seen.insert(p.id).second)
            throw ValidationError("duplicate pair id " + std::to_string(p.id));
        pairs.push_back(std::move(p));
    }
    if (pairs.empty()) throw ValidationError("empty pairs file: " + path);
    return pairs;
}

std::vector<CodebaseEntry> load_codebase(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<CodebaseEntry> entries;
    std::unordered_set<std::int64_t> seen;
    long line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj = parse_line(line, line_no);
        CodebaseEntry e;
        e.code_id = get_field<std::int64_t>(obj, "code_id", line_no);
        e.code = get_field<std::string>(obj, "code", line_no);
        if (trim(e.code).empty())
            throw ValidationError("line " + std::to_string(line_no) + ": empty code");
        if (!seen.insert(e.code_id).second)
            throw ValidationError("duplicate code_id " + std::to_string(e.code_id));
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw ValidationError("empty codebase file: " + path);
    return entries;
}

Dataset load_dataset(const std::string& pairs_path, const std::string& codebase_path) {
    Dataset d;
    d.pairs = load_pairs(pairs_path);
    d.codebase = load_codebase(codebase_path);
    d.validate();
    return d;
}

void Dataset::validate() const {
    std::unordered_set<std::int64_t> pair_ids;
    for (const auto& p : pairs) {
        if (trim(p.query).empty())
            throw ValidationError("pair " + std::to_string(p.id) + ": empty query");
        if (trim(p.code).empty())
            throw ValidationError("pair " + std::to_string(p.id) + ": empty code");
        if (!pair_ids.insert(p.id).second)
            throw ValidationError("duplicate pair id " + std::to_string(p.id));
    }
    std::unordered_set<std::int64_t> code_ids;
    std::unordered_set<std::string> code_texts;
    for (const auto& e : codebase) {
        if (!code_ids.insert(e.code_id).second)
            throw ValidationError("duplicate code_id " + std::to_string(e.code_id));
        code_texts.insert(e.code);
    }
    for (const auto& p : pairs) {
        if (!code_texts.count(p.code))
            throw ValidationError("pair " + std::to_string(p.id) +
                                  ": code not present in codebase");
    }
}

std::int64_t Dataset::resolve_code_id(const QueryCodePair& pair) const {
    for (const auto& e : codebase) {
        if (e.code == pair.code) return e.code_id;
    }
    throw ValidationError("pair " + std::to_string(pair.id) + ": code not in codebase");
}

void save_pairs(const std::vector<QueryCodePair>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& p : pairs) {
        json obj{{"id", p.id}, {"query", p.query}, {"code", p.code}};
        out << obj.dump() << "\n";
    }
    if (!out) throw IoError("write failure on " + path);
}

void save_codebase(const std::vector<CodebaseEntry>& codebase, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& e : codebase) {
        json obj{{"code_id", e.code_id}, {"code", e.code}};
        out << obj.dump() << "\n";
    }
    if (!out) throw IoError("write failure on " + path);
}

DatasetStats dataset_stats(const Dataset& dataset, std::size_t token_ceiling) {
    if (dataset.pairs.empty()) throw ValidationError("dataset_stats: empty dataset");
    DatasetStats s;
    s.pair_count = dataset.pairs.size();
    neural::TokenizerConfig tok;
    double word_sum = 0, qtok_sum = 0, ctok_sum = 0;
    for (const auto& p : dataset.pairs) {
        std::size_t words = word_count(p.query);
        std::size_t qtoks = neural::split_subtokens(tok, p.query).size();
        std::size_t ctoks = neural::split_subtokens(tok, p.code).size();
        word_sum += static_cast<double>(words);
        qtok_sum += static_cast<double>(qtoks);
        ctok_sum += static_cast<double>(ctoks);
        s.max_query_words = std::max(s.max_query_words, words);
        s.max_query_tokens = std::max(s.max_query_tokens, qtoks);
        s.max_code_tokens = std::max(s.max_code_tokens, ctoks);
        if (qtoks > token_ceiling || ctoks > token_ceiling) s.over_ceiling_ids.push_back(p.id);
    }
    s.mean_query_words = word_sum / static_cast<double>(s.pair_count);
    s.mean_query_tokens = qtok_sum / static_cast<double>(s.pair_count);
    s.mean_code_tokens = ctok_sum / static_cast<double>(s.pair_count);
    return s;
}

namespace {
const char* kind_name(AugKind k) { return k == AugKind::Query ? "query" : "code"; }
}  // namespace

void save_augmentation_map(const AugmentationMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [origin_id, variants] : map.entries) {
        for (const auto& v : variants) {
            json obj{{"origin_id", origin_id}, {"kind", kind_name(map.kind)}, {"text", v.text}};
            if (v.score) obj["score"] = *v.score;
            out << obj.dump() << "\n";
        }
    }
    if (!out) throw IoError("write failure on " + path);
}

AugmentationMap load_augmentation_map(const std::string& path) {
    auto lines = read_lines(path);
    AugmentationMap map;
    bool kind_set = false;
    long line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj = parse_line(line, line_no);
        auto origin = get_field<std::int64_t>(obj, "origin_id", line_no);
        auto kind_str = get_field<std::string>(obj, "kind", line_no);
        AugKind kind;
        if (kind_str == "query")
            kind = AugKind::Query;
        else if (kind_str == "code")
            kind = AugKind::Code;
        else
            throw ValidationError("line " + std::to_string(line_no) + ": unknown kind \"" +
                                  kind_str + "\"");
        if (!kind_set) {
            map.kind = kind;
            kind_set = true;
        } else if (kind != map.kind) {
            throw ValidationError("line " + std::to_string(line_no) + ": mixed kinds in one map");
        }
        AugVariant v;
        v.text = get_field<std::string>(obj, "text", line_no);
        if (trim(v.text).empty())
            throw ValidationError("line " + std::to_string(line_no) + ": empty variant text");
        if (obj.contains("score") && !obj.at("score").is_null())
            v.score = obj.at("score").get<double>();
        map.entries[origin].push_back(std::move(v));
    }
    return map;
}

void validate_map_against(const AugmentationMap& map, const Dataset& dataset) {
    std::unordered_set<std::int64_t> ids;
    for (const auto& p : dataset.pairs) ids.insert(p.id);
    for (const auto& [origin_id, variants] : map.entries) {
        if (!ids.count(origin_id))
            throw ValidationError("augmentation record references unknown origin_id " +
                                  std::to_string(origin_id));
        for (const auto& v : variants) {
            if (trim(v.text).empty())
                throw ValidationError("empty variant text for origin_id " +
                                      std::to_string(origin_id));
        }
    }
}

}  // namespace augsearch::corpus
