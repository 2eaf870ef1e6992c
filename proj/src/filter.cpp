#include "augsearch/filter.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "augsearch/errors.hpp"
#include "json.hpp"

using nlohmann::json;

namespace augsearch::filter {

void FilterConfig::validate() const {
    if (theta_q < 0 || theta_q > 1 || theta_c < 0 || theta_c > 1)
        throw ValidationError("filter config: thresholds must be in [0, 1]");
}

std::size_t pairing_draw(std::uint64_t seed, std::int64_t origin_id, std::uint64_t ordinal,
                         std::size_t code_list_size) {
    std::uint64_t mixed = seed ^ (static_cast<std::uint64_t>(origin_id) * 0x9E3779B97F4A7C15ull)
                          ^ (ordinal * 0xBF58476D1CE4E5B9ull);
    std::mt19937_64 rng(mixed);
    return static_cast<std::size_t>(rng() % code_list_size);
}

FilterOutput filter_augmented(const corpus::Dataset& dataset,
                              const corpus::AugmentationMap& dict_q,
                              const corpus::AugmentationMap& dict_c,
                              const neural::CrossEncoderParams& model,
                              const FilterConfig& config) {
    config.validate();
    dataset.validate();
    corpus::validate_map_against(dict_q, dataset);
    corpus::validate_map_against(dict_c, dataset);
    if (dict_q.kind != corpus::AugKind::Query || dict_c.kind != corpus::AugKind::Code)
        throw ValidationError("filter_augmented: map kinds are swapped");

    FilterOutput out;
    out.d_aug.pairs = {};
    out.d_aug.codebase = {};
    for (const auto& p : dataset.pairs) out.d_aug.pairs.push_back(p);
    for (const auto& e : dataset.codebase) out.d_aug.codebase.push_back(e);

    std::int64_t next_pair_id = 0;
    for (const auto& p : dataset.pairs) next_pair_id = std::max(next_pair_id, p.id + 1);
    std::int64_t next_code_id = 0;
    for (const auto& e : dataset.codebase) next_code_id = std::max(next_code_id, e.code_id + 1);
    std::unordered_map<std::string, std::int64_t> code_text_ids;
    for (const auto& e : dataset.codebase) code_text_ids.emplace(e.code, e.code_id);

    auto add_code_if_missing = [&](const std::string& text) {
        if (code_text_ids.count(text)) return;
        out.d_aug.codebase.push_back({next_code_id, text});
        code_text_ids.emplace(text, next_code_id);
        ++next_code_id;
    };

    const auto& tok = model.tokenizer;
    for (const auto& pair : dataset.pairs) {
        auto query_ids = neural::tokenize(tok, pair.query);
        auto code_ids = neural::tokenize(tok, pair.code);
        OriginReport report;

        std::vector<std::string> code_list{pair.code};
        if (auto it = dict_c.entries.find(pair.id); it != dict_c.entries.end()) {
            for (const auto& variant : it->second) {
                double score = neural::score_cross(model, query_ids,
                                                   neural::tokenize(tok, variant.text));
                bool kept = score >= config.theta_c;
                report.codes.push_back({variant.text, score, kept});
                if (kept) {
                    out.d_aug.pairs.push_back({next_pair_id++, pair.query, variant.text});
                    add_code_if_missing(variant.text);
                    code_list.push_back(variant.text);
                    ++out.report.codes_kept;
                } else {
                    ++out.report.codes_dropped;
                }
            }
        }

        std::uint64_t draw_ordinal = 0;
        if (auto it = dict_q.entries.find(pair.id); it != dict_q.entries.end()) {
            for (const auto& variant : it->second) {
                double score = neural::score_cross(model, neural::tokenize(tok, variant.text),
                                                   code_ids);
                bool kept = score >= config.theta_q;
                report.queries.push_back({variant.text, score, kept});
                if (kept) {
                    std::size_t idx = pairing_draw(config.seed, pair.id, draw_ordinal++,
                                                   code_list.size());
                    const std::string& sampled = code_list[idx];
                    out.d_aug.pairs.push_back({next_pair_id++, variant.text, sampled});
                    report.sampled_codes.push_back(sampled);
                    ++out.report.queries_kept;
                } else {
                    ++out.report.queries_dropped;
                }
            }
        }
        out.report.origins.emplace(pair.id, std::move(report));
    }
    return out;
}

void FilterReport::save(const std::string& path) const {
    json per_origin = json::object();
    for (const auto& [origin, report] : origins) {
        json codes = json::array(), queries = json::array();
        for (const auto& v : report.codes)
            codes.push_back({{"text", v.text}, {"score", v.score}, {"kept", v.kept}});
        for (const auto& v : report.queries)
            queries.push_back({{"text", v.text}, {"score", v.score}, {"kept", v.kept}});
        per_origin[std::to_string(origin)] = {{"codes", codes},
                                              {"queries", queries},
                                              {"sampled_codes", report.sampled_codes}};
    }
    json doc = {{"codes_kept", codes_kept},
                {"codes_dropped", codes_dropped},
                {"queries_kept", queries_kept},
                {"queries_dropped", queries_dropped},
                {"origins", per_origin}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failure on " + path);
}

corpus::Dataset subsample_augmentations(const corpus::Dataset& d_aug,
                                        const corpus::Dataset& original, double n_aug,
                                        std::uint64_t seed) {
    if (n_aug < 0) throw ValidationError("subsample_augmentations: negative target");
    std::unordered_set<std::int64_t> original_ids;
    for (const auto& p : original.pairs) original_ids.insert(p.id);

    std::vector<std::size_t> augmented_indices;
    for (std::size_t i = 0; i < d_aug.pairs.size(); ++i)
        if (!original_ids.count(d_aug.pairs[i].id)) augmented_indices.push_back(i);

    auto target = static_cast<std::size_t>(
        std::llround(n_aug * static_cast<double>(original.pairs.size())));
    target = std::min(target, augmented_indices.size());

    std::mt19937_64 rng(seed);
    std::shuffle(augmented_indices.begin(), augmented_indices.end(), rng);
    augmented_indices.resize(target);
    std::sort(augmented_indices.begin(), augmented_indices.end());

    corpus::Dataset result;
    std::unordered_set<std::size_t> keep(augmented_indices.begin(), augmented_indices.end());
    for (std::size_t i = 0; i < d_aug.pairs.size(); ++i) {
        const auto& p = d_aug.pairs[i];
        if (original_ids.count(p.id) || keep.count(i)) result.pairs.push_back(p);
    }
    // original codebase plus whatever retained pairs still reference
    std::unordered_set<std::string> needed;
    for (const auto& p : result.pairs) needed.insert(p.code);
    std::unordered_set<std::int64_t> original_code_ids;
    for (const auto& e : original.codebase) original_code_ids.insert(e.code_id);
    for (const auto& e : d_aug.codebase)
        if (original_code_ids.count(e.code_id) || needed.count(e.code))
            result.codebase.push_back(e);
    return result;
}

}  // namespace augsearch::filter
