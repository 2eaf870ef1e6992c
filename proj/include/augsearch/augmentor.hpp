#pragma once
#include <string>
#include <vector>

#include "augsearch/client.hpp"
#include "augsearch/corpus.hpp"
#include "augsearch/prompting.hpp"

namespace augsearch::augmentor {

// Numbered / dashed / plain line lists after an optional "Rewritten Queries"
// marker. Throws ExtractionError when nothing is extractable.
std::vector<std::string> parse_query_response(const std::string& text);

// Fenced blocks per the code response template; interiors are byte-exact.
std::vector<std::string> parse_code_response(const std::string& text);

struct AugmentOptions {
    prompting::AugmentationBudget budget;
    bool enforce_length = true;  // post-hoc Eq-style length check on query rewrites
    std::string dict_q_path;     // written incrementally; existing origins are skipped
    std::string dict_c_path;
    std::string failure_manifest_path;
};

struct AugmentResult {
    corpus::AugmentationMap dict_q;
    corpus::AugmentationMap dict_c;
    std::size_t failed_origins = 0;
    std::size_t requests_made = 0;
};

// One query request per pair plus one code request per technique; parse
// failures are recorded in the manifest and never abort the run.
AugmentResult augment_dataset(const corpus::Dataset& dataset, RewriteClient& client,
                              const AugmentOptions& options);

}  // namespace augsearch::augmentor
