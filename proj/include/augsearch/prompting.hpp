#pragma once
#include <array>
#include <string>

namespace augsearch::prompting {

// Five-part request schema: Instruction, Emphasis/Caution, Prior Knowledge,
// Task Input, Output Context. Empty optional parts are skipped when
// rendering; the remaining parts are joined by blank lines in schema order.
struct PromptSchema {
    std::string instruction;
    std::string emphasis_caution;
    std::string prior_knowledge;  // optional
    std::string task_input;
    std::string output_context;

    std::string render() const;
};

enum class RewriteTechnique {
    RenameMethod,
    MeaningfulVariables,
    DifferentLibrary,
    SameSemantics,
    Simplify,
};

constexpr std::array<RewriteTechnique, 5> kAllTechniques = {
    RewriteTechnique::RenameMethod,   RewriteTechnique::MeaningfulVariables,
    RewriteTechnique::DifferentLibrary, RewriteTechnique::SameSemantics,
    RewriteTechnique::Simplify,
};

const std::string& technique_text(RewriteTechnique technique);

struct AugmentationBudget {
    int n_query = 15;
    int n_code_per_technique = 3;
    double alpha = 1.6;

    void validate() const;  // n >= 1, alpha > 1
};

struct LengthBounds {
    int min = 0;
    int max = 0;
};

// min = word count of the query, max = floor(alpha * min), clamped to >= min.
LengthBounds length_bounds(const std::string& query, double alpha);

std::string build_query_prompt(const std::string& query, const AugmentationBudget& budget);
std::string build_code_prompt(const std::string& code, RewriteTechnique technique,
                              const AugmentationBudget& budget);

// Post-hoc check of the prompt's length bound; both endpoints inclusive.
bool enforce_query_length(const std::string& original, const std::string& candidate,
                          double alpha);

}  // namespace augsearch::prompting
