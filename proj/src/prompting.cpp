#include "augsearch/prompting.hpp"

#include <cmath>

#include "augsearch/corpus.hpp"
#include "augsearch/errors.hpp"

namespace augsearch::prompting {

std::string PromptSchema::render() const {
    if (instruction.empty() || task_input.empty() || output_context.empty())
        throw ValidationError("prompt schema: instruction, task input and output context "
                              "must be non-empty");
    std::string out;
    for (const std::string* part :
         {&instruction, &emphasis_caution, &prior_knowledge, &task_input, &output_context}) {
        if (part->empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += *part;
    }
    return out;
}

const std::string& technique_text(RewriteTechnique technique) {
    static const std::string texts[] = {
        "Rename the method without changing the function names it calls internally.",
        "Rewrite the code with more meaningful variable names.",
        "Use different library functions for the code snippet.",
        "Rewrite the code with the same semantics.",
        "Simplify the code by removing unnecessary statements or tokens.",
    };
    return texts[static_cast<int>(technique)];
}

void AugmentationBudget::validate() const {
    if (n_query < 1) throw ValidationError("budget: n_query must be >= 1");
    if (n_code_per_technique < 1)
        throw ValidationError("budget: n_code_per_technique must be >= 1");
    if (!(alpha > 1.0)) throw ValidationError("budget: alpha must be > 1");
}

LengthBounds length_bounds(const std::string& query, double alpha) {
    if (!(alpha > 1.0)) throw ValidationError("length_bounds: alpha must be > 1");
    int n = static_cast<int>(corpus::word_count(query));
    if (n == 0) throw ValidationError("length_bounds: empty query");
    int upper = static_cast<int>(std::floor(alpha * n));
    if (upper < n) upper = n;
    return {n, upper};
}

std::string build_query_prompt(const std::string& query, const AugmentationBudget& budget) {
    budget.validate();
    if (corpus::trim(query).empty()) throw ValidationError("build_query_prompt: empty query");
    auto bounds = length_bounds(query, budget.alpha);

    PromptSchema schema;
    schema.instruction =
        "Given a query, your task is to reformulate the query while ensuring that its "
        "semantics remain unchanged.";
    schema.emphasis_caution =
        "You must generate (" + std::to_string(budget.n_query) + ") queries. Note that in "
        "real-life scenarios, users' queries are often brief. For example, the average length "
        "of queries in CoSQA dataset is 6.6. So you must aim to generate concise queries in "
        "this task.\n"
        "You must limit the length of each rewritten query to between (" +
        std::to_string(bounds.min) + ") and (" + std::to_string(bounds.max) + ") words.";
    schema.task_input = "Original Query: " + query;
    schema.output_context = "Rewritten Queries:";
    return schema.render();
}

std::string build_code_prompt(const std::string& code, RewriteTechnique technique,
                              const AugmentationBudget& budget) {
    budget.validate();
    if (corpus::trim(code).empty()) throw ValidationError("build_code_prompt: empty code");
    if (code.find("```") != std::string::npos)
        throw ValidationError("build_code_prompt: code contains a ``` fence and cannot be "
                              "templated");

    PromptSchema schema;
    schema.instruction =
        "Given a method-level code snippet, your job is to rewrite the code snippet based on "
        "a given rewriting technique, while ensuring that the generated code performs the "
        "same functionality as the original code.";
    schema.emphasis_caution =
        "You must generate (" + std::to_string(budget.n_code_per_technique) + ") codes. And "
        "use ``` to wrap each code based on this template : Code (number such as "
        "1)\\n```python\\n<returned code>\\n```. If current rewriting technique is not "
        "suitable for the original code, you can rewrite it using different technique, while "
        "ensuring the generated code has the same functionality as the original code.";
    schema.prior_knowledge = "Rewriting Technique: " + technique_text(technique);
    schema.task_input = "Original Code: " + code;
    schema.output_context = "Rewritten Code:";
    return schema.render();
}

bool enforce_query_length(const std::string& original, const std::string& candidate,
                          double alpha) {
    if (corpus::trim(original).empty() || corpus::trim(candidate).empty())
        throw ValidationError("enforce_query_length: empty text");
    auto bounds = length_bounds(original, alpha);
    int n = static_cast<int>(corpus::word_count(candidate));
    return n >= bounds.min && n <= bounds.max;
}

}  // namespace augsearch::prompting
