#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "augsearch/pycode.hpp"

namespace augsearch::baselines {

enum class CodeTransform {
    LoopTransform,    // one for-range loop -> while with explicit counter
    DeadCodeInject,   // statically unreachable `if False:` block
    OperandSwap,      // one commutative / flippable operator
    BlockSwap,        // negate one if/else condition and swap its bodies
    VariableRename,   // alpha-rename one local variable to a fresh name
};

constexpr CodeTransform kAllCodeTransforms[] = {
    CodeTransform::LoopTransform, CodeTransform::DeadCodeInject, CodeTransform::OperandSwap,
    CodeTransform::BlockSwap, CodeTransform::VariableRename,
};

// Applies one transform at a seeded random applicable site. Throws
// InapplicableError when the tree has no site for it.
std::string natgen_rewrite(const py::Module& tree, CodeTransform transform,
                           std::uint64_t seed);

// Rename a specific variable everywhere it occurs as a local name.
py::Module rename_variable(const py::Module& tree, const std::string& from,
                           const std::string& to);

// Up to n_per_transform variants per transform (5 transforms); inapplicable
// ones fall back to a uniformly chosen applicable transform.
std::vector<std::string> natgen_augment(const std::string& code, int n_per_transform,
                                        std::uint64_t seed);

}  // namespace augsearch::baselines
