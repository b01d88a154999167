#pragma once

#include <filesystem>

#include "nnhankel/pipeline.hpp"

namespace nnh {

struct Instance {
    HankelGenerator h;
    Eigenpair pair;
};

/*!
 * Instance files are JSON:
 *   { "n": 5, "hankel_generator": [...2n-1 reals...],
 *     "lambda": {"re": ..., "im": ...},
 *     "x": [{"re": ..., "im": ...}, ...] }
 * Complex values always carry both parts, even when purely real.
 * Result files mirror SolveResult with stage "A"/"B" and a kkt object of
 * the four residuals. Parse/shape problems raise ParseError.
 */
Instance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const Instance& inst);

SolveResult load_result(const std::filesystem::path& path);
void save_result(const std::filesystem::path& path, const SolveResult& result);

}  // namespace nnh
