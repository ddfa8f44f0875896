/**
 * Deterministic tree-walking interpreter for the C++ subset.
 *
 * Integers are 64-bit two's complement with wrap-around; doubles print with
 * the default stream precision (6 significant digits). Every run is bounded
 * by a step limit, an output limit and a call-depth limit.
 */
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/ast.hpp"

namespace stylo {

enum class ExecStatus { Ok, RuntimeError, Timeout, ResourceLimit };
enum class RuntimeFault { None, DivZero, IndexOutOfBounds, InputExhausted, Unresolved };

std::string_view to_string(ExecStatus s);
std::string_view to_string(RuntimeFault f);

struct ExecLimits {
    uint64_t step_limit = 10'000'000;
    size_t output_limit = 1 << 20;
    int call_depth_limit = 1500;
};

struct ExecutionResult {
    ExecStatus status = ExecStatus::Ok;
    RuntimeFault fault = RuntimeFault::None;
    std::string stdout_text;
    uint64_t steps = 0;
    uint64_t output_statements = 0;  // executed cout/printf statements
    uint64_t input_statements = 0;   // executed cin/scanf statements
    uint64_t input_values = 0;       // values consumed from stdin
    std::string message;

    bool ok() const { return status == ExecStatus::Ok; }
    bool operator==(const ExecutionResult&) const = default;
};

ExecutionResult execute(const Ast& ast, std::string_view stdin_text, const ExecLimits& limits = {});

// Statement-level I/O recognition shared with transforms and the classifier.
bool is_output_statement(const Node& stmt);
bool is_input_statement(const Node& stmt);

// `std::cout << ...` chains: the operands after the stream, left to right.
bool stream_chain(const Node& expr, std::string_view stream, std::vector<const Node*>* items);

}  // namespace stylo
