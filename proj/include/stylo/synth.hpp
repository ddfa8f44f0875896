// Generated programs and synthetic authored corpora.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/transforms.hpp"

namespace stylo {

struct GeneratedProgram {
    std::string source;
    std::vector<TestCase> tests;  // expected output taken from the interpreter
};

// A random terminating in-subset program exercising loops, branches,
// declarations, updates and both output APIs.
GeneratedProgram generate_program(uint64_t seed, int n_tests = 3);
std::vector<GeneratedProgram> generate_programs(size_t count, uint64_t seed, int n_tests = 3);

// The knobs an author's style is made of.
struct StyleSignature {
    NamingScheme naming = NamingScheme::Camel;
    uint64_t lexicon_seed = 0;
    bool use_printf = false;
    bool use_while = false;
    std::string long_alias;  // typedef name for long long; empty for none
    bool braces = true;
    std::string update_form = "compound";  // assign, compound, post, pre
    bool merge_declarations = false;
    bool declare_late = false;
    bool swap_branches = false;
    std::string indent = "    ";
    std::vector<std::string> template_lines;  // personal global declarations
};

// n signatures that pairwise differ in at least two token-visible knobs
// whenever the knob space allows it.
std::vector<StyleSignature> style_signatures(int n, uint64_t seed);

// Rewrites `source` into the given style; semantics are preserved.
std::string apply_style(const std::string& source, const StyleSignature& style);

// The canonical challenge programs with their tests.
const std::vector<GeneratedProgram>& challenge_programs();

// authors x challenges units; author labels "a01".., challenge ids "c1"...
Corpus generate_authored_corpus(int authors, int challenges, uint64_t seed);

}  // namespace stylo
