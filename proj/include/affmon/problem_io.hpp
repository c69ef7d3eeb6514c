#pragma once

#include <string>

#include <json.hpp>

#include "affmon/expssp.hpp"
#include "affmon/model.hpp"

namespace affmon {

/// Parsed problem file. The payload matching the kind is populated and
/// already validated; chain kinds convert to a ModelSpec on demand.
struct ProblemFile {
    enum class Kind { Affine, Multiplicative, Exponential, ShortestPath };

    Kind kind = Kind::Affine;
    std::string name;
    std::string description;

    ModelSpec affine;            // Kind::Affine
    TerminatingChainSpec chain;  // Multiplicative / Exponential
    std::vector<Arc> arcs;       // ShortestPath
    int arcs_n = 0;

    ModelSpec to_model() const;
};

const char* kind_name(ProblemFile::Kind k);

/// Throws ParseError (malformed JSON or wrong shapes, with position info
/// where available) or ValidationError (well-formed payload violating a
/// model invariant; the message leads with the underlying invariant name).
ProblemFile parse_problem_text(const std::string& text);
ProblemFile parse_problem(const std::string& path);

nlohmann::json problem_to_json(const ProblemFile& pf);

/// JSON serialization with floating-point numbers printed to 17
/// significant digits, so emitted values reparse bit-identically.
/// Infinities must be converted to the string "inf" by the caller before
/// they reach a json number (see cost_to_json).
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// Extended-real to JSON: finite values stay numbers, +inf becomes "inf".
nlohmann::json cost_to_json(double v);
nlohmann::json cost_vector_to_json(const CostVector& j);

} // namespace affmon
