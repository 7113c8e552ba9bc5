#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ro/rdf.hpp"
#include "ro/violation.hpp"

namespace ro::wfdesc {

using core::Violation;
using rdf::Graph;
using rdf::Iri;

enum class Direction { In, Out };

struct Parameter {
    Iri id;
    Iri owner;  // process or workflow
    Direction direction = Direction::In;
    std::string name;
};

struct Process {
    Iri id;
    std::string label;
    std::vector<Parameter> inputs;
    std::vector<Parameter> outputs;
    std::optional<std::string> impl_hint;
};

struct DataLink {
    Iri source;  // an Out parameter, or a workflow-level In
    Iri sink;    // an In parameter, or a workflow-level Out
};

/// A DAG of processes joined by data links. Workflow-level parameters feed
/// process parameters of the same name; data links route process outputs
/// to downstream inputs.
struct Workflow {
    Iri id;
    std::string label;
    std::vector<Parameter> inputs;
    std::vector<Parameter> outputs;
    std::vector<Process> processes;
    std::vector<DataLink> datalinks;

    const Process* find_process(const Iri& id) const;
    const Parameter* find_parameter(const Iri& id) const;
};

struct WorkflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Workflow parse_workflow(const Graph& g);
Graph serialize_workflow(const Workflow& wf);

std::vector<Violation> validate_workflow(const Workflow& wf);

/// Dependency-respecting order; ties broken by process id. Throws on cycles.
std::vector<Process> topological_order(const Workflow& wf);

/// Process In parameters with no incoming data link and no same-named
/// workflow-level input.
std::vector<Parameter> unbound_inputs(const Workflow& wf);

bool structurally_equal(const Workflow& a, const Workflow& b);

}  // namespace ro::wfdesc
