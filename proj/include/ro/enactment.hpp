#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ro/timestamp.hpp"
#include "ro/violation.hpp"
#include "ro/workflow.hpp"

namespace ro::wfprov {

using core::Timestamp;
using core::Violation;
using rdf::Graph;
using rdf::Iri;
using wfdesc::Workflow;

struct Artifact {
    Iri id;
    std::string value;
    std::string label;
};

struct ProcessRun {
    Iri id;
    Iri described_by;  // wfdesc process
    std::map<std::string, Iri> used;       // input name -> artifact
    std::map<std::string, Iri> generated;  // output name -> artifact
    Timestamp started;
    Timestamp ended;
};

struct Engine {
    Iri id;
    std::string name;
};

struct WorkflowRun {
    Iri id;
    Iri described_by;  // workflow
    Engine engine;
    std::vector<ProcessRun> process_runs;          // topological execution order
    std::map<std::string, Iri> inputs;             // binding name -> artifact
    std::map<std::string, Iri> outputs;            // workflow output name -> artifact
    std::map<Iri, Artifact> artifacts;

    const Artifact& artifact(const Iri& id) const;
};

struct EnactError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pure transformation: named input bytes to named output bytes.
using Step = std::function<std::map<std::string, std::string>(
    const std::map<std::string, std::string>&)>;

class StepRegistry {
public:
    void register_step(Iri process_id, Step step) { steps_[std::move(process_id)] = std::move(step); }
    const Step* find(const Iri& process_id) const {
        auto it = steps_.find(process_id);
        return it == steps_.end() ? nullptr : &it->second;
    }

private:
    std::map<Iri, Step> steps_;
};

/// Execute the workflow over the registry in topological order. Bindings
/// must cover every workflow-level input and every unbound process input.
/// Deterministic given equal bindings and registry.
std::pair<WorkflowRun, Graph> enact(const Workflow& wf,
                                    const std::map<std::string, std::string>& bindings,
                                    const StepRegistry& registry, const Engine& engine,
                                    const Iri& run_id, const Timestamp& started_at);

Graph emit_trace_graph(const WorkflowRun& run);

/// Upstream closure over generation/usage edges, the artifact included.
std::set<Iri> lineage(const WorkflowRun& run, const Iri& artifact);

std::vector<Violation> conformance(const WorkflowRun& run, const Workflow& wf);

}  // namespace ro::wfprov
