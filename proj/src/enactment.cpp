#include "ro/enactment.hpp"

#include <algorithm>

#include "ro/vocab.hpp"

namespace ro::wfprov {

using rdf::Literal;
using rdf::Subject;
using rdf::Term;
using wfdesc::DataLink;
using wfdesc::Direction;
using wfdesc::Parameter;
using wfdesc::Process;
namespace vocab = ro::vocab;

const Artifact& WorkflowRun::artifact(const Iri& id) const {
    auto it = artifacts.find(id);
    if (it == artifacts.end()) throw EnactError("unknown artifact: " + id.value);
    return it->second;
}

std::pair<WorkflowRun, Graph> enact(const Workflow& wf,
                                    const std::map<std::string, std::string>& bindings,
                                    const StepRegistry& registry, const Engine& engine,
                                    const Iri& run_id, const Timestamp& started_at) {
    if (!wfdesc::validate_workflow(wf).empty())
        throw EnactError("workflow fails validation: " + wf.id.value);

    std::vector<std::string> required;
    for (const auto& p : wf.inputs) required.push_back(p.name);
    for (const auto& p : wfdesc::unbound_inputs(wf)) required.push_back(p.name);
    for (const auto& name : required) {
        if (!bindings.count(name)) throw EnactError("missing binding for parameter " + name);
    }
    for (const auto& proc : wf.processes) {
        if (!registry.find(proc.id)) throw EnactError("no registered step for process " + proc.id.value);
    }

    WorkflowRun run;
    run.id = run_id;
    run.described_by = wf.id;
    run.engine = engine;

    auto mint = [&run](Iri id, std::string value, std::string label) {
        run.artifacts[id] = Artifact{id, std::move(value), std::move(label)};
        return id;
    };

    // One artifact per bound name, shared by every consumer.
    std::map<std::string, Iri> bound;
    for (const auto& name : required) {
        if (bound.count(name)) continue;
        bound[name] = mint(Iri{run_id.value + "/data/" + name}, bindings.at(name), name);
        run.inputs[name] = bound[name];
    }

    // sink parameter id -> source parameter id
    std::map<Iri, Iri> link_into;
    for (const auto& link : wf.datalinks) link_into[link.sink] = link.source;

    // out-param id -> artifact, filled as processes run
    std::map<Iri, Iri> produced;

    for (const auto& proc : wfdesc::topological_order(wf)) {
        ProcessRun pr;
        pr.id = Iri{run_id.value + "/" + proc.label};
        pr.described_by = proc.id;
        pr.started = started_at;
        pr.ended = started_at;

        std::map<std::string, std::string> step_in;
        for (const auto& param : proc.inputs) {
            Iri art;
            auto linked = link_into.find(param.id);
            if (linked != link_into.end()) {
                auto made = produced.find(linked->second);
                if (made != produced.end()) {
                    art = made->second;
                } else {
                    // Link from a workflow-level input.
                    const Parameter* src = wf.find_parameter(linked->second);
                    if (!src || !bound.count(src->name))
                        throw EnactError("no value for data link into " + param.id.value);
                    art = bound.at(src->name);
                }
            } else if (bound.count(param.name)) {
                art = bound.at(param.name);
            } else {
                throw EnactError("missing binding for parameter " + param.name);
            }
            pr.used[param.name] = art;
            step_in[param.name] = run.artifact(art).value;
        }

        std::map<std::string, std::string> step_out;
        try {
            step_out = (*registry.find(proc.id))(step_in);
        } catch (const std::exception& e) {
            throw EnactError("step failed for process " + proc.id.value + ": " + e.what());
        }
        for (const auto& param : proc.outputs) {
            auto it = step_out.find(param.name);
            if (it == step_out.end())
                throw EnactError("step for " + proc.id.value + " produced no output " + param.name);
            Iri art = mint(Iri{run_id.value + "/data/" + proc.label + "/out/" + param.name},
                           it->second, param.name);
            pr.generated[param.name] = art;
            produced[param.id] = art;
        }
        run.process_runs.push_back(std::move(pr));
    }

    for (const auto& out_param : wf.outputs) {
        auto linked = link_into.find(out_param.id);
        if (linked != link_into.end() && produced.count(linked->second)) {
            run.outputs[out_param.name] = produced.at(linked->second);
            continue;
        }
        // Fall back to the same-name process output.
        for (const auto& pr : run.process_runs) {
            auto it = pr.generated.find(out_param.name);
            if (it != pr.generated.end()) run.outputs[out_param.name] = it->second;
        }
    }

    return {run, emit_trace_graph(run)};
}

Graph emit_trace_graph(const WorkflowRun& run) {
    Graph g;
    g.set_prefix("wfprov", Iri{vocab::WFPROV_NS});
    g.set_prefix("prov", Iri{vocab::PROV_NS});

    g.insert(run.id, vocab::rdf_type, vocab::wfprov_workflow_run);
    g.insert(run.id, vocab::rdf_type, vocab::prov_activity);
    g.insert(run.id, vocab::wfprov_described_by_workflow, run.described_by);
    g.insert(run.id, vocab::wfprov_was_enacted_by, run.engine.id);
    g.insert(run.engine.id, vocab::rdf_type, vocab::wfprov_workflow_engine);
    g.insert(run.engine.id, vocab::rdf_type, vocab::prov_software_agent);

    for (const auto& [id, art] : run.artifacts) {
        g.insert(id, vocab::rdf_type, vocab::wfprov_artifact);
        g.insert(id, vocab::rdf_type, vocab::prov_entity);
    }
    for (const auto& pr : run.process_runs) {
        g.insert(pr.id, vocab::rdf_type, vocab::wfprov_process_run);
        g.insert(pr.id, vocab::rdf_type, vocab::prov_activity);
        g.insert(pr.id, vocab::wfprov_was_part_of_workflow_run, run.id);
        g.insert(pr.id, vocab::wfprov_described_by_process, pr.described_by);
        for (const auto& [name, art] : pr.used) {
            g.insert(pr.id, vocab::wfprov_used_input, art);
            g.insert(pr.id, vocab::prov_used, art);
        }
        for (const auto& [name, art] : pr.generated) {
            g.insert(art, vocab::wfprov_was_output_from, pr.id);
            g.insert(art, vocab::prov_was_generated_by, pr.id);
        }
    }
    return g;
}

std::set<Iri> lineage(const WorkflowRun& run, const Iri& artifact) {
    if (!run.artifacts.count(artifact)) throw EnactError("unknown artifact: " + artifact.value);

    std::map<Iri, const ProcessRun*> generator;
    for (const auto& pr : run.process_runs)
        for (const auto& [name, art] : pr.generated) generator[art] = &pr;

    std::set<Iri> closure;
    std::vector<Iri> queue{artifact};
    while (!queue.empty()) {
        Iri cur = queue.back();
        queue.pop_back();
        if (!closure.insert(cur).second) continue;
        auto gen = generator.find(cur);
        if (gen == generator.end()) continue;
        closure.insert(gen->second->id);
        for (const auto& [name, art] : gen->second->used) queue.push_back(art);
    }
    return closure;
}

std::vector<Violation> conformance(const WorkflowRun& run, const Workflow& wf) {
    std::vector<Violation> out;

    std::map<Iri, std::size_t> run_index_of_process;
    for (std::size_t i = 0; i < run.process_runs.size(); ++i) {
        const ProcessRun& pr = run.process_runs[i];
        const Process* proc = wf.find_process(pr.described_by);
        if (!proc) {
            out.push_back({"FOREIGN_PROCESS", pr.id,
                           "process run describes a process outside the plan: " +
                               pr.described_by.value});
            continue;
        }
        run_index_of_process[proc->id] = i;

        std::set<std::string> input_names, output_names;
        for (const auto& p : proc->inputs) input_names.insert(p.name);
        for (const auto& p : proc->outputs) output_names.insert(p.name);
        for (const auto& [name, art] : pr.used) {
            if (!input_names.count(name))
                out.push_back({"BAD_USAGE", pr.id, "uses undeclared input " + name});
        }
        std::set<std::string> generated_names;
        for (const auto& [name, art] : pr.generated) generated_names.insert(name);
        if (generated_names != output_names)
            out.push_back({"BAD_USAGE", pr.id, "generated outputs differ from the plan"});
    }

    // Every executed plan edge must be witnessed by a generation -> usage
    // artifact pair, in plan order.
    for (const auto& link : wf.datalinks) {
        const Parameter* src = wf.find_parameter(link.source);
        const Parameter* snk = wf.find_parameter(link.sink);
        if (!src || !snk) continue;
        auto pi = run_index_of_process.find(src->owner);
        auto qi = run_index_of_process.find(snk->owner);
        if (pi == run_index_of_process.end() || qi == run_index_of_process.end()) continue;
        const ProcessRun& prod = run.process_runs[pi->second];
        const ProcessRun& cons = run.process_runs[qi->second];
        auto gen = prod.generated.find(src->name);
        auto use = cons.used.find(snk->name);
        if (gen == prod.generated.end() || use == cons.used.end() || gen->second != use->second) {
            out.push_back({"UNWITNESSED_LINK", link.sink,
                           "no matching generation/usage pair for data link into " + link.sink.value});
        }
        if (pi->second >= qi->second)
            out.push_back({"ORDER_VIOLATION", cons.id,
                           "consumer ran before its producer " + prod.id.value});
    }
    return out;
}

}  // namespace ro::wfprov
