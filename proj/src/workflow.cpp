#include "ro/workflow.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "ro/vocab.hpp"

namespace ro::wfdesc {

using rdf::BlankNode;
using rdf::Literal;
using rdf::Subject;
using rdf::Term;
namespace vocab = ro::vocab;

const Process* Workflow::find_process(const Iri& pid) const {
    for (const auto& p : processes)
        if (p.id == pid) return &p;
    return nullptr;
}

const Parameter* Workflow::find_parameter(const Iri& pid) const {
    for (const auto& p : inputs)
        if (p.id == pid) return &p;
    for (const auto& p : outputs)
        if (p.id == pid) return &p;
    for (const auto& proc : processes) {
        for (const auto& p : proc.inputs)
            if (p.id == pid) return &p;
        for (const auto& p : proc.outputs)
            if (p.id == pid) return &p;
    }
    return nullptr;
}

namespace {

std::string last_segment(const Iri& iri) {
    const std::string& v = iri.value;
    auto pos = v.find_last_of("/#");
    return pos == std::string::npos ? v : v.substr(pos + 1);
}

std::string label_or_segment(const Graph& g, const Iri& node) {
    auto label = g.object_of(Subject{node}, vocab::rdfs_label);
    if (label && rdf::is_literal(*label)) return std::get<Literal>(*label).lexical;
    return last_segment(node);
}

std::vector<Parameter> read_parameters(const Graph& g, const Iri& owner, const Iri& has_pred,
                                       Direction dir) {
    std::vector<Parameter> out;
    for (const auto& t : g.match(Term{owner}, Term{has_pred}, std::nullopt)) {
        const auto* pid = std::get_if<Iri>(&t.object);
        if (!pid) throw WorkflowError("parameter must be an IRI");
        out.push_back({*pid, owner, dir, label_or_segment(g, *pid)});
    }
    std::sort(out.begin(), out.end(), [](const Parameter& a, const Parameter& b) { return a.id < b.id; });
    return out;
}

}  // namespace

Workflow parse_workflow(const Graph& g) {
    auto wfs = g.match(std::nullopt, Term{vocab::rdf_type}, Term{vocab::wfdesc_workflow});
    if (wfs.empty()) throw WorkflowError("graph contains no wfdesc:Workflow");
    if (wfs.size() > 1) throw WorkflowError("graph contains multiple wfdesc:Workflow subjects");
    const auto* wf_id = std::get_if<Iri>(&wfs[0].subject);
    if (!wf_id) throw WorkflowError("workflow subject must be an IRI");

    Workflow wf;
    wf.id = *wf_id;
    wf.label = label_or_segment(g, wf.id);
    wf.inputs = read_parameters(g, wf.id, vocab::wfdesc_has_input, Direction::In);
    wf.outputs = read_parameters(g, wf.id, vocab::wfdesc_has_output, Direction::Out);

    for (const auto& t : g.match(Term{wf.id}, Term{vocab::wfdesc_has_process}, std::nullopt)) {
        const auto* pid = std::get_if<Iri>(&t.object);
        if (!pid) throw WorkflowError("process must be an IRI");
        Process proc;
        proc.id = *pid;
        proc.label = label_or_segment(g, proc.id);
        proc.inputs = read_parameters(g, proc.id, vocab::wfdesc_has_input, Direction::In);
        proc.outputs = read_parameters(g, proc.id, vocab::wfdesc_has_output, Direction::Out);
        auto impl = g.object_of(Subject{proc.id}, vocab::wfdesc_has_implementation);
        if (impl && rdf::is_literal(*impl)) proc.impl_hint = std::get<Literal>(*impl).lexical;
        wf.processes.push_back(std::move(proc));
    }
    std::sort(wf.processes.begin(), wf.processes.end(),
              [](const Process& a, const Process& b) { return a.id < b.id; });

    for (const auto& t : g.match(Term{wf.id}, Term{vocab::wfdesc_has_data_link}, std::nullopt)) {
        auto link_node = rdf::to_subject(t.object);
        if (!link_node) throw WorkflowError("data link must be a node");
        auto source = g.object_of(*link_node, vocab::wfdesc_has_source);
        auto sink = g.object_of(*link_node, vocab::wfdesc_has_sink);
        if (!source || !rdf::is_iri(*source) || !sink || !rdf::is_iri(*sink))
            throw WorkflowError("data link requires IRI source and sink");
        DataLink link{std::get<Iri>(*source), std::get<Iri>(*sink)};
        for (const Iri* end : {&link.source, &link.sink}) {
            if (!wf.find_parameter(*end))
                throw WorkflowError("data link endpoint is not a declared parameter: " + end->value);
        }
        wf.datalinks.push_back(link);
    }
    std::sort(wf.datalinks.begin(), wf.datalinks.end(), [](const DataLink& a, const DataLink& b) {
        return std::tie(a.source, a.sink) < std::tie(b.source, b.sink);
    });
    return wf;
}

namespace {

void write_parameter(Graph& g, const Iri& owner, const Parameter& p) {
    const Iri& has = p.direction == Direction::In ? vocab::wfdesc_has_input : vocab::wfdesc_has_output;
    const Iri& cls = p.direction == Direction::In ? vocab::wfdesc_input : vocab::wfdesc_output;
    g.insert(owner, has, p.id);
    g.insert(p.id, vocab::rdf_type, cls);
    g.insert(p.id, vocab::rdfs_label, Literal::plain(p.name));
}

}  // namespace

Graph serialize_workflow(const Workflow& wf) {
    Graph g;
    g.set_prefix("wfdesc", Iri{vocab::WFDESC_NS});
    g.set_prefix("rdfs", Iri{vocab::RDFS_NS});
    g.set_prefix("prov", Iri{vocab::PROV_NS});

    g.insert(wf.id, vocab::rdf_type, vocab::wfdesc_workflow);
    g.insert(wf.id, vocab::rdf_type, vocab::prov_plan);
    if (!wf.label.empty()) g.insert(wf.id, vocab::rdfs_label, Literal::plain(wf.label));
    for (const auto& p : wf.inputs) write_parameter(g, wf.id, p);
    for (const auto& p : wf.outputs) write_parameter(g, wf.id, p);
    for (const auto& proc : wf.processes) {
        g.insert(wf.id, vocab::wfdesc_has_process, proc.id);
        g.insert(proc.id, vocab::rdf_type, vocab::wfdesc_process);
        if (!proc.label.empty()) g.insert(proc.id, vocab::rdfs_label, Literal::plain(proc.label));
        if (proc.impl_hint)
            g.insert(proc.id, vocab::wfdesc_has_implementation, Literal::plain(*proc.impl_hint));
        for (const auto& p : proc.inputs) write_parameter(g, proc.id, p);
        for (const auto& p : proc.outputs) write_parameter(g, proc.id, p);
    }
    int n = 0;
    for (const auto& link : wf.datalinks) {
        BlankNode node{"link" + std::to_string(++n)};
        g.insert(wf.id, vocab::wfdesc_has_data_link, node);
        g.insert(node, vocab::rdf_type, vocab::wfdesc_data_link);
        g.insert(node, vocab::wfdesc_has_source, link.source);
        g.insert(node, vocab::wfdesc_has_sink, link.sink);
    }
    return g;
}

namespace {

struct Adjacency {
    // process index -> set of downstream process indexes
    std::vector<std::set<std::size_t>> edges;
    std::map<Iri, std::size_t> owner_of_output;  // out-param id -> process index
    std::map<Iri, std::size_t> owner_of_input;   // in-param id -> process index
};

Adjacency build_adjacency(const Workflow& wf) {
    Adjacency adj;
    adj.edges.resize(wf.processes.size());
    for (std::size_t i = 0; i < wf.processes.size(); ++i) {
        for (const auto& p : wf.processes[i].outputs) adj.owner_of_output[p.id] = i;
        for (const auto& p : wf.processes[i].inputs) adj.owner_of_input[p.id] = i;
    }
    for (const auto& link : wf.datalinks) {
        auto src = adj.owner_of_output.find(link.source);
        auto dst = adj.owner_of_input.find(link.sink);
        if (src != adj.owner_of_output.end() && dst != adj.owner_of_input.end())
            adj.edges[src->second].insert(dst->second);
    }
    return adj;
}

bool has_cycle(const Workflow& wf) {
    Adjacency adj = build_adjacency(wf);
    std::vector<int> state(wf.processes.size(), 0);  // 0 unseen, 1 active, 2 done
    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
        state[v] = 1;
        for (auto w : adj.edges[v]) {
            if (state[w] == 1) return true;
            if (state[w] == 0 && visit(w)) return true;
        }
        state[v] = 2;
        return false;
    };
    for (std::size_t v = 0; v < wf.processes.size(); ++v)
        if (state[v] == 0 && visit(v)) return true;
    return false;
}

}  // namespace

std::vector<Violation> validate_workflow(const Workflow& wf) {
    std::vector<Violation> out;

    std::set<Iri> process_ids;
    for (const auto& p : wf.processes)
        if (!process_ids.insert(p.id).second)
            out.push_back({"DUPLICATE_PROCESS", p.id, "process id declared twice"});

    std::set<Iri> param_ids;
    auto check_params = [&](const std::vector<Parameter>& params) {
        for (const auto& p : params)
            if (!param_ids.insert(p.id).second)
                out.push_back({"DUPLICATE_PARAMETER", p.id, "parameter id declared twice"});
    };
    check_params(wf.inputs);
    check_params(wf.outputs);
    for (const auto& proc : wf.processes) {
        check_params(proc.inputs);
        check_params(proc.outputs);
    }

    std::map<Iri, int> links_per_sink;
    for (const auto& link : wf.datalinks) {
        if (link.source == link.sink)
            out.push_back({"SELF_LINK", link.source, "data link source equals sink"});
        for (const Iri* end : {&link.source, &link.sink}) {
            if (!wf.find_parameter(*end))
                out.push_back({"UNRESOLVED_ENDPOINT", *end, "endpoint is not a declared parameter"});
        }
        if (++links_per_sink[link.sink] == 2)
            out.push_back({"MULTIPLE_SOURCES", link.sink, "more than one data link feeds this sink"});
    }

    if (has_cycle(wf))
        out.push_back({"CYCLE", wf.id, "process dependency graph contains a cycle"});
    return out;
}

std::vector<Process> topological_order(const Workflow& wf) {
    Adjacency adj = build_adjacency(wf);
    std::vector<std::size_t> indegree(wf.processes.size(), 0);
    for (const auto& outs : adj.edges)
        for (auto w : outs) ++indegree[w];

    // Ready set keyed by process id for deterministic tie-breaking.
    std::map<Iri, std::size_t> ready;
    for (std::size_t i = 0; i < wf.processes.size(); ++i)
        if (indegree[i] == 0) ready[wf.processes[i].id] = i;

    std::vector<Process> order;
    while (!ready.empty()) {
        auto [id, i] = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(wf.processes[i]);
        for (auto w : adj.edges[i]) {
            if (--indegree[w] == 0) ready[wf.processes[w].id] = w;
        }
    }
    if (order.size() != wf.processes.size())
        throw WorkflowError("cycle detected in workflow " + wf.id.value);
    return order;
}

std::vector<Parameter> unbound_inputs(const Workflow& wf) {
    std::set<Iri> linked_sinks;
    for (const auto& link : wf.datalinks) linked_sinks.insert(link.sink);
    std::set<std::string> workflow_input_names;
    for (const auto& p : wf.inputs) workflow_input_names.insert(p.name);

    std::vector<Parameter> out;
    for (const auto& proc : wf.processes) {
        for (const auto& p : proc.inputs) {
            if (linked_sinks.count(p.id)) continue;
            if (workflow_input_names.count(p.name)) continue;
            out.push_back(p);
        }
    }
    return out;
}

namespace {

Workflow normalized(Workflow wf) {
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(wf.inputs.begin(), wf.inputs.end(), by_id);
    std::sort(wf.outputs.begin(), wf.outputs.end(), by_id);
    std::sort(wf.processes.begin(), wf.processes.end(), by_id);
    for (auto& p : wf.processes) {
        std::sort(p.inputs.begin(), p.inputs.end(), by_id);
        std::sort(p.outputs.begin(), p.outputs.end(), by_id);
    }
    std::sort(wf.datalinks.begin(), wf.datalinks.end(), [](const DataLink& a, const DataLink& b) {
        return std::tie(a.source, a.sink) < std::tie(b.source, b.sink);
    });
    return wf;
}

}  // namespace

bool structurally_equal(const Workflow& a_in, const Workflow& b_in) {
    Workflow a = normalized(a_in);
    Workflow b = normalized(b_in);
    auto params_equal = [](const std::vector<Parameter>& x, const std::vector<Parameter>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].id != y[i].id || x[i].direction != y[i].direction || x[i].name != y[i].name)
                return false;
        }
        return true;
    };
    if (a.id != b.id || a.label != b.label) return false;
    if (!params_equal(a.inputs, b.inputs) || !params_equal(a.outputs, b.outputs)) return false;
    if (a.processes.size() != b.processes.size() || a.datalinks.size() != b.datalinks.size())
        return false;
    for (std::size_t i = 0; i < a.processes.size(); ++i) {
        const Process& pa = a.processes[i];
        const Process& pb = b.processes[i];
        if (pa.id != pb.id || pa.label != pb.label || pa.impl_hint != pb.impl_hint) return false;
        if (!params_equal(pa.inputs, pb.inputs) || !params_equal(pa.outputs, pb.outputs))
            return false;
    }
    for (std::size_t i = 0; i < a.datalinks.size(); ++i) {
        if (a.datalinks[i].source != b.datalinks[i].source ||
            a.datalinks[i].sink != b.datalinks[i].sink)
            return false;
    }
    return true;
}

}  // namespace ro::wfdesc
