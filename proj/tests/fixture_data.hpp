#pragma once

// The "mining the Kegg path" workflow fixture shared by the workflow,
// enactment, and acceptance suites, plus random DAG generators.

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ro/enactment.hpp"
#include "ro/research_object.hpp"
#include "ro/vocab.hpp"
#include "ro/workflow.hpp"

namespace ro::testsupport {

using rdf::Iri;
using wfdesc::DataLink;
using wfdesc::Direction;
using wfdesc::Parameter;
using wfdesc::Process;
using wfdesc::Workflow;

inline const std::string kWfBase = "http://x/gwas-to-kegg/workflow34.xml";
inline const Iri kWfId{kWfBase + "#workflow"};
inline const Iri kProcInput{kWfBase + "#proc/input_chr_pos"};
inline const Iri kProcGP{kWfBase + "#proc/G_P"};
inline const Iri kProcFlatten{kWfBase + "#proc/Flatten_List_3"};

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(RO_FIXTURE_DIR) + "/" + name, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// The fixture workflow built directly, bypassing the Turtle parser.
inline Workflow mining_workflow() {
    auto param = [](const Iri& owner, Direction dir, const std::string& name) {
        std::string leg = dir == Direction::In ? "/in/" : "/out/";
        return Parameter{Iri{owner.value + leg + name}, owner, dir, name};
    };
    Workflow wf;
    wf.id = kWfId;
    wf.label = "mining_the_Kegg_path";
    wf.inputs = {Parameter{Iri{kWfBase + "#in/input_file"}, kWfId, Direction::In, "input_file"},
                 Parameter{Iri{kWfBase + "#in/set_width"}, kWfId, Direction::In, "set_width"}};
    wf.outputs = {Parameter{Iri{kWfBase + "#out/output_table"}, kWfId, Direction::Out, "output_table"}};

    Process p1{kProcInput, "input_chr_pos",
               {param(kProcInput, Direction::In, "input_file")},
               {param(kProcInput, Direction::Out, "chr_pos_list")},
               std::nullopt};
    Process p2{kProcGP, "G_P",
               {param(kProcGP, Direction::In, "chr_pos_list"),
                param(kProcGP, Direction::In, "chrom_start"),
                param(kProcGP, Direction::In, "chrom_end")},
               {param(kProcGP, Direction::Out, "nested_list")},
               std::nullopt};
    Process p3{kProcFlatten, "Flatten_List_3",
               {param(kProcFlatten, Direction::In, "nested_list"),
                param(kProcFlatten, Direction::In, "set_width")},
               {param(kProcFlatten, Direction::Out, "output_table")},
               std::nullopt};
    wf.processes = {p1, p2, p3};
    wf.datalinks = {DataLink{Iri{kProcInput.value + "/out/chr_pos_list"},
                             Iri{kProcGP.value + "/in/chr_pos_list"}},
                    DataLink{Iri{kProcGP.value + "/out/nested_list"},
                             Iri{kProcFlatten.value + "/in/nested_list"}}};
    return wf;
}

inline wfprov::StepRegistry mining_registry() {
    wfprov::StepRegistry reg;
    reg.register_step(kProcInput, [](const std::map<std::string, std::string>& in) {
        return std::map<std::string, std::string>{
            {"chr_pos_list", "positions(" + in.at("input_file") + ")"}};
    });
    reg.register_step(kProcGP, [](const std::map<std::string, std::string>& in) {
        return std::map<std::string, std::string>{
            {"nested_list", "pathways(" + in.at("chr_pos_list") + "," + in.at("chrom_start") +
                                "-" + in.at("chrom_end") + ")"}};
    });
    reg.register_step(kProcFlatten, [](const std::map<std::string, std::string>& in) {
        return std::map<std::string, std::string>{
            {"output_table", "flat(" + in.at("nested_list") + ",w=" + in.at("set_width") + ")"}};
    });
    return reg;
}

inline std::map<std::string, std::string> mining_bindings() {
    return {{"input_file", "chr1:123,chr2:456"},
            {"set_width", "80"},
            {"chrom_start", "100000"},
            {"chrom_end", "200000"}};
}

inline const Iri kRunId{"http://x/runs/run-481"};
inline const wfprov::Engine kEngine{Iri{"http://x/engines/taverna"}, "Taverna"};

/// Random DAG: links only flow from lower-index process outputs to
/// higher-index process inputs, so the result is acyclic by construction.
inline Workflow random_dag(std::mt19937& rng, int max_processes = 10) {
    Workflow wf;
    wf.id = Iri{"http://x/rand-wf#workflow"};
    wf.label = "random";
    std::uniform_int_distribution<int> nproc(0, max_processes);
    int n = nproc(rng);
    for (int i = 0; i < n; ++i) {
        char tag = static_cast<char>('a' + i);
        Iri pid{wf.id.value + "/p" + std::string(1, tag)};
        Process proc{pid, "p" + std::string(1, tag), {}, {}, std::nullopt};
        int nin = 1 + static_cast<int>(rng() % 2);
        for (int k = 0; k < nin; ++k) {
            std::string name = "x" + std::to_string(k);
            proc.inputs.push_back({Iri{pid.value + "/in/" + name}, pid, Direction::In, name});
        }
        proc.outputs.push_back({Iri{pid.value + "/out/y"}, pid, Direction::Out, "y"});
        wf.processes.push_back(std::move(proc));
    }
    for (int j = 1; j < n; ++j) {
        for (const auto& sink : wf.processes[j].inputs) {
            if (rng() % 2 == 0) continue;  // left unbound
            int i = static_cast<int>(rng() % j);
            wf.datalinks.push_back({wf.processes[i].outputs[0].id, sink.id});
        }
    }
    return wf;
}

/// A registry that concatenates each process's inputs; covers any workflow.
inline wfprov::StepRegistry concat_registry(const Workflow& wf) {
    wfprov::StepRegistry reg;
    for (const auto& proc : wf.processes) {
        std::vector<std::string> out_names;
        for (const auto& p : proc.outputs) out_names.push_back(p.name);
        reg.register_step(proc.id, [out_names](const std::map<std::string, std::string>& in) {
            std::string joined;
            for (const auto& [k, v] : in) joined += k + "=" + v + ";";
            std::map<std::string, std::string> out;
            for (const auto& name : out_names) out[name] = name + "(" + joined + ")";
            return out;
        });
    }
    return reg;
}

/// The GWAS-to-Kegg research object from the running scenario: four
/// aggregated resources plus a title annotation and a hypothesis annotation.
inline core::ResearchObject gwas_research_object(
    const Iri& id = Iri{"http://x/gwas-to-kegg/"},
    const Iri& creator = Iri{"http://example.org/maria"},
    const core::Timestamp& at = core::Timestamp{"2013-01-01T00:00:00Z"}) {
    core::ResearchObject ro = core::ResearchObject::create(id, creator, at);
    ro.aggregate(ro.resolve_ref("data2.csv"), {vocab::ro_dataset},
                 "rsid,chromosome,position\nrs1042522,chr17,7676154\n");
    ro.aggregate(ro.resolve_ref("workflow34.xml"), {vocab::ro_software},
                 read_fixture("workflow34.wfdesc.ttl"));
    ro.aggregate(ro.resolve_ref("hypothesis.txt"), {},
                 "SNPs in the region are associated with Kegg pathway membership.\n");
    ro.aggregate(ro.resolve_ref("provenance.rdf"), {},
                 "# trace of run-481\n");

    rdf::Graph title;
    title.insert(id, vocab::dct_title, rdf::Literal::plain("GWAS to Kegg"));
    ro.annotate({id}, title, creator, at);

    rdf::Graph hypothesis;
    hypothesis.insert(ro.resolve_ref("hypothesis.txt"), vocab::rdf_type,
                      vocab::roterms_hypothesis);
    ro.annotate({ro.resolve_ref("workflow34.xml")}, hypothesis, creator, at);
    return ro;
}

}  // namespace ro::testsupport
