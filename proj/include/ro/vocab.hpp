#pragma once

#include "ro/rdf.hpp"

// Vocabulary terms used throughout the toolkit. Namespace IRIs follow the
// published wf4ever vocabularies; roterms is the companion namespace for
// experiment-role types (hypothesis, conclusion, example data).
namespace ro::vocab {

using rdf::Iri;

inline const std::string RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline const std::string RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#";
inline const std::string XSD_NS = "http://www.w3.org/2001/XMLSchema#";
inline const std::string DCT_NS = "http://purl.org/dc/terms/";
inline const std::string ORE_NS = "http://www.openarchives.org/ore/terms/";
inline const std::string AO_NS = "http://purl.org/ao/";
inline const std::string RO_NS = "http://purl.org/net/wf4ever/ro#";
inline const std::string ROEVO_NS = "http://purl.org/wf4ever/roevo#";
inline const std::string WFDESC_NS = "http://purl.org/wf4ever/wfdesc#";
inline const std::string WFPROV_NS = "http://purl.org/wf4ever/wfprov#";
inline const std::string PROV_NS = "http://www.w3.org/ns/prov#";
inline const std::string ROTERMS_NS = "http://purl.org/wf4ever/roterms#";

inline const Iri rdf_type{RDF_NS + "type"};
inline const Iri rdfs_label{RDFS_NS + "label"};

inline const Iri xsd_date_time{XSD_NS + "dateTime"};

inline const Iri dct_created{DCT_NS + "created"};
inline const Iri dct_creator{DCT_NS + "creator"};
inline const Iri dct_title{DCT_NS + "title"};

inline const Iri ore_aggregation{ORE_NS + "Aggregation"};
inline const Iri ore_aggregated_resource{ORE_NS + "AggregatedResource"};
inline const Iri ore_resource_map{ORE_NS + "ResourceMap"};
inline const Iri ore_aggregates{ORE_NS + "aggregates"};
inline const Iri ore_describes{ORE_NS + "describes"};
inline const Iri ore_is_described_by{ORE_NS + "isDescribedBy"};

inline const Iri ao_annotation{AO_NS + "Annotation"};
inline const Iri ao_annotates_resource{AO_NS + "annotatesResource"};
inline const Iri ao_body{AO_NS + "body"};

inline const Iri ro_research_object{RO_NS + "ResearchObject"};
inline const Iri ro_manifest{RO_NS + "Manifest"};
inline const Iri ro_resource{RO_NS + "Resource"};
inline const Iri ro_dataset{RO_NS + "Dataset"};
inline const Iri ro_paper{RO_NS + "Paper"};
inline const Iri ro_software{RO_NS + "Software"};
inline const Iri ro_annotation{RO_NS + "Annotation"};

inline const Iri roevo_live_ro{ROEVO_NS + "LiveRO"};
inline const Iri roevo_snapshot_ro{ROEVO_NS + "SnapshotRO"};
inline const Iri roevo_archived_ro{ROEVO_NS + "ArchivedRO"};
inline const Iri roevo_versionable_resource{ROEVO_NS + "VersionableResource"};
inline const Iri roevo_change_specification{ROEVO_NS + "ChangeSpecification"};
inline const Iri roevo_change{ROEVO_NS + "Change"};
inline const Iri roevo_addition{ROEVO_NS + "Addition"};
inline const Iri roevo_modification{ROEVO_NS + "Modification"};
inline const Iri roevo_removal{ROEVO_NS + "Removal"};
inline const Iri roevo_has_change{ROEVO_NS + "hasChange"};
inline const Iri roevo_related_resource{ROEVO_NS + "relatedResource"};

inline const Iri wfdesc_workflow{WFDESC_NS + "Workflow"};
inline const Iri wfdesc_process{WFDESC_NS + "Process"};
inline const Iri wfdesc_data_link{WFDESC_NS + "DataLink"};
inline const Iri wfdesc_input{WFDESC_NS + "Input"};
inline const Iri wfdesc_output{WFDESC_NS + "Output"};
inline const Iri wfdesc_has_process{WFDESC_NS + "hasProcess"};
inline const Iri wfdesc_has_input{WFDESC_NS + "hasInput"};
inline const Iri wfdesc_has_output{WFDESC_NS + "hasOutput"};
inline const Iri wfdesc_has_data_link{WFDESC_NS + "hasDataLink"};
inline const Iri wfdesc_has_source{WFDESC_NS + "hasSource"};
inline const Iri wfdesc_has_sink{WFDESC_NS + "hasSink"};
inline const Iri wfdesc_has_implementation{WFDESC_NS + "hasImplementation"};

inline const Iri wfprov_workflow_run{WFPROV_NS + "WorkflowRun"};
inline const Iri wfprov_process_run{WFPROV_NS + "ProcessRun"};
inline const Iri wfprov_artifact{WFPROV_NS + "Artifact"};
inline const Iri wfprov_workflow_engine{WFPROV_NS + "WorkflowEngine"};
inline const Iri wfprov_described_by_workflow{WFPROV_NS + "describedByWorkflow"};
inline const Iri wfprov_described_by_process{WFPROV_NS + "describedByProcess"};
inline const Iri wfprov_was_part_of_workflow_run{WFPROV_NS + "wasPartOfWorkflowRun"};
inline const Iri wfprov_used_input{WFPROV_NS + "usedInput"};
inline const Iri wfprov_was_output_from{WFPROV_NS + "wasOutputFrom"};
inline const Iri wfprov_was_enacted_by{WFPROV_NS + "wasEnactedBy"};

inline const Iri prov_entity{PROV_NS + "Entity"};
inline const Iri prov_activity{PROV_NS + "Activity"};
inline const Iri prov_agent{PROV_NS + "Agent"};
inline const Iri prov_software_agent{PROV_NS + "SoftwareAgent"};
inline const Iri prov_plan{PROV_NS + "Plan"};
inline const Iri prov_used{PROV_NS + "used"};
inline const Iri prov_was_generated_by{PROV_NS + "wasGeneratedBy"};
inline const Iri prov_was_revision_of{PROV_NS + "wasRevisionOf"};
inline const Iri prov_was_associated_with{PROV_NS + "wasAssociatedWith"};
inline const Iri prov_started_at_time{PROV_NS + "startedAtTime"};
inline const Iri prov_ended_at_time{PROV_NS + "endedAtTime"};

inline const Iri roterms_hypothesis{ROTERMS_NS + "Hypothesis"};
inline const Iri roterms_conclusion{ROTERMS_NS + "Conclusion"};
inline const Iri roterms_example_data{ROTERMS_NS + "ExampleData"};

}  // namespace ro::vocab
