#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pathloc/model.hpp"

// Definition of the bundled "campaign28" replay dataset: 28 vantage points in
// 28 countries, four messaging apps, one campaign per region with self-pairs
// included. Everything here is deterministic so the generated files are
// byte-stable across runs; the regression and acceptance suites pin the
// aggregate statistics this plan produces.
namespace fixtureplan {

struct SchemeRow {
    const char* cc;
    const char* region;
    const char* subregion;
    double lat;
    double lon;
    const char* name;
};

std::span<const SchemeRow> scheme_rows();
const SchemeRow& scheme_row(const std::string& cc);

// node country codes in address-plan order; node i owns (60+i).0.0.0/8
const std::vector<std::string>& node_ccs();
pathloc::VantagePoint vantage_for(const std::string& cc);

struct EndpointInfo {
    const char* app;
    const char* cc;    // backend country
    const char* dns;
    pathloc::Protocol protocol;
    uint16_t port;
};

std::span<const EndpointInfo> endpoints();
pathloc::Ipv4 endpoint_address(const EndpointInfo& e);

const std::vector<std::string>& region_keys();  // europe, asia, oceania, americas
const std::vector<std::string>& region_node_ccs(const std::string& region_key);

// All experiments of one region's campaign (apps x pairs-with-self),
// ordered by (app, src, dst).
std::vector<pathloc::ExperimentRecord> build_experiments(const std::string& region_key);

// Data files derived from the same tables.
std::string regions_csv();
std::string groups_csv();
std::string centroids_csv();
std::string overrides_csv();
std::string ranges_csv();
std::string vantage_csv();
std::string campaign_json(const std::string& region_key, const std::string& fixture_file);

// Small demo inputs for the flow pipeline and the traceroute parser.
std::string flows_whatsapp_csv();
std::string flows_background_csv();
std::string flows_lists_csv();
std::string flows_dns_cn_csv();
std::string flows_dns_de_csv();
std::vector<std::pair<std::string, std::string>> trace_samples();  // filename -> text

}  // namespace fixtureplan
