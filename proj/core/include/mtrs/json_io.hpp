#pragma once

#include <filesystem>
#include <string>

#include "mtrs/clustering.hpp"
#include "mtrs/hypergraph.hpp"
#include "mtrs/instance_gen.hpp"
#include "mtrs/model.hpp"
#include "mtrs/solvers.hpp"

namespace mtrs::io {

/// Canonical JSON text: fixed key order, two-space indent, trailing newline.
/// store(load(store(x))) is byte-identical to store(x).
std::string store_instance(const Instance& inst);
Instance load_instance(const std::string& text);

std::string store_hypergraph(const Hypergraph& h);
std::string store_solution(const Hypergraph& h,
                           const solver::AssignmentSolution& s,
                           feas::Problem problem);
std::string store_clusters(const cluster::ClusterSet& cs);

std::string store_threedm(const gen::ThreeDM& t);
gen::ThreeDM load_threedm(const std::string& text);

gen::GenConfig load_gen_config(const std::string& text);
cluster::ClusterConfig load_cluster_config(const std::string& text);

/// Whole-file helpers; throw IoError with the path on failure.
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace mtrs::io
