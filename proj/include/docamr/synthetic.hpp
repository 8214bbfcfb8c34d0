#pragma once

#include <cstdint>
#include <string>

#include "docamr/builder.hpp"
#include "docamr/document.hpp"

namespace docamr {

// Deterministic cross-platform generator state (splitmix64).
struct Rng {
  std::uint64_t state = 0;
  std::uint64_t next();
  std::uint64_t bounded(std::uint64_t n);  // uniform in [0, n)
  double uniform();                        // uniform in [0, 1)
  bool chance(double p) { return uniform() < p; }
};

struct GenOptions {
  int min_sentences = 2;
  int max_sentences = 8;
  int min_nodes = 3;  // content nodes per sentence, name nodes come extra
  int max_nodes = 8;
  int max_chains = 3;
  int chain_min_members = 2;
  int chain_max_members = 4;
  double p_pronoun = 0.25;
  double p_named_entity = 0.2;
  double p_attribute = 0.3;
  double p_reentrancy = 0.15;
  double p_singleton_chain = 0.15;
  int max_implicit_roles = 2;
  int max_bridging = 1;
};

// A random connected document with identity chains, implicit roles and
// bridging links drawn over a shared concept pool.
Document random_document(Rng& rng, const GenOptions& opts,
                         const std::string& doc_id);

struct PerturbOptions {
  double p_delete_relation = 0.08;
  double p_relabel_relation = 0.05;
  double p_corrupt_concept = 0.05;
  double p_delete_attribute = 0.08;
};

// A "predicted" counterpart of a built document graph: variables renamed,
// some triples deleted or corrupted with labels that occur nowhere in the
// original. Connectivity is preserved and per-node provenance carries over,
// so the pair still derives from the same document.
DocGraph perturb_doc_graph(const DocGraph& gold, Rng& rng,
                           const PerturbOptions& opts);

}  // namespace docamr
