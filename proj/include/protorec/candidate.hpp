#pragma once

#include <map>
#include <string>

#include "protorec/phoneme.hpp"

namespace protorec {

enum class ProvenanceKind { Parsimony, Pathway, Mutant };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::Parsimony;
  std::string detail;  // pathway language or mutation operator

  std::string to_string() const {
    switch (kind) {
      case ProvenanceKind::Parsimony: return "parsimony";
      case ProvenanceKind::Pathway: return "pathway(" + detail + ")";
      case ProvenanceKind::Mutant: return "mutant(" + detail + ")";
    }
    return "parsimony";
  }
};

// A protoform hypothesis. cumulative_cost is the parsimony extension cost for
// beam-produced candidates and 0 otherwise; later phases attach their score
// terms under named components.
struct Candidate {
  PhonemeSeq form;
  int cumulative_cost = 0;
  Provenance provenance;
  std::map<std::string, double> score_components;
};

}  // namespace protorec
