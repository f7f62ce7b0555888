#pragma once

#include <string>
#include <vector>

namespace sssm {

struct VerifyResult {
  std::string name;
  bool pass;
  std::string detail;
};

// Gradient cross-checks. The online forward-sensitivity gradient must match
// the unrolled reverse-mode oracle on hard-threshold nets; reverse mode must
// match central finite differences on smoothed nets away from threshold
// crossings.
VerifyResult verify_rtrl_vs_bptt();
VerifyResult verify_bptt_vs_fd();
std::vector<VerifyResult> verify_rtrl();  // both of the above

// Pairing-term checks: online trace accumulation against brute-force pair
// sums on random Poisson trains, and the lag-window shape recovered through
// the two-neuron probe.
VerifyResult verify_stdp_pairing();
VerifyResult verify_stdp_window();
std::vector<VerifyResult> verify_stdp();

// Pruning controller: reaches each target sparsity on a static weight
// matrix, stays in band, and never regrows.
std::vector<VerifyResult> verify_pruning();

bool all_pass(const std::vector<VerifyResult>& results);
std::string format_results(const std::vector<VerifyResult>& results);

}  // namespace sssm
