#ifndef WASSIM_ACCEPTANCE_HPP
#define WASSIM_ACCEPTANCE_HPP

#include <string>
#include <vector>

namespace wassim {

struct CriterionResult {
  int index;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

/// Runs the full verification suite; one result per criterion, in order.
/// Criteria never throw: failures (including exceptions) are reported in
/// the result record.
std::vector<CriterionResult> run_acceptance_suite();

}  // namespace wassim

#endif  // WASSIM_ACCEPTANCE_HPP
