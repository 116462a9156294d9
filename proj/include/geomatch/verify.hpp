#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geomatch {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  long mgf_samples = 1'000'000;
  std::uint64_t seed = 20240601;
};

/// Cross-checks of the closed-form theory objects against independent
/// computations: MGF closed form vs Monte Carlo (plain and centered clouds),
/// the net covering bound, the a_k bounds and the orbit decomposition of the
/// log-likelihood difference.
std::vector<VerifyCheck> run_verification(const VerifyOptions& opts = {});

}  // namespace geomatch
