#ifndef GRF_MODEL_IO_HPP
#define GRF_MODEL_IO_HPP

#include <string>

#include "grf/covmodel.hpp"
#include "grf/kacrice.hpp"

namespace grf {

/// Loads a 1D process model from a JSON spec:
///   {
///     "type": "stationary" | "varying_bandwidth" | "cosine",
///     "kernel": "gaussian",                      // kernel-defined types
///     "nu":    {"kind": "const"|"linear"|"poly", "coeffs": [...]},
///     "sigma": {"kind": "const"|"linear"|"poly", "coeffs": [...]},  // optional
///     "cosine": {"c1": ..., "c2": ..., "omega": ...}
///   }
/// Polynomial coefficients are ascending (c0 + c1 t + ...). A "sigma" entry
/// wraps the base model in a variance scaling. "custom" kernels are reserved
/// for the library API and rejected here.
/// Throws ConfigError on malformed input.
ProcessModel load_model(const std::string& path);
ProcessModel parse_model(const std::string& json_text);

/// Loads covariance blocks for the Kac-Rice estimators from JSON:
///   {"fv": ..., "dv": [[...]], "d2v": [[...]],
///    "fdcov": [...], "fd2cov": [...], "dd2cov": [[...]]}
JointGaussianSpec load_joint_spec(const std::string& path);
JointGaussianSpec parse_joint_spec(const std::string& json_text);

}  // namespace grf

#endif
