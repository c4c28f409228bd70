#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace medianflow {

/// Collects every validation failure, one message per offending key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ExperimentConfig {
  struct Grid {
    int n = 64;
    std::string dealias = "2/3";
  } grid;
  struct Noise {
    double alpha = 12.0;
    double sigma = 1.0;
    std::uint64_t seed = 1;
    int substeps = 1;
    double k_max = 0.0;
  } noise;
  struct Flow {
    double dt = 1e-3;
    double t_burn = 0.0;
    double t_total = 1.0;
    std::string u0 = "zero";  // zero | random:<decay> | file:<path>
    double cfl = 0.5;
  } flow;
  struct Scalar {
    double kappa = 0.1;
    std::vector<double> kappa_list;
    std::string op = "adv";
    std::string rho0 = "mode:1";  // mode:<m> | annulus:<M0> | file:<path>
    std::string scheme = "euler";
    double t_discard = 0.0;  // scalar time excluded from lambda_hat
    double cfl = 0.0;        // > 0: substep the scalar so h n max|u| <= cfl per substep
  } scalar;
  struct Experiment {
    std::string kind = "run";  // run | sweep | median | chaos | verify
    int ensemble_size = 1;
    double delta = 0.2;
    double q = 2.5;
    std::string output_dir = "out";
    std::vector<int> M0_list;
    int output_every = 1;
    int checkpoint_every = 0;
    int snapshot_every = 0;
    double horizon_factor = 5.0;  // median runs last horizon_factor * t_star(M0)
    int batches = 10;
  } experiment;
  struct Chaos {
    int n = 32;
    int k_max = 8;
    std::vector<double> kappa_list{0.1};
    std::vector<double> M_list{8};
    int paths = 2000;
    double dt = 2e-3;
    bool mc = true;
  } chaos;
};

/// Flat `section.key = value` lines; `#` starts a comment. Unknown keys, bad
/// values and duplicate keys are errors that name the line and key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Checks ranges and cross-key requirements; throws ConfigError listing all of them.
void validate(const ExperimentConfig& cfg);

/// Canonical text form (every key, fixed order, round-trip exact).
std::string to_text(const ExperimentConfig& cfg);
/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace medianflow
