#pragma once

// One function per subcommand. Each returns the process exit code: 0 on
// success, 4 when a certificate or check fails. Validation problems surface as
// InvalidInput / RegimeError (exit 2) and solver breakdowns as NumericalError
// (exit 3); main() does that mapping.

#include <cstdint>
#include <string>

namespace chemomass::cli {

enum ExitCode : int { ok = 0, io_error = 1, validation = 2, numerical = 3, check_failed = 4 };

struct Common {
  std::string out;  ///< empty: $CHEMOMASS_OUT or ./chemomass_out
  double delta = 1.0;
  double tau = 1.0;
};

struct PrimalOptions {
  Common common;
  std::string m;
  std::string data = "concentrated";  ///< concentrated | homogeneous
  double radius = 0.3;
  double w_ratio = 0.5;
  std::size_t n = 512;
  double dt = 1e-3;
  double t_end = 10.0;
  double record_every = 0.1;
  double snapshot_every = 0.0;  ///< 0: first and last state only
  double energy_p = 2.0;
};
int simulate_primal(const PrimalOptions& o);

struct TransformedOptions {
  Common common;
  std::string m;
  std::string data = "auto";  ///< auto | homogeneous
  double eta = 1.0;
  std::size_t n = 512;
  std::size_t n_data = 1024;
  std::size_t nxi = 512;
  double xi_min = 1e-200;
  double xi_ratio = 1.05;
  double dt = 0.05;
  double t_end = 200.0;
  double record_every = 0.5;
  double window = 50.0;
  double snapshot_every = 0.0;
};
int simulate_transformed(const TransformedOptions& o);

struct BarrierOptions {
  Common common;
  std::string mode;  ///< inner | outer | sub | super
  std::string m;     ///< default 12pi (4pi for super)
  double eta = 1.0;
  std::size_t n_data = 1024;
  std::size_t samples = 200;
  double t_max = 50.0;
  double slack = 1e-12;
  double horizon = 200.0;  ///< super: length of the run that fixes C
};
int verify_barrier(const BarrierOptions& o);

struct DataOptions {
  Common common;
  std::string m;
  double eta = 1.0;
  std::size_t n_data = 1024;
};
int build_data(const DataOptions& o);

struct SweepOptions {
  Common common;
  std::string masses;
  std::string family = "concentrated";
  double horizon = 200.0;
  double dt = 0.05;
  double record_every = 0.5;
  double window = 50.0;
  double eta = 1.0;
  std::size_t n = 512;
  std::size_t n_data = 1024;
  std::size_t nxi = 512;
  double xi_min = 1e-200;
  double xi_ratio = 1.05;
  unsigned threads = 0;
  bool timing = false;
};
int sweep_mass(const SweepOptions& o);

struct ComparisonOptions {
  Common common;
  std::string m = "12pi";
  double eta = 1.0;
  double horizon = 200.0;
  std::size_t pairs = 10;
  std::string pair_m = "6pi";
  std::size_t pair_n = 256;
  double pair_t_end = 20.0;
  std::uint64_t seed = 0;
};
int check_comparison(const ComparisonOptions& o);

struct EnergyOptions {
  Common common;
  std::string m;
  std::size_t n = 512;
  double dt = 0.01;
  double t_end = 200.0;
  double record_every = 0.5;
  double rel_tol = 1e-3;
  double min_fraction = 0.99;
  double energy_p = 2.0;
};
int energy_check(const EnergyOptions& o);

}  // namespace chemomass::cli
