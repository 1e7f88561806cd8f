// dmdkit command-line front end.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 usage or flag conflict, 3 parse,
// 4 dimension, 5 rank-zero, 6 precondition, 7 numerical, 8 io.

#include <dmdkit/dmdkit.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace dmdkit;

namespace {

constexpr int kExitUsage = 2;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::parse: return 3;
    case ErrorCategory::dimension: return 4;
    case ErrorCategory::rank_zero: return 5;
    case ErrorCategory::precondition: return 6;
    case ErrorCategory::numerical: return 7;
    case ErrorCategory::io: return 8;
  }
  return 1;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) { return io::format_double(v); }

struct DataOptions {
  std::vector<std::string> inputs;
  bool header = false;
  std::string pairing = "sequential";
  long stride = 1;
  long delay = 1;
  std::string mean = "none";
  std::optional<double> dt;
};

struct RankOptions {
  std::optional<double> rank_rel;
  std::optional<double> rank_abs;
  bool snapshots = false;
  std::optional<double> gram_tol;

  RankPolicy policy() const {
    RankPolicy p = RankPolicy::automatic();
    if (rank_rel) p = RankPolicy::relative(*rank_rel);
    if (rank_abs) p = RankPolicy::absolute(*rank_abs);
    if (snapshots) p = p.with_snapshots(gram_tol);
    return p;
  }
};

struct DmdCli {
  DataOptions data;
  RankOptions rank;
  std::string algorithm = "exact";
  std::optional<double> zero_tol;
  bool include_zero_modes = false;
  double eig_tol = 1e-9;
  double consistency_tol = 1e-10;
  std::string scaling = "none";
  std::string amplitude_target = "y0";
  long m_weight = 0;
  std::string out = ".";
};

void add_data_options(CLI::App* sub, DataOptions& d) {
  sub->add_option("-i,--input", d.inputs,
                  "Snapshot CSV, one snapshot per column. Repeat for multi-run data; "
                  "paired pairing takes X then Y")
      ->required();
  sub->add_flag("--header", d.header, "Input files start with a header row");
  sub->add_option("--pairing", d.pairing, "How snapshots become (X, Y) pairs")
      ->check(CLI::IsMember({"sequential", "strided", "paired", "multi-run"}))
      ->capture_default_str();
  sub->add_option("--stride", d.stride, "Pair spacing P for strided pairing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--delay", d.delay, "Delay-embedding depth (1 = none)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--mean", d.mean, "Mean removal: none, x (mean of X) or pooled (X and Y)")
      ->check(CLI::IsMember({"none", "x", "pooled"}))
      ->capture_default_str();
  sub->add_option("--dt", d.dt, "Sampling interval for frequencies and growth rates (default 1)")
      ->check(CLI::PositiveNumber);
}

void add_rank_options(CLI::App* sub, RankOptions& r) {
  auto* rel = sub->add_option("--rank-rel", r.rank_rel,
                              "Keep singular values above this fraction of sigma_1 "
                              "(default max(n,m)*eps*sigma_1)");
  auto* abs = sub->add_option("--rank-abs", r.rank_abs, "Keep singular values above this value");
  rel->excludes(abs);
  sub->add_flag("--snapshots", r.snapshots, "SVD through the Gram matrix X^*X (method of snapshots)");
  sub->add_option("--gram-tol", r.gram_tol,
                  "Relative cut on Gram eigenvalues with --snapshots (default max(n,m)*eps)");
}

void validate_data(const DataOptions& d, const std::string& algorithm) {
  const auto count = d.inputs.size();
  if ((d.pairing == "sequential" || d.pairing == "strided") && count != 1)
    throw UsageError("--pairing " + d.pairing + " takes exactly one --input");
  if (d.pairing == "paired" && count != 2)
    throw UsageError("--pairing paired takes two --input files: X then Y");
  if (d.stride != 1 && d.pairing != "strided")
    throw UsageError("--stride requires --pairing strided");
  if (d.delay > 1 && d.pairing != "sequential")
    throw UsageError("--delay requires --pairing sequential");
  if (algorithm == "sequential" && d.pairing != "sequential")
    throw UsageError("--algorithm sequential requires --pairing sequential");
}

SnapshotPairs load_pairs(const DataOptions& d) {
  std::vector<Eigen::MatrixXd> files;
  for (const auto& path : d.inputs) files.push_back(io::read_csv(path, d.header));
  SnapshotPairs pairs;
  if (d.pairing == "sequential") {
    pairs = pairs_from_sequence(files[0], d.dt);
  } else if (d.pairing == "strided") {
    pairs = pairs_from_strided(files[0], d.stride, std::nullopt, d.dt);
  } else if (d.pairing == "paired") {
    pairs = make_pairs(files[0], files[1], d.dt);
  } else {
    TrajectorySet ts;
    for (const auto& f : files) ts.trajectories.push_back(f.cast<Complex>());
    pairs = pairs_from_trajectories(ts, d.dt);
  }
  if (d.mean != "none")
    pairs = subtract_mean(pairs, d.mean == "x" ? MeanMode::x_mean : MeanMode::pooled).first;
  if (d.delay > 1) pairs = delay_embed(pairs, d.delay);
  return pairs;
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "projected") return Algorithm::projected;
  if (s == "qr") return Algorithm::qr;
  if (s == "sequential") return Algorithm::sequential;
  return Algorithm::exact;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorCategory::io, "cannot create output directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCategory::io, "write to '" + path + "' failed");
}

void write_eigenvalues(const std::string& path, const DmdDecomposition& dec, double dt,
                       long m_weight) {
  const auto points = spectrum(dec, dt, m_weight);
  const bool amps = dec.amplitudes.has_value();
  std::vector<std::string> header{"re", "im", "abs", "frequency", "growth_continuous",
                                  "mode_norm", "weighted_norm"};
  if (amps) {
    header.emplace_back("amplitude_re");
    header.emplace_back("amplitude_im");
  }
  Eigen::MatrixXd table(dec.size(), static_cast<Eigen::Index>(header.size()));
  for (Eigen::Index j = 0; j < dec.size(); ++j) {
    const auto& s = points[static_cast<std::size_t>(j)];
    table(j, 0) = s.eigenvalue.real();
    table(j, 1) = s.eigenvalue.imag();
    table(j, 2) = s.growth_discrete;
    table(j, 3) = s.frequency;
    table(j, 4) = s.growth_continuous;
    table(j, 5) = s.mode_norm;
    table(j, 6) = s.weighted_norm;
    if (amps) {
      table(j, 7) = (*dec.amplitudes)(j).real();
      table(j, 8) = (*dec.amplitudes)(j).imag();
    }
  }
  io::write_csv(path, table, header);
}

DmdDecomposition run_pipeline(const DmdCli& c, const SnapshotPairs& pairs) {
  DmdOptions opts;
  opts.rank = c.rank.policy();
  opts.zero_tol = c.zero_tol;
  opts.include_zero_modes = c.include_zero_modes;
  opts.eig_tol = c.eig_tol;
  opts.compute_adjoint = c.scaling == "biorthogonal";
  DmdDecomposition dec = run_dmd(pairs, parse_algorithm(c.algorithm), opts);
  const auto target =
      c.amplitude_target == "x0" ? AmplitudeTarget::first_x : AmplitudeTarget::first_y;
  if (c.scaling == "unit") dec = scale_unit_norm(std::move(dec));
  if (c.scaling == "biorthogonal") dec = scale_biorthogonal(std::move(dec));
  if (c.scaling == "amplitude-qr")
    dec = scale_amplitudes(std::move(dec), pairs, AmplitudeMethod::qr, target);
  if (c.scaling == "amplitude-gram")
    dec = scale_amplitudes(std::move(dec), pairs, AmplitudeMethod::gram, target);
  return dec;
}

std::string svd_lines(const ReducedSvd& s) {
  std::ostringstream r;
  r << "rank: " << s.rank << "\n"
    << "sigma_1: " << fmt(s.sigma(0)) << "\n"
    << "sigma_r: " << fmt(s.sigma(s.rank - 1)) << "\n"
    << "rank_threshold: " << fmt(s.truncation_tol) << "\n"
    << "discarded_norm: " << fmt(s.discarded_norm) << "\n";
  return r.str();
}

std::string consistency_lines(const ConsistencyReport& cr, double tol) {
  std::ostringstream r;
  r << "consistency_defect: " << fmt(cr.defect) << "\n"
    << "ax_minus_y_relative: " << fmt(cr.ax_residual) << "\n"
    << "consistency_tol: " << fmt(tol) << "\n"
    << "consistent: " << (cr.consistent ? "yes" : "no") << "\n";
  return r.str();
}

std::string suggestion(const ConsistencyReport& cr, const DataOptions& d) {
  if (cr.consistent) return {};
  if (d.pairing == "sequential")
    return "suggestion: X and Y are linearly inconsistent; rerun with --delay " +
           std::to_string(d.delay + 1) +
           " to append time-shifted copies of each snapshot and raise the data rank\n";
  return "suggestion: X and Y are linearly inconsistent; DMD eigenvalues are a least-squares "
         "fit and may not match the underlying dynamics\n";
}

int cmd_dmd(const DmdCli& c) {
  validate_data(c.data, c.algorithm);
  const bool amplitude = c.scaling.rfind("amplitude", 0) == 0;
  if (amplitude && c.data.pairing != "sequential")
    throw UsageError("--scaling " + c.scaling + " requires --pairing sequential");
  const SnapshotPairs pairs = load_pairs(c.data);
  const DmdDecomposition dec = run_pipeline(c, pairs);
  const ConsistencyReport cr = linear_consistency(pairs, c.consistency_tol, c.rank.policy());
  const double dt = c.data.dt.value_or(1.0);

  ensure_dir(c.out);
  write_eigenvalues(join(c.out, "eigenvalues.csv"), dec, dt, c.m_weight);
  io::write_complex_csv(join(c.out, "modes.csv"), dec.modes());
  if (dec.adjoint_modes) io::write_complex_csv(join(c.out, "adjoint_modes.csv"), *dec.adjoint_modes);

  std::ostringstream r;
  r << "command: dmd\n"
    << "algorithm: " << to_string(dec.algorithm) << "\n"
    << "pairing: " << c.data.pairing << "\n"
    << "provenance: " << to_string(pairs.provenance) << "\n"
    << "state_dim: " << pairs.state_dim() << "\n"
    << "pairs: " << pairs.count() << "\n"
    << svd_lines(dec.op.svd_of_x) << consistency_lines(cr, c.consistency_tol)
    << "eigenvalues: " << dec.size() << "\n"
    << "zero_tol: " << fmt(dec.zero_tol) << "\n"
    << "eig_tol: " << fmt(c.eig_tol) << "\n"
    << "scaling: " << to_string(dec.scaling) << "\n";
  if (dec.amplitudes) r << "amplitude_residual: " << fmt(dec.amplitude_residual) << "\n";
  r << "dt: " << fmt(dt) << "\n"
    << "m_weight: " << c.m_weight << "\n";
  for (const auto& w : dec.warnings) r << "warning: " << w << "\n";
  r << suggestion(cr, c.data);
  write_text(join(c.out, "report.txt"), r.str());
  return 0;
}

int cmd_check(const DmdCli& c) {
  validate_data(c.data, "exact");
  const SnapshotPairs pairs = load_pairs(c.data);
  const ConsistencyReport cr = linear_consistency(pairs, c.consistency_tol, c.rank.policy());
  std::ostringstream r;
  r << "command: check\n"
    << "pairing: " << c.data.pairing << "\n"
    << "provenance: " << to_string(pairs.provenance) << "\n"
    << "state_dim: " << pairs.state_dim() << "\n"
    << "pairs: " << pairs.count() << "\n"
    << "rank: " << cr.rank << "\n"
    << consistency_lines(cr, c.consistency_tol) << suggestion(cr, c.data);
  std::cout << r.str();
  if (c.out != ".") {
    ensure_dir(c.out);
    write_text(join(c.out, "report.txt"), r.str());
  }
  return 0;
}

struct EraCli {
  std::string input;
  bool header = false;
  long inputs = 1;
  long stride = 1;
  std::optional<long> m_o;
  std::string order = "full";
  RankOptions rank;
  std::string out = ".";
};

int cmd_era(const EraCli& c) {
  const Eigen::MatrixXd h = io::read_csv(c.input, c.header);
  const Eigen::Index p = c.inputs, q = h.rows();
  if (h.cols() % p != 0)
    throw Error(ErrorCategory::dimension, "era: column count " + std::to_string(h.cols()) +
                                              " is not a multiple of --inputs " +
                                              std::to_string(p));
  std::vector<Matrix> response;
  for (Eigen::Index k = 0; k < h.cols() / p; ++k)
    response.push_back(h.middleCols(k * p, p).cast<Complex>());
  const MarkovSequence seq = markov_from_response(response, c.stride);
  const Eigen::Index m = seq.size();
  const Eigen::Index m_o = c.m_o.value_or(default_m_o(m));
  if (m_o < 0 || m_o > m - 1)
    throw UsageError("--m-o must lie in [0, " + std::to_string(m - 1) + "]");
  const HankelPair hp = build_hankel(seq, m - 1 - m_o, m_o);
  std::optional<Eigen::Index> order;
  if (c.order != "full") {
    try {
      std::size_t used = 0;
      order = std::stol(c.order, &used);
      if (used != c.order.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--order must be 'full' or a positive integer");
    }
  }
  const EraRealization era = era_realize(hp, order, p, q, std::nullopt, c.rank.policy());
  const EigenPairs poles = eig_dense(era.a_r);

  // Poles in canonical order: descending |lambda|, then ascending arg.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(poles.values.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<Eigen::Index>(k);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const Complex la = poles.values(a), lb = poles.values(b);
    if (std::abs(la) != std::abs(lb)) return std::abs(la) > std::abs(lb);
    return std::arg(la) < std::arg(lb);
  });
  Eigen::MatrixXd table(poles.values.size(), 3);
  for (Eigen::Index k = 0; k < table.rows(); ++k) {
    const Complex l = poles.values(idx[static_cast<std::size_t>(k)]);
    table(k, 0) = l.real();
    table(k, 1) = l.imag();
    table(k, 2) = std::abs(l);
  }

  ensure_dir(c.out);
  io::write_csv(join(c.out, "poles.csv"), table, {"re", "im", "abs"});
  io::write_csv(join(c.out, "hankel.csv"), era.hankel.real());
  io::write_csv(join(c.out, "hankel_shifted.csv"), era.hankel_shifted.real());
  io::write_complex_csv(join(c.out, "a_r.csv"), era.a_r);
  io::write_complex_csv(join(c.out, "b_r.csv"), era.b_r);
  io::write_complex_csv(join(c.out, "c_r.csv"), era.c_r);
  io::write_complex_csv(join(c.out, "d_r.csv"), era.d_r);
  std::ostringstream r;
  r << "command: era\n"
    << "markov_parameters: " << m << "\n"
    << "inputs: " << p << "\n"
    << "outputs: " << q << "\n"
    << "stride: " << c.stride << "\n"
    << "m_c: " << era.m_c << "\n"
    << "m_o: " << era.m_o << "\n"
    << "order: " << era.order << "\n"
    << svd_lines(era.svd_of_h);
  write_text(join(c.out, "report.txt"), r.str());
  return 0;
}

struct LimCli {
  DataOptions data;
  RankOptions rank;
  bool force = false;
  double tol = 1e-10;
  std::string out = ".";
};

int cmd_lim(const LimCli& c) {
  validate_data(c.data, "exact");
  const SnapshotPairs pairs = load_pairs(c.data);
  LimOptions opts;
  opts.rank = c.rank.policy();
  opts.force = c.force;
  const LimModel model = fit_lim(pairs, opts);
  const LimDmdReport rep = lim_dmd_equivalence(pairs, opts, c.tol);
  ensure_dir(c.out);
  io::write_complex_csv(join(c.out, "green.csv"), model.green);
  io::write_complex_csv(join(c.out, "a_tilde.csv"), rep.a_tilde);
  io::write_complex_csv(join(c.out, "eofs.csv"), model.coeffs.eofs());
  std::ostringstream r;
  r << "command: lim\n"
    << "mean: " << c.data.mean << "\n"
    << "state_dim: " << pairs.state_dim() << "\n"
    << "pairs: " << pairs.count() << "\n"
    << svd_lines(model.coeffs.svd)
    << "max_abs_green_minus_a_tilde: " << fmt(rep.max_abs_diff) << "\n"
    << "a_tilde_norm: " << fmt(rep.a_tilde_norm) << "\n"
    << "equivalence_tol: " << fmt(c.tol) << "\n"
    << "equivalent: " << (rep.equivalent ? "yes" : "no") << "\n";
  write_text(join(c.out, "report.txt"), r.str());
  return 0;
}

struct GenCli {
  std::string kind;
  std::uint64_t seed = 0;
  long steps = 100;
  double lambda = 0.5;
  double sigma2 = 10.0;
  double z0 = 0.0;
  double theta = 0.7853981633974483;
  std::vector<double> q{1.0};
  long n = 4;
  double bound = 0.95;
  double f_fast = 0.13, f_slow = 0.02;
  double decay_fast = 0.0, decay_slow = 0.0;
  double fast_amplitude = 1.0, slow_amplitude = 1.0;
  double dt = 1.0;
  double radius = 1.0;
  double noise_sd = 0.0;
  std::string out = "-";
  std::optional<std::string> truth;
};

int cmd_gen(const GenCli& c) {
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(c.q.data(),
                                                              static_cast<Eigen::Index>(c.q.size()));
  Eigen::MatrixXd z;
  std::optional<Vector> truth;
  if (c.kind == "ar1") {
    z = gen_ar1(c.lambda, c.sigma2, c.steps, c.seed, c.z0);
  } else if (c.kind == "standing-wave") {
    z = gen_standing_wave(c.theta, q, c.steps);
  } else if (c.kind == "planar-rotation") {
    z = gen_planar_rotation(c.theta, q, c.steps);
    truth = Vector(2);
    (*truth) << std::polar(1.0, c.theta), std::polar(1.0, -c.theta);
  } else if (c.kind == "random-linear") {
    auto sys = gen_random_linear(c.n, c.steps, c.bound, c.seed);
    z = std::move(sys.snapshots);
    truth = sys.eigenvalues;
  } else if (c.kind == "two-timescale") {
    TwoTimescaleSpec spec;
    spec.f_fast = c.f_fast;
    spec.f_slow = c.f_slow;
    spec.decay_fast = c.decay_fast;
    spec.decay_slow = c.decay_slow;
    spec.fast_amplitude = c.fast_amplitude;
    spec.slow_amplitude = c.slow_amplitude;
    spec.n = c.n;
    spec.steps = c.steps;
    spec.dt = c.dt;
    z = gen_two_timescale(spec, c.seed);
    truth = two_timescale_eigenvalues(spec);
  } else {
    z = gen_noisy_rotation(c.theta, c.radius, c.noise_sd, c.steps, c.seed);
    truth = Vector(2);
    (*truth) << std::polar(c.radius, c.theta), std::polar(c.radius, -c.theta);
  }
  if (c.out == "-") {
    io::write_rows(std::cout, z);
  } else {
    io::write_csv(c.out, z);
  }
  if (c.truth) {
    if (!truth) throw UsageError("--truth is not available for --kind " + c.kind);
    Eigen::MatrixXd t(truth->size(), 2);
    t.col(0) = truth->real();
    t.col(1) = truth->imag();
    io::write_csv(*c.truth, t, {"re", "im"});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dmdkit: dynamic mode decomposition on snapshot CSV files"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 1 unexpected, 2 usage/flag conflict, 3 parse, 4 dimension, "
      "5 rank-zero, 6 precondition, 7 numerical, 8 io.");

  DmdCli dmd;
  auto* s_dmd = app.add_subcommand("dmd", "Eigenvalues, modes and spectrum of A = Y X^+");
  add_data_options(s_dmd, dmd.data);
  add_rank_options(s_dmd, dmd.rank);
  s_dmd->add_option("--algorithm", dmd.algorithm, "exact, projected, qr or sequential")
      ->check(CLI::IsMember({"exact", "projected", "qr", "sequential"}))
      ->capture_default_str();
  s_dmd->add_option("--zero-tol", dmd.zero_tol,
                    "Drop eigenvalues with |lambda| at or below this (default r*eps*||A~||_F)");
  s_dmd->add_flag("--include-zero-modes", dmd.include_zero_modes, "Keep zero-eigenvalue modes");
  s_dmd->add_option("--eig-tol", dmd.eig_tol, "Relative eigen-residual bound")
      ->capture_default_str();
  s_dmd->add_option("--consistency-tol", dmd.consistency_tol,
                    "Defect at or below which data count as linearly consistent")
      ->capture_default_str();
  s_dmd->add_option("--scaling", dmd.scaling, "Mode scaling")
      ->check(CLI::IsMember({"none", "unit", "biorthogonal", "amplitude-qr", "amplitude-gram"}))
      ->capture_default_str();
  s_dmd->add_option("--amplitude-target", dmd.amplitude_target,
                    "y0 solves Phi Lambda d = y_0, x0 solves Phi d = x_0")
      ->check(CLI::IsMember({"y0", "x0"}))
      ->capture_default_str();
  s_dmd->add_option("--m-weight", dmd.m_weight, "Exponent k in the weighted norm ||phi|| |lambda|^k")
      ->capture_default_str();
  s_dmd->add_option("-o,--out", dmd.out, "Output directory")->capture_default_str();

  DmdCli chk;
  auto* s_check = app.add_subcommand("check", "Linear-consistency diagnosis of the data");
  add_data_options(s_check, chk.data);
  add_rank_options(s_check, chk.rank);
  s_check->add_option("--consistency-tol", chk.consistency_tol, "Defect tolerance")
      ->capture_default_str();
  s_check->add_option("-o,--out", chk.out, "Also write report.txt here");

  EraCli era;
  auto* s_era = app.add_subcommand("era", "Eigensystem realization from Markov parameters");
  s_era->add_option("-i,--input", era.input,
                    "Impulse response CSV: q rows, p columns per time step, steps side by side")
      ->required();
  s_era->add_flag("--header", era.header, "Input starts with a header row");
  s_era->add_option("--inputs", era.inputs, "Number of inputs p")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_era->add_option("--stride", era.stride, "Markov parameter spacing P")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_era->add_option("--m-o", era.m_o, "Block rows minus one (default floor((m-1)/2))");
  s_era->add_option("--order", era.order, "Realization order r, or 'full'")->capture_default_str();
  add_rank_options(s_era, era.rank);
  s_era->add_option("-o,--out", era.out, "Output directory")->capture_default_str();

  LimCli lim;
  lim.data.mean = "x";
  auto* s_lim = app.add_subcommand("lim", "Linear inverse model G(tau) and its equality with A~");
  add_data_options(s_lim, lim.data);
  add_rank_options(s_lim, lim.rank);
  s_lim->add_flag("--force", lim.force, "Skip the centering check");
  s_lim->add_option("--equivalence-tol", lim.tol, "Relative bound on max|G - A~|")
      ->capture_default_str();
  s_lim->add_option("-o,--out", lim.out, "Output directory")->capture_default_str();

  GenCli gen;
  auto* s_gen = app.add_subcommand("gen", "Synthetic snapshot data");
  s_gen->add_option("--kind", gen.kind, "Generator")
      ->required()
      ->check(CLI::IsMember({"ar1", "standing-wave", "planar-rotation", "random-linear",
                             "two-timescale", "noisy-rotation"}));
  s_gen->add_option("--seed", gen.seed, "RNG seed (mt19937_64 + Box-Muller)")->capture_default_str();
  s_gen->add_option("--steps", gen.steps, "Number of steps m (m+1 snapshots)")->capture_default_str();
  s_gen->add_option("--lambda", gen.lambda, "ar1 decay rate")->capture_default_str();
  s_gen->add_option("--sigma2", gen.sigma2, "ar1 noise variance")->capture_default_str();
  s_gen->add_option("--z0", gen.z0, "ar1 initial value")->capture_default_str();
  s_gen->add_option("--theta", gen.theta, "Rotation angle per step")->capture_default_str();
  s_gen->add_option("--q", gen.q, "Spatial vector, comma separated")->delimiter(',');
  s_gen->add_option("--n", gen.n, "State dimension")->capture_default_str();
  s_gen->add_option("--bound", gen.bound, "Spectral radius bound")->capture_default_str();
  s_gen->add_option("--f-fast", gen.f_fast, "Fast frequency")->capture_default_str();
  s_gen->add_option("--f-slow", gen.f_slow, "Slow frequency")->capture_default_str();
  s_gen->add_option("--decay-fast", gen.decay_fast, "Fast growth rate")->capture_default_str();
  s_gen->add_option("--decay-slow", gen.decay_slow, "Slow growth rate")->capture_default_str();
  s_gen->add_option("--fast-amplitude", gen.fast_amplitude, "Fast amplitude")->capture_default_str();
  s_gen->add_option("--slow-amplitude", gen.slow_amplitude, "Slow amplitude")->capture_default_str();
  s_gen->add_option("--dt", gen.dt, "Sampling interval")->capture_default_str();
  s_gen->add_option("--radius", gen.radius, "noisy-rotation eigenvalue modulus")->capture_default_str();
  s_gen->add_option("--noise-sd", gen.noise_sd, "noisy-rotation process noise")->capture_default_str();
  s_gen->add_option("-o,--out", gen.out, "Output CSV ('-' for stdout)")->capture_default_str();
  s_gen->add_option("--truth", gen.truth, "Also write the known eigenvalues here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (s_dmd->parsed()) return cmd_dmd(dmd);
    if (s_check->parsed()) return cmd_check(chk);
    if (s_era->parsed()) return cmd_era(era);
    if (s_lim->parsed()) return cmd_lim(lim);
    if (s_gen->parsed()) return cmd_gen(gen);
  } catch (const UsageError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
