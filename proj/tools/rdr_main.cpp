// Command line front door: seeded, file-driven access to the adaptive
// factorization, model fitting, projection, dataset simulation, and the
// packaged experiments.  Every run writes a JSON report whose "config"
// object echoes the full parameter set, so any output can be regenerated
// from its report alone.  Wall-clock times go to stderr only, keeping the
// output files byte-identical across reruns with the same seed.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdr/io.hpp"
#include "rdr/lpp.hpp"
#include "rdr/matrix.hpp"
#include "rdr/reproduce.hpp"
#include "rdr/rng.hpp"
#include "rdr/rsvd.hpp"
#include "rdr/sdr.hpp"
#include "rdr/select.hpp"
#include "rdr/simgen.hpp"

namespace {

using nlohmann::ordered_json;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::invalid_argument(dir + ": cannot create output directory");
}

void write_json(const std::string& path, const ordered_json& j) {
  rdr::write_text_file(path, j.dump(2) + "\n");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Labeled report table (header row + string cells), distinct from the
// headerless numeric matrix exchange format.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) text += ',';
    text += header[c];
  }
  text += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      text += row[c];
    }
    text += '\n';
  }
  rdr::write_text_file(path, text);
}

ordered_json matrix_json(const rdr::Matrix& m) {
  return ordered_json{
      {"rows", m.rows()}, {"cols", m.cols()}, {"data", rdr::encode_matrix_payload(m)}};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// svd

struct SvdArgs {
  std::string input, out;
  std::size_t d_max = 0;  // 0: as large as the data allows
  std::size_t t_max = 10;
  std::size_t delta = 10;
  std::uint64_t seed = 0;
};

void cmd_svd(const SvdArgs& a) {
  const rdr::Matrix x = rdr::read_csv_matrix(a.input);
  rdr::AdaptiveOptions opts;
  opts.d_max = a.d_max;
  opts.t_max = a.t_max;
  opts.delta = a.delta;
  const rdr::RngStream master(a.seed);
  rdr::RngStream svd_rng = master.derive("svd");
  rdr::AdaptiveSvdDiagnostics diag;
  const rdr::TruncatedSVD f = rdr::adaptive_randomized_svd(x, opts, svd_rng, &diag);

  // The main path selects (t*, d*) by holdout, which leaves no stability
  // profile; compute one at the chosen t so the report always carries both
  // curves.  The extra pass uses its own derived stream, so it cannot
  // perturb the factorization.
  if (diag.stability_scores.empty() && diag.d_max_used >= 4) {
    const rdr::Matrix working = x.rows() > x.cols() ? rdr::transpose(x) : x;
    rdr::RngStream stab_rng = master.derive("report-stability");
    diag.stability_scores =
        rdr::stability_scores(working, static_cast<std::size_t>(f.power_iters),
                              diag.d_max_used, opts.num_projections, stab_rng)
            .scores;
  }

  ensure_dir(a.out);
  rdr::write_csv_matrix(join(a.out, "u.csv"), f.u);
  rdr::write_csv_vector(join(a.out, "s.csv"), f.s);
  rdr::write_csv_matrix(join(a.out, "v.csv"), f.v);

  ordered_json bicv = ordered_json::array();
  for (const auto& rep : diag.bicv) {
    bicv.push_back(ordered_json{
        {"t", rep.t}, {"holdout_error", rep.bicv_error}, {"d_hat", rep.d_hat}});
  }
  write_json(join(a.out, "report.json"),
             ordered_json{{"command", "svd"},
                          {"config",
                           ordered_json{{"input", a.input},
                                        {"d_max", a.d_max},
                                        {"t_max", a.t_max},
                                        {"delta", a.delta},
                                        {"seed", a.seed},
                                        {"out", a.out}}},
                          {"rows", x.rows()},
                          {"cols", x.cols()},
                          {"d_star", f.rank_est},
                          {"t_star", f.power_iters},
                          {"d_max_used", diag.d_max_used},
                          {"bicv_curve", bicv},
                          {"stability_scores", diag.stability_scores}});
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string method, x_path, y_path, out;
  std::size_t num_slices = 10;
  std::size_t k = 10;
  double bandwidth = 0.0;  // 0: median kNN edge distance
  std::size_t r = 0;       // 0: keep the estimated rank
  std::string mode = "exact";
  bool categorical = false;
  std::size_t d_max = 0;
  std::size_t t_max = 10;
  std::size_t delta = 10;
  std::size_t fixed_t = 0;  // 0: selected by holdout
  std::size_t fixed_d = 0;  // 0: selected from the data
  std::uint64_t seed = 0;
};

void cmd_fit(const FitArgs& a) {
  const bool needs_y = a.method == "sir" || a.method == "lsir";
  if (needs_y && a.y_path.empty()) {
    throw std::invalid_argument("method '" + a.method + "' requires a response file (--y)");
  }
  const rdr::Matrix x = rdr::read_csv_matrix(a.x_path);
  std::vector<double> y;
  if (!a.y_path.empty()) y = rdr::read_csv_vector(a.y_path);

  rdr::FitOptions opts;
  opts.r = a.r;
  opts.categorical_response = a.categorical;
  if (a.mode == "randomized") {
    opts.mode = rdr::FitMode::kRandomized;
  } else if (a.mode != "exact") {
    throw std::invalid_argument("mode must be 'exact' or 'randomized', got '" + a.mode + "'");
  }
  opts.adaptive.d_max = a.d_max;
  opts.adaptive.t_max = a.t_max;
  opts.adaptive.delta = a.delta;
  if (a.fixed_t != 0) opts.adaptive.fixed_t = a.fixed_t;
  if (a.fixed_d != 0) opts.adaptive.fixed_d = a.fixed_d;

  const rdr::RngStream master(a.seed);
  rdr::RngStream fit_rng = master.derive("fit");
  rdr::EdrModel model;
  if (a.method == "pca") {
    model = rdr::fit_pca(x, opts, fit_rng);
  } else if (a.method == "sir") {
    model = rdr::fit_sir(x, y, a.num_slices, opts, fit_rng);
  } else if (a.method == "lsir") {
    model = rdr::fit_lsir(x, y, a.num_slices, a.k, opts, fit_rng);
  } else if (a.method == "lpp") {
    model = rdr::fit_lpp(x, a.k, a.bandwidth, opts, fit_rng);
  } else {
    throw std::invalid_argument("unknown method '" + a.method + "'");
  }

  ensure_dir(a.out);
  rdr::save_model(join(a.out, "model.json"), model);
  write_json(join(a.out, "report.json"),
             ordered_json{{"command", "fit"},
                          {"config",
                           ordered_json{{"method", a.method},
                                        {"x", a.x_path},
                                        {"y", a.y_path},
                                        {"num_slices", a.num_slices},
                                        {"k", a.k},
                                        {"bandwidth", a.bandwidth},
                                        {"r", a.r},
                                        {"mode", a.mode},
                                        {"categorical", a.categorical},
                                        {"d_max", a.d_max},
                                        {"t_max", a.t_max},
                                        {"delta", a.delta},
                                        {"fixed_t", a.fixed_t},
                                        {"fixed_d", a.fixed_d},
                                        {"seed", a.seed},
                                        {"out", a.out}}},
                          {"rows", x.rows()},
                          {"cols", x.cols()},
                          {"r", model.r},
                          {"d_star", model.d_star},
                          {"t_star", model.t_star}});
}

// ---------------------------------------------------------------------------
// transform

struct TransformArgs {
  std::string model_path, x_path, out;
  std::string centering = "train";
};

void cmd_transform(const TransformArgs& a) {
  const rdr::EdrModel model = rdr::load_model(a.model_path);
  const rdr::Matrix x = rdr::read_csv_matrix(a.x_path);
  rdr::TransformCentering centering;
  if (a.centering == "train") {
    centering = rdr::TransformCentering::kTrain;
  } else if (a.centering == "self") {
    centering = rdr::TransformCentering::kSelf;
  } else {
    throw std::invalid_argument("centering must be 'train' or 'self', got '" +
                                a.centering + "'");
  }
  const rdr::Matrix z = rdr::transform(model, x, centering);
  ensure_dir(a.out);
  rdr::write_csv_matrix(join(a.out, "z.csv"), z);
  write_json(join(a.out, "report.json"),
             ordered_json{{"command", "transform"},
                          {"config",
                           ordered_json{{"model", a.model_path},
                                        {"x", a.x_path},
                                        {"centering", a.centering},
                                        {"out", a.out}}},
                          {"rows", z.rows()},
                          {"cols", z.cols()},
                          {"method", rdr::method_name(model.method)}});
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string family, out;
  std::size_t n = 0, p = 0, d_star = 0;
  double kappa = 1.0;
  double sigma = 1.0;
  double pi = 0.5;
  double s2n_lo = 0.3, s2n_hi = 0.6;
  std::uint64_t seed = 0;
};

void cmd_simulate(const SimulateArgs& a) {
  const rdr::RngStream master(a.seed);
  rdr::RngStream sim_rng = master.derive("simulate").derive(a.family);
  const rdr::SimDataset ds = [&]() -> rdr::SimDataset {
    if (a.family == "lowrank") return rdr::gen_lowrank_noise(a.n, a.p, a.d_star, a.kappa, sim_rng);
    if (a.family == "xor") return rdr::gen_xor(a.n, a.p, a.d_star, a.sigma, a.pi, sim_rng);
    if (a.family == "latent")
      return rdr::gen_latent_factor(a.n, a.p, a.d_star, a.s2n_lo, a.s2n_hi, sim_rng);
    throw std::invalid_argument("unknown family '" + a.family + "'");
  }();
  ordered_json truth;
  if (a.family == "lowrank") {
    const auto& t = std::get<rdr::LowRankTruth>(ds.truth);
    truth = ordered_json{{"family", "lowrank"},
                         {"d_star", t.d_star},
                         {"singular_values", t.s},
                         {"u", matrix_json(t.u)},
                         {"v", matrix_json(t.v)}};
  } else if (a.family == "xor") {
    const auto& t = std::get<rdr::XorTruth>(ds.truth);
    truth = ordered_json{{"family", "xor"},
                         {"d_star", t.d_star},
                         {"sigma", t.sigma},
                         {"pi", t.pi},
                         {"cluster_patterns", t.cluster}};
  } else {
    const auto& t = std::get<rdr::LatentFactorTruth>(ds.truth);
    truth = ordered_json{{"family", "latent"},
                         {"d_star", t.d_star},
                         {"basis", matrix_json(t.basis)},
                         {"scales", t.s},
                         {"theta", t.theta},
                         {"b_true", t.b_true},
                         {"psi2", t.psi2},
                         {"tau2", t.tau2},
                         {"s2n_x", t.s2n_x},
                         {"s2n_y", t.s2n_y}};
  }

  ensure_dir(a.out);
  rdr::write_csv_matrix(join(a.out, "x.csv"), ds.x);
  const bool has_y = a.family != "lowrank";
  if (has_y) rdr::write_csv_vector(join(a.out, "y.csv"), ds.y);
  write_json(join(a.out, "truth.json"), truth);
  write_json(join(a.out, "report.json"),
             ordered_json{{"command", "simulate"},
                          {"config",
                           ordered_json{{"family", a.family},
                                        {"n", a.n},
                                        {"p", a.p},
                                        {"d_star", a.d_star},
                                        {"kappa", a.kappa},
                                        {"sigma", a.sigma},
                                        {"pi", a.pi},
                                        {"s2n_lo", a.s2n_lo},
                                        {"s2n_hi", a.s2n_hi},
                                        {"seed", a.seed},
                                        {"out", a.out}}},
                          {"files",
                           has_y ? std::vector<std::string>{"x.csv", "y.csv", "truth.json"}
                                 : std::vector<std::string>{"x.csv", "truth.json"}}});
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceArgs {
  std::string experiment, out;
  std::string scale = "desk";
  std::uint64_t seed = 0;
};

ordered_json reproduce_config(const ReproduceArgs& a) {
  return ordered_json{{"experiment", a.experiment},
                      {"scale", a.scale},
                      {"seed", a.seed},
                      {"out", a.out}};
}

void reproduce_table1(const ReproduceArgs& a, bool full) {
  const auto res = rdr::run_sv_accuracy(rdr::sv_accuracy_settings(full), a.seed);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t ti = 0; ti < res.settings.t_values.size(); ++ti) {
    rows.push_back({std::to_string(res.settings.t_values[ti]),
                    num(res.mean_pct_error[ti]), num(res.se_pct_error[ti])});
  }
  write_table(join(a.out, "table.csv"), {"t", "mean_pct_error", "se_pct_error"}, rows);
  write_json(join(a.out, "report.json"),
             ordered_json{{"command", "reproduce"},
                          {"config", reproduce_config(a)},
                          {"settings",
                           ordered_json{{"n", res.settings.n},
                                        {"p", res.settings.p},
                                        {"d_star", res.settings.d_star},
                                        {"replicates", res.settings.replicates},
                                        {"kappa", res.settings.kappa},
                                        {"delta", res.settings.delta},
                                        {"t_values", res.settings.t_values}}},
                          {"mean_pct_error", res.mean_pct_error},
                          {"se_pct_error", res.se_pct_error},
                          {"pct_error", res.pct_error}});
}

void reproduce_rank_t(const ReproduceArgs& a, bool full) {
  std::vector<std::vector<std::string>> rows;
  ordered_json per_kappa = ordered_json::array();
  for (const double kappa : {1.0, 2.0}) {
    const auto res =
        rdr::run_rank_estimation(rdr::rank_estimation_settings(full, kappa), a.seed);
    std::size_t within2 = 0;
    std::vector<double> t_values;
    for (std::size_t rep = 0; rep < res.d_true.size(); ++rep) {
      const auto d_true = static_cast<double>(res.d_true[rep]);
      const auto d_hat = static_cast<double>(res.d_hat[rep]);
      if (std::abs(d_hat - d_true) <= 2.0) ++within2;
      t_values.push_back(static_cast<double>(res.t_hat[rep]));
      rows.push_back({num(kappa), std::to_string(rep), std::to_string(res.d_true[rep]),
                      std::to_string(res.d_hat[rep]), std::to_string(res.t_hat[rep])});
    }
    per_kappa.push_back(ordered_json{
        {"kappa", kappa},
        {"settings",
         ordered_json{{"n", res.settings.n},
                      {"p", res.settings.p},
                      {"replicates", res.settings.replicates},
                      {"d_min", res.settings.d_min},
                      {"d_max_true", res.settings.d_max_true},
                      {"d_cap_margin", res.settings.d_cap_margin}}},
        {"d_true", res.d_true},
        {"d_hat", res.d_hat},
        {"t_hat", res.t_hat},
        {"frac_within_2", static_cast<double>(within2) / static_cast<double>(res.d_true.size())},
        {"median_t", median_of(t_values)}});
  }
  write_table(join(a.out, "table.csv"), {"kappa", "replicate", "d_true", "d_hat", "t_hat"},
              rows);
  write_json(join(a.out, "report.json"), ordered_json{{"command", "reproduce"},
                                                      {"config", reproduce_config(a)},
                                                      {"results", per_kappa}});
}

void reproduce_xor(const ReproduceArgs& a, bool full) {
  const auto res = rdr::run_xor_sweep(rdr::xor_sweep_settings(full), a.seed);
  std::vector<std::vector<std::string>> rows;
  ordered_json table = ordered_json::array();
  for (std::size_t si = 0; si < res.settings.sigmas.size(); ++si) {
    for (std::size_t mi = 0; mi < res.methods.size(); ++mi) {
      rows.push_back({num(res.settings.sigmas[si]), res.methods[mi],
                      num(res.mean_accuracy[si][mi]),
                      num(rdr::standard_error_of(res.accuracy[si][mi]))});
      table.push_back(ordered_json{{"sigma", res.settings.sigmas[si]},
                                   {"method", res.methods[mi]},
                                   {"accuracy", res.accuracy[si][mi]}});
    }
  }
  write_table(join(a.out, "table.csv"), {"sigma", "method", "mean_accuracy", "se_accuracy"},
              rows);
  write_json(join(a.out, "report.json"),
             ordered_json{{"command", "reproduce"},
                          {"config", reproduce_config(a)},
                          {"settings",
                           ordered_json{{"n_train", res.settings.n_train},
                                        {"n_test", res.settings.n_test},
                                        {"p", res.settings.p},
                                        {"d_star", res.settings.d_star},
                                        {"replicates", res.settings.replicates},
                                        {"pi", res.settings.pi},
                                        {"sigmas", res.settings.sigmas},
                                        {"r", res.settings.r},
                                        {"smoother_class_fraction",
                                         res.settings.smoother_class_fraction},
                                        {"knn_lo_fraction", res.settings.knn_lo_fraction},
                                        {"knn_hi_fraction", res.settings.knn_hi_fraction},
                                        {"knn_step", res.settings.knn_step}}},
                          {"results", table}});
}

void reproduce_latent(const ReproduceArgs& a, bool full, bool p_large) {
  std::vector<std::vector<std::string>> rows;
  ordered_json bands = ordered_json::array();
  for (const bool strong : {false, true}) {
    const auto res = rdr::run_latent_factor(
        rdr::latent_factor_settings(full, p_large, strong), a.seed);
    const std::string band = strong ? "strong" : "weak";
    ordered_json methods = ordered_json::array();
    for (std::size_t mi = 0; mi < res.methods.size(); ++mi) {
      rows.push_back({band, res.methods[mi], num(res.mean_r2[mi]), num(res.se_r2[mi]),
                      num(res.mean_mspe[mi]), num(res.se_mspe[mi]), num(res.mean_aedr[mi]),
                      num(res.se_aedr[mi])});
      methods.push_back(ordered_json{{"method", res.methods[mi]},
                                     {"r2", res.r2[mi]},
                                     {"mspe", res.mspe[mi]},
                                     {"aedr", res.aedr[mi]}});
    }
    bands.push_back(ordered_json{{"signal", band},
                                 {"settings",
                                  ordered_json{{"n", res.settings.n},
                                               {"p", res.settings.p},
                                               {"replicates", res.settings.replicates},
                                               {"num_slices", res.settings.num_slices},
                                               {"smoother_k", res.settings.smoother_k},
                                               {"r", res.settings.r},
                                               {"s2n_lo", res.settings.s2n_lo},
                                               {"s2n_hi", res.settings.s2n_hi}}},
                                 {"methods", methods}});
  }
  write_table(
      join(a.out, "table.csv"),
      {"signal", "method", "mean_r2", "se_r2", "mean_mspe", "se_mspe", "mean_aedr", "se_aedr"},
      rows);
  write_json(join(a.out, "report.json"), ordered_json{{"command", "reproduce"},
                                                      {"config", reproduce_config(a)},
                                                      {"results", bands}});
}

void cmd_reproduce(const ReproduceArgs& a) {
  bool full = false;
  if (a.scale == "full") {
    full = true;
  } else if (a.scale != "desk") {
    throw std::invalid_argument("scale must be 'desk' or 'full', got '" + a.scale + "'");
  }
  ensure_dir(a.out);
  if (a.experiment == "table1") {
    reproduce_table1(a, full);
  } else if (a.experiment == "rank-t") {
    reproduce_rank_t(a, full);
  } else if (a.experiment == "xor") {
    reproduce_xor(a, full);
  } else if (a.experiment == "latent-nlarge") {
    reproduce_latent(a, full, /*p_large=*/false);
  } else if (a.experiment == "latent-plarge") {
    reproduce_latent(a, full, /*p_large=*/true);
  } else {
    throw std::invalid_argument("unknown experiment '" + a.experiment + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized dimension reduction toolkit"};
  app.require_subcommand(1);

  SvdArgs svd;
  CLI::App* svd_cmd = app.add_subcommand("svd", "Adaptive randomized factorization of a CSV matrix");
  svd_cmd->add_option("--input", svd.input, "Input matrix CSV")->required();
  svd_cmd->add_option("--d-max", svd.d_max, "Rank search cap (0: widest supported)");
  svd_cmd->add_option("--t-max", svd.t_max, "Largest iteration count considered");
  svd_cmd->add_option("--delta", svd.delta, "Oversampling margin");
  svd_cmd->add_option("--seed", svd.seed, "Master seed");
  svd_cmd->add_option("--out", svd.out, "Output directory")->required();

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a dimension reduction model");
  fit_cmd->add_option("--method", fit.method, "pca, sir, lsir, or lpp")->required();
  fit_cmd->add_option("--x", fit.x_path, "Training matrix CSV")->required();
  fit_cmd->add_option("--y", fit.y_path, "Response CSV (required for sir/lsir)");
  fit_cmd->add_option("--num-slices", fit.num_slices, "Response slices (H)");
  fit_cmd->add_option("--k", fit.k, "Neighbor count (lsir smoothing, lpp graph)");
  fit_cmd->add_option("--bandwidth", fit.bandwidth, "Heat kernel bandwidth (lpp; 0: median edge)");
  fit_cmd->add_option("--r", fit.r, "Directions to keep (0: estimated rank)");
  fit_cmd->add_option("--mode", fit.mode, "exact or randomized");
  fit_cmd->add_flag("--categorical", fit.categorical, "Treat the response as class labels");
  fit_cmd->add_option("--d-max", fit.d_max, "Rank search cap (randomized mode)");
  fit_cmd->add_option("--t-max", fit.t_max, "Largest iteration count (randomized mode)");
  fit_cmd->add_option("--delta", fit.delta, "Oversampling margin (randomized mode)");
  fit_cmd->add_option("--fixed-t", fit.fixed_t, "Pin the iteration count (0: adaptive)");
  fit_cmd->add_option("--fixed-d", fit.fixed_d, "Pin the factor rank (0: adaptive)");
  fit_cmd->add_option("--seed", fit.seed, "Master seed");
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  TransformArgs tr;
  CLI::App* tr_cmd = app.add_subcommand("transform", "Project new data through a fitted model");
  tr_cmd->add_option("--model", tr.model_path, "Model JSON from 'fit'")->required();
  tr_cmd->add_option("--x", tr.x_path, "Matrix CSV to project")->required();
  tr_cmd->add_option("--centering", tr.centering, "train (training means) or self");
  tr_cmd->add_option("--out", tr.out, "Output directory")->required();

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic dataset");
  sim_cmd->add_option("--family", sim.family, "lowrank, xor, or latent")->required();
  sim_cmd->add_option("--n", sim.n, "Samples")->required();
  sim_cmd->add_option("--p", sim.p, "Ambient dimension")->required();
  sim_cmd->add_option("--d-star", sim.d_star, "Signal dimension (latent: 0 draws 5..20)");
  sim_cmd->add_option("--kappa", sim.kappa, "Noise-floor multiple (lowrank)");
  sim_cmd->add_option("--sigma", sim.sigma, "Coordinate noise level (xor)");
  sim_cmd->add_option("--pi", sim.pi, "Probability of the -2 center (xor)");
  sim_cmd->add_option("--s2n-lo", sim.s2n_lo, "Signal-to-noise lower bound (latent)");
  sim_cmd->add_option("--s2n-hi", sim.s2n_hi, "Signal-to-noise upper bound (latent)");
  sim_cmd->add_option("--seed", sim.seed, "Master seed");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();

  ReproduceArgs rep;
  CLI::App* rep_cmd = app.add_subcommand("reproduce", "Run a packaged experiment");
  rep_cmd->add_option("--experiment", rep.experiment,
                      "table1, rank-t, xor, latent-nlarge, or latent-plarge")
      ->required();
  rep_cmd->add_option("--scale", rep.scale, "desk or full");
  rep_cmd->add_option("--seed", rep.seed, "Master seed");
  rep_cmd->add_option("--out", rep.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (svd_cmd->parsed()) cmd_svd(svd);
    if (fit_cmd->parsed()) cmd_fit(fit);
    if (tr_cmd->parsed()) cmd_transform(tr);
    if (sim_cmd->parsed()) cmd_simulate(sim);
    if (rep_cmd->parsed()) cmd_reproduce(rep);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  std::fprintf(stderr, "wall time: %.2f s\n", wall.count());
  return 0;
}
