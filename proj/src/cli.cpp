#include "hnet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "hnet/autodiff.hpp"
#include "hnet/herglotz.hpp"
#include "hnet/io.hpp"
#include "hnet/network.hpp"
#include "hnet/spectral_verify.hpp"
#include "hnet/training.hpp"

namespace hnet {

using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string manifest;
};

struct ModelOpts {
  std::string model = "hnet";
  std::optional<int> pe;
  std::optional<std::vector<int>> hidden;
  std::optional<double> omega0;

  void add(CLI::App* app) {
    app->add_option("--model", model, "hnet, siren or sphsiren")->check(CLI::IsMember({"hnet", "siren", "sphsiren"}));
    app->add_option("--pe", pe, "PE neurons (hnet, siren) or SH order cap (sphsiren)");
    app->add_option("--hidden", hidden, "hidden widths, comma separated")->delimiter(',');
    app->add_option("--omega0", omega0, "PE scale (first hidden frequency for sphsiren)");
  }

  ModelConfig config() const {
    ModelConfig cfg;
    cfg.kind = model_from_string(model);
    switch (cfg.kind) {
      case ModelKind::Hnet:
        cfg = {cfg.kind, 50, {100, 100, 100}, 10.0};
        break;
      case ModelKind::Siren:
        cfg = {cfg.kind, 100, {100, 100, 100}, 10.0};
        break;
      case ModelKind::SphSiren:
        cfg = {cfg.kind, 10, {100, 100}, 3.0};
        break;
    }
    if (pe) cfg.pe_size = *pe;
    if (hidden) cfg.hidden = *hidden;
    if (omega0) cfg.omega0 = *omega0;
    return cfg;
  }

  json to_json() const {
    const auto cfg = config();
    return {{"model", to_string(cfg.kind)}, {"pe", cfg.pe_size}, {"hidden", cfg.hidden}, {"omega0", cfg.omega0}};
  }
};

GridField real_field(const SHCoeffs& c, const GaussLegendreGrid& grid) {
  GridField f = sht_inverse(c, grid);
  for (auto& v : f.values) v = v.real();
  return f;
}

std::string spectrum_csv_header() { return "# format_version: " + std::to_string(kFormatVersion) + "\n"; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw DataError(path + ": cannot open for writing");
  f << text;
  if (!f) throw DataError(path + ": write failed");
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Herglotz-network fitting and spectral verification on the sphere", "hnet"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--manifest", common.manifest, "manifest path (default: next to the output)");
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::Range(1, 1024));
    sub->add_option("--manifest", common.manifest, "manifest path");
  };

  std::function<json()> action;
  std::string command;
  std::string primary_output;

  // synth
  auto* synth = app.add_subcommand("synth", "random bandlimited field -> coefficient CSV");
  add_common(synth);
  SynthSpec spec;
  std::string synth_out;
  synth->add_option("--L", spec.bandlimit, "bandlimit")->required()->check(CLI::NonNegativeNumber);
  synth->add_option("--p", spec.p, "spectral decay exponent")->check(CLI::NonNegativeNumber);
  synth->add_option("--out", synth_out, "output CSV (default: stdout)");
  synth->callback([&] {
    command = "synth";
    primary_output = synth_out;
    action = [&] {
      spec.seed = common.seed;
      const auto c = synth_field(spec);
      emit(out, synth_out, coeffs_csv(c));
      return json{{"L", spec.bandlimit}, {"p", spec.p}, {"seed", spec.seed}};
    };
  });

  // params
  auto* params = app.add_subcommand("params", "trainable parameter count");
  add_common(params);
  ModelOpts params_model;
  params_model.add(params);
  params->callback([&] {
    command = "params";
    action = [&] {
      const auto n = param_count(make_network(params_model.config()));
      out << n << "\n";
      return params_model.to_json();
    };
  });

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "train a model on a coefficient CSV");
  add_common(fit_cmd);
  ModelOpts fit_model;
  fit_model.add(fit_cmd);
  std::string fit_data, fit_out, fit_loss, fit_metrics;
  std::optional<int> fit_train_l;
  TrainConfig train;
  train.epochs = 500;
  train.batch_size = 64;
  train.learning_rate = 1e-3;
  train.final_learning_rate = 1e-4;
  fit_cmd->add_option("--data", fit_data, "coefficient CSV")->required();
  fit_cmd->add_option("--train-L", fit_train_l, "training grid bandlimit (default: ceil(1.75 L))");
  fit_cmd->add_option("--epochs", train.epochs)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--batch", train.batch_size)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--lr", train.learning_rate)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--lr-final", train.final_learning_rate, "final step size (0: constant)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--out", fit_out, "checkpoint JSON")->required();
  fit_cmd->add_option("--loss", fit_loss, "loss CSV");
  fit_cmd->add_option("--metrics", fit_metrics, "metrics JSON");
  fit_cmd->callback([&] {
    command = "fit";
    primary_output = fit_out;
    action = [&] {
      const SHCoeffs c = read_coeffs_csv(fit_data);
      const int train_l = fit_train_l ? *fit_train_l : (7 * c.bandlimit() + 3) / 4;
      if (train_l < 0) throw UsageError("--train-L must be >= 0");
      const auto cfg = fit_model.config();
      const auto grid = gl_grid(train_l);
      const GridField data = real_field(c, grid);
      train.seed = common.seed;
      const FitResult res = fit(build_network(cfg, common.seed), data, train);
      save_checkpoint(fit_out, {cfg.kind, res.net, res.standardizer, train_l, common.seed});
      if (!fit_loss.empty()) write_loss_csv(fit_loss, res.loss_history);
      const GridField pred = predict_field(res.net, res.standardizer, grid, common.threads);
      double mse = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) mse += std::norm(pred.values[i] - data.values[i]);
      mse /= static_cast<double>(grid.size());
      const json metrics = {{"format_version", kFormatVersion},
                            {"snr_db", snr_db(pred, data)},
                            {"mse", mse},
                            {"epochs", train.epochs},
                            {"seed", common.seed}};
      if (!fit_metrics.empty()) write_json(fit_metrics, metrics);
      out << metrics.dump(2) << "\n";
      json config = fit_model.to_json();
      config.update({{"data_hash", fnv1a(coeffs_csv(c))},
                     {"train_L", train_l},
                     {"epochs", train.epochs},
                     {"batch", train.batch_size},
                     {"lr", train.learning_rate},
                     {"lr_final", train.final_learning_rate}});
      return config;
    };
  });

  // eval and laplacian share their inputs
  struct EvalOpts {
    std::string checkpoint, data, field, heatmap, metrics;
    std::optional<int> grid_l;
  };
  const auto add_eval = [&](CLI::App* sub, EvalOpts& o) {
    add_common(sub);
    sub->add_option("--checkpoint", o.checkpoint, "checkpoint JSON")->required();
    sub->add_option("--data", o.data, "reference coefficient CSV")->required();
    sub->add_option("--grid-L", o.grid_l, "evaluation grid bandlimit (default: training L)");
    sub->add_option("--field", o.field, "field CSV output");
    sub->add_option("--heatmap", o.heatmap, "PPM output");
    sub->add_option("--metrics", o.metrics, "metrics JSON output");
  };
  auto* eval_cmd = app.add_subcommand("eval", "SNR of a checkpoint against a reference field");
  EvalOpts eval_opts;
  add_eval(eval_cmd, eval_opts);
  eval_cmd->callback([&] {
    command = "eval";
    primary_output = eval_opts.metrics;
    action = [&] {
      const Checkpoint ck = load_checkpoint(eval_opts.checkpoint);
      const SHCoeffs c = read_coeffs_csv(eval_opts.data);
      const int grid_l = eval_opts.grid_l ? *eval_opts.grid_l : ck.train_bandlimit;
      if (grid_l < 0) throw UsageError("--grid-L must be >= 0");
      const auto grid = gl_grid(grid_l);
      const GridField truth = real_field(c, grid);
      const GridField pred = predict_field(ck.net, ck.standardizer, grid, common.threads);
      double mse = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) mse += std::norm(pred.values[i] - truth.values[i]);
      mse /= static_cast<double>(grid.size());
      const json metrics = {{"format_version", kFormatVersion},
                            {"snr_db", snr_db(pred, truth)},
                            {"mse", mse},
                            {"grid_L", grid_l},
                            {"train_L", ck.train_bandlimit},
                            {"super_resolution", grid_l > ck.train_bandlimit},
                            {"seed", ck.seed}};
      if (!eval_opts.field.empty()) write_field_csv(eval_opts.field, pred);
      if (!eval_opts.heatmap.empty()) write_heatmap(pred, eval_opts.heatmap);
      if (!eval_opts.metrics.empty()) write_json(eval_opts.metrics, metrics);
      out << metrics.dump(2) << "\n";
      return json{{"checkpoint_hash", fnv1a(read_json(eval_opts.checkpoint).dump())},
                  {"data_hash", fnv1a(coeffs_csv(c))},
                  {"grid_L", grid_l}};
    };
  });

  auto* lap_cmd = app.add_subcommand("laplacian", "autodiff Laplacian of a checkpoint vs the spectral one");
  EvalOpts lap_opts;
  double lap_band = 0.1;
  add_eval(lap_cmd, lap_opts);
  lap_cmd->add_option("--band", lap_band, "polar band fraction for the pole error")->check(CLI::Range(0.0, 0.5));
  lap_cmd->callback([&] {
    command = "laplacian";
    primary_output = lap_opts.metrics;
    action = [&] {
      const Checkpoint ck = load_checkpoint(lap_opts.checkpoint);
      const SHCoeffs c = read_coeffs_csv(lap_opts.data);
      const int grid_l = lap_opts.grid_l ? *lap_opts.grid_l : ck.train_bandlimit;
      if (grid_l < 0) throw UsageError("--grid-L must be >= 0");
      const auto grid = gl_grid(grid_l);
      const GridField truth = real_field(laplacian_spectral(c), grid);
      const GridField lap = laplacian_field(ck.net, ck.standardizer, grid, common.threads);
      const json metrics = {{"format_version", kFormatVersion},
                            {"snr_db", snr_db(lap, truth)},
                            {"pole_band_error", polar_band_error(lap, truth, lap_band)},
                            {"band", lap_band},
                            {"grid_L", grid_l},
                            {"seed", ck.seed}};
      if (!lap_opts.field.empty()) write_field_csv(lap_opts.field, lap);
      if (!lap_opts.heatmap.empty()) write_heatmap(lap, lap_opts.heatmap);
      if (!lap_opts.metrics.empty()) write_json(lap_opts.metrics, metrics);
      out << metrics.dump(2) << "\n";
      return json{{"checkpoint_hash", fnv1a(read_json(lap_opts.checkpoint).dump())},
                  {"data_hash", fnv1a(coeffs_csv(c))},
                  {"grid_L", grid_l},
                  {"band", lap_band}};
    };
  });

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "power spectrum CSV of a checkpoint or a single atom");
  add_common(spec_cmd);
  std::string spec_ckpt, spec_out;
  bool spec_atom = false;
  double atom_omega0 = 10.0, atom_w = 1.0;
  int spec_l = 64;
  spec_cmd->add_option("--checkpoint", spec_ckpt, "checkpoint JSON");
  spec_cmd->add_flag("--atom", spec_atom, "single Herglotz atom with a random unit direction");
  spec_cmd->add_option("--omega0", atom_omega0, "atom scale")->check(CLI::PositiveNumber);
  spec_cmd->add_option("--w", atom_w, "atom |w|")->check(CLI::NonNegativeNumber);
  spec_cmd->add_option("--lmax", spec_l, "largest degree")->check(CLI::Range(1, 512));
  spec_cmd->add_option("--out", spec_out, "output CSV (default: stdout)");
  spec_cmd->callback([&] {
    command = "spectrum";
    primary_output = spec_out;
    if (spec_atom == !spec_ckpt.empty()) throw CLI::ValidationError("give exactly one of --checkpoint and --atom");
    action = [&] {
      std::string csv = spectrum_csv_header();
      json config{{"lmax", spec_l}};
      if (spec_atom) {
        const auto r = verify_spectrum(atom_omega0, atom_w, spec_l, common.seed);
        csv += "l,power,bound\n";
        for (int l = 0; l <= spec_l; ++l) {
          csv += std::to_string(l) + "," + fmt(r.measured[l]) + "," + (l == 0 ? std::string("") : fmt(r.bound[l])) + "\n";
        }
        config.update({{"atom", true}, {"omega0", atom_omega0}, {"w", atom_w}});
      } else {
        const Checkpoint ck = load_checkpoint(spec_ckpt);
        const auto grid = gl_grid(spec_l);
        const auto ps = power_spectrum(sht_forward(predict_field(ck.net, ck.standardizer, grid, common.threads), spec_l));
        csv += "l,power\n";
        for (int l = 0; l <= spec_l; ++l) csv += std::to_string(l) + "," + fmt(ps[l]) + "\n";
        config.update({{"checkpoint_hash", fnv1a(read_json(spec_ckpt).dump())}});
      }
      emit(out, spec_out, csv);
      return config;
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "numerical certification suites");
  verify->require_subcommand(1);
  std::string verify_out;
  const auto add_verify = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--out", verify_out, "report JSON (default: stdout)");
  };
  const auto report = [&](const json& j) { emit(out, verify_out, j.dump(2) + "\n"); };

  auto* v_lemma = verify->add_subcommand("lemma1", "monomials of Herglotz projections are pure degree");
  add_verify(v_lemma);
  int lemma_lmax = 20, lemma_seeds = 50;
  v_lemma->add_option("--lmax", lemma_lmax)->check(CLI::Range(0, 256));
  v_lemma->add_option("--seeds", lemma_seeds)->check(CLI::Range(1, 100000));
  v_lemma->callback([&] {
    command = "verify lemma1";
    primary_output = verify_out;
    action = [&] {
      const auto r = verify_lemma1(lemma_lmax, lemma_seeds, common.seed);
      report({{"format_version", kFormatVersion}, {"lmax", r.lmax}, {"seeds", r.seeds}, {"seed", r.seed},
              {"max_off_degree_energy", r.max_off_degree}, {"max_energy_ratio", r.max_energy_ratio}});
      return json{{"lmax", lemma_lmax}, {"seeds", lemma_seeds}};
    };
  });

  auto* v_thm = verify->add_subcommand("theorem1", "bandlimit of polynomial-activation networks");
  add_verify(v_thm);
  std::optional<int> thm_l0, thm_k, thm_q;
  int thm_seeds = 20;
  v_thm->add_option("--l0", thm_l0)->check(CLI::NonNegativeNumber);
  v_thm->add_option("--k", thm_k)->check(CLI::PositiveNumber);
  v_thm->add_option("--q", thm_q)->check(CLI::PositiveNumber);
  v_thm->add_option("--seeds", thm_seeds)->check(CLI::Range(1, 100000));
  v_thm->callback([&] {
    command = "verify theorem1";
    primary_output = verify_out;
    action = [&] {
      std::vector<int> l0s{1, 2, 3}, ks{1, 2, 3}, qs{2, 3};
      if (thm_l0) l0s = {*thm_l0};
      if (thm_k) ks = {*thm_k};
      if (thm_q) qs = {*thm_q};
      json cases = json::array();
      for (int l0 : l0s)
        for (int k : ks)
          for (int q : qs) {
            const int bound = theorem1_bound(l0, k, q);
            if (bound > 32 && !(thm_l0 && thm_k && thm_q)) continue;
            if (bound > 128) throw UsageError("bound K^(Q-1) L0 = " + std::to_string(bound) + " exceeds 128");
            for (int s = 0; s < thm_seeds; ++s) {
              const auto r = verify_theorem1(l0, k, q, common.seed + static_cast<std::uint64_t>(s));
              cases.push_back({{"l0", r.l0}, {"k", r.k}, {"q", r.q}, {"bound", r.bound},
                               {"off_band_energy", r.off_band_energy}, {"l_work", r.l_work},
                               {"seed", r.seed}, {"top_degree_energy", r.top_degree_energy},
                               {"max_degree", r.max_degree}});
            }
          }
      report({{"format_version", kFormatVersion}, {"cases", cases}});
      return json{{"l0", l0s}, {"k", ks}, {"q", qs}, {"seeds", thm_seeds}};
    };
  });

  auto* v_prod = verify->add_subcommand("product", "bandlimit of products of bandlimited fields");
  add_verify(v_prod);
  int prod_la = 5, prod_lb = 5;
  v_prod->add_option("--la", prod_la)->check(CLI::Range(0, 128));
  v_prod->add_option("--lb", prod_lb)->check(CLI::Range(0, 128));
  v_prod->callback([&] {
    command = "verify product";
    primary_output = verify_out;
    action = [&] {
      Rng rng(common.seed);
      const double off = verify_product_rule(prod_la, prod_lb, rng);
      SHCoeffs y10(1);
      y10(1, 0) = 1.0;
      const auto sq = product_coeffs(y10, y10, 10);
      double other = 0.0;
      for (int l = 0; l <= sq.bandlimit(); ++l)
        for (int m = -l; m <= l; ++m)
          if (!(m == 0 && (l == 0 || l == 2))) other += std::norm(sq(l, m));
      report({{"format_version", kFormatVersion}, {"la", prod_la}, {"lb", prod_lb}, {"seed", common.seed},
              {"off_band_energy", off},
              {"y10_squared", {{"c00", sq(0, 0).real()}, {"c20", sq(2, 0).real()},
                               {"other_energy", other}}}});
      return json{{"la", prod_la}, {"lb", prod_lb}};
    };
  });

  auto* v_init = verify->add_subcommand("init", "Herglotz initialization invariants");
  add_verify(v_init);
  ModelOpts init_model;
  init_model.add(v_init);
  v_init->callback([&] {
    command = "verify init";
    primary_output = verify_out;
    action = [&] {
      const auto cfg = init_model.config();
      if (cfg.kind != ModelKind::Hnet) throw UsageError("verify init needs --model hnet");
      const auto r = verify_init(build_network(cfg, common.seed));
      report({{"format_version", kFormatVersion}, {"neurons", r.neurons}, {"seed", common.seed},
              {"max_defect", r.max_defect}, {"max_norm_gap", r.max_norm_gap},
              {"max_w", r.max_w}, {"max_b", r.max_b}});
      return init_model.to_json();
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const json config = action();
    std::string path = common.manifest;
    if (path.empty()) {
      std::string stem = command;
      std::replace(stem.begin(), stem.end(), ' ', '-');
      path = primary_output.empty() ? "hnet-" + stem + ".manifest.json" : primary_output + ".manifest.json";
    }
    write_json(path, make_manifest(command, args, common.seed, config));
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const MagnitudeOverflow& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace hnet
