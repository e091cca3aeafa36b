// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// qfe: command-line front end over the libqfe C interface.
//
// Exit status: 0 on success, 1 on a runtime error (reported on stderr as
// "error[<name>]: <message>"), 2 on a usage error.

#include <csignal>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfe/qfe.h"

namespace {

void on_message(int level, const char* line, void*) {
  std::fprintf(stderr, "%s%s\n", level > 0 ? "warning: " : "", line);
}

void on_signal(int) { qfe_request_shutdown(); }

void install_signals() {
  struct sigaction sa {};
  sa.sa_handler = on_signal;
  sigemptyset(&sa.sa_mask);
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);
  std::signal(SIGPIPE, SIG_IGN);
}

const char* c_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct Seed {
  std::uint64_t value = 0;
  CLI::Option* opt = nullptr;
  void add(CLI::App* app, const char* help) { opt = app->add_option("--seed", value, help); }
  int given() const { return opt && opt->count() > 0 ? 1 : 0; }
};

int report(qfe_status st) {
  if (st == QFE_OK) return 0;
  std::fprintf(stderr, "error[%s]: %s\n", qfe_status_name(st), qfe_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfe: credit scoring over quadratic functional encryption"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qfe_version());

  std::string config_path, log_level;
  app.add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("--log-level", log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  qfe_common_opts common{};
  common.on_message = on_message;

  // train
  qfe_train_opts train;
  qfe_train_opts_init(&train);
  std::string train_data, train_model, train_label;
  Seed train_seed;
  auto* c_train = app.add_subcommand("train", "Clean a CSV dataset and train the scoring network");
  c_train->add_option("--data", train_data, "training CSV")->required()->check(CLI::ExistingFile);
  c_train->add_option("--model", train_model, "output model file (JSON)")->required();
  c_train->add_option("--label-column", train_label, "label column name (default: \"default\")");
  c_train->add_option("--epochs", train.epochs, "training epochs")->check(CLI::PositiveNumber);
  c_train->add_option("--batch-size", train.batch_size, "minibatch size")->check(CLI::PositiveNumber);
  c_train->add_option("--hidden", train.hidden, "projected dimension d")->check(CLI::PositiveNumber);
  c_train->add_option("--lr", train.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
  c_train->add_option("--workers", train.workers, "gradient workers")->check(CLI::PositiveNumber);
  train_seed.add(c_train, "training seed");

  // keygen
  qfe_keygen_opts keygen;
  qfe_keygen_opts_init(&keygen);
  std::string kg_model, kg_dir = ".", kg_prefix = "qfe";
  Seed kg_seed;
  auto* c_keygen = app.add_subcommand("keygen", "Generate keys and write the authority, client and evaluator files");
  c_keygen->add_option("--model", kg_model, "trained model file")->required()->check(CLI::ExistingFile);
  c_keygen->add_option("--out-dir", kg_dir, "output directory")->capture_default_str();
  c_keygen->add_option("--prefix", kg_prefix, "file name prefix")->capture_default_str();
  kg_seed.add(c_keygen, "deterministic key generation (testing only)");

  // encrypt
  qfe_encrypt_opts enc;
  qfe_encrypt_opts_init(&enc);
  std::string enc_bundle, enc_records, enc_out;
  Seed enc_seed;
  auto* c_enc = app.add_subcommand("encrypt", "Encrypt borrower records with a client bundle");
  c_enc->add_option("--client-bundle", enc_bundle, "client bundle file")->required()->check(CLI::ExistingFile);
  c_enc->add_option("--records", enc_records, "borrower CSV")->required()->check(CLI::ExistingFile);
  c_enc->add_option("--out", enc_out, "ciphertext batch file, - for stdout")->required();
  c_enc->add_option("--workers", enc.workers, "encryption workers, 0 = all cores");
  enc_seed.add(c_enc, "deterministic encryption randomness (testing only)");

  // score
  qfe_score_opts score;
  qfe_score_opts_init(&score);
  std::string sc_bundle, sc_in, sc_out = "-";
  bool sc_timings = false;
  auto* c_score = app.add_subcommand("score", "Score a ciphertext batch with an evaluator bundle");
  c_score->add_option("--eval-bundle", sc_bundle, "evaluator bundle file")->required()->check(CLI::ExistingFile);
  c_score->add_option("--ciphertexts", sc_in, "ciphertext batch file")->required()->check(CLI::ExistingFile);
  c_score->add_option("--out", sc_out, "JSONL reports, - for stdout")->capture_default_str();
  c_score->add_option("--workers", score.workers, "scoring workers, 0 = all cores");
  c_score->add_flag("--timings", sc_timings, "include per-stage timings");

  // serve-authority
  qfe_serve_authority_opts sa;
  qfe_serve_authority_opts_init(&sa);
  std::string sa_state, sa_listen, sa_token;
  auto* c_sa = app.add_subcommand("serve-authority", "Serve client and evaluator bundles");
  c_sa->add_option("--state", sa_state, "authority state file")->required()->check(CLI::ExistingFile);
  c_sa->add_option("--listen", sa_listen, "host:port (port 0 picks a free port)");
  auto* sa_token_opt = c_sa->add_option("--client-token", sa_token, "token required to fetch the client bundle");

  // serve-evaluator
  qfe_serve_evaluator_opts se;
  qfe_serve_evaluator_opts_init(&se);
  std::string se_listen, se_bundle, se_authority;
  auto* c_se = app.add_subcommand("serve-evaluator", "Score submitted ciphertexts");
  c_se->add_option("--listen", se_listen, "host:port (port 0 picks a free port)");
  auto* se_b = c_se->add_option("--eval-bundle", se_bundle, "evaluator bundle file")->check(CLI::ExistingFile);
  c_se->add_option("--authority", se_authority, "fetch the bundle from this authority")->excludes(se_b);
  c_se->add_option("--workers", se.workers, "concurrent scorings, 0 = all cores");

  // submit
  qfe_submit_opts sub;
  qfe_submit_opts_init(&sub);
  std::string sub_eval, sub_bundle, sub_auth, sub_token, sub_records, sub_out = "-";
  bool sub_timings = false;
  Seed sub_seed;
  auto* c_sub = app.add_subcommand("submit", "Encrypt records and score them on a remote evaluator");
  c_sub->add_option("--evaluator", sub_eval, "evaluator host:port");
  auto* sub_b = c_sub->add_option("--client-bundle", sub_bundle, "client bundle file")->check(CLI::ExistingFile);
  c_sub->add_option("--authority", sub_auth, "fetch the client bundle from this authority")->excludes(sub_b);
  auto* sub_token_opt = c_sub->add_option("--client-token", sub_token, "token for the authority");
  c_sub->add_option("--records", sub_records, "borrower CSV")->required()->check(CLI::ExistingFile);
  c_sub->add_option("--out", sub_out, "JSONL reports, - for stdout")->capture_default_str();
  c_sub->add_option("--workers", sub.workers, "parallel encryption and connections")->check(CLI::PositiveNumber);
  c_sub->add_flag("--timings", sub_timings, "include per-stage timings");
  sub_seed.add(c_sub, "deterministic encryption randomness (testing only)");

  // bench
  qfe_bench_opts bench;
  qfe_bench_opts_init(&bench);
  std::vector<std::size_t> b_dims, b_borrowers, b_speedup;
  std::string b_out = "-";
  Seed b_seed;
  auto* c_bench = app.add_subcommand("bench", "Time encryption and scoring over (d, borrowers) cells");
  c_bench->add_option("--dims", b_dims, "projected dimensions d")->delimiter(',');
  c_bench->add_option("--borrowers", b_borrowers, "borrower counts")->delimiter(',');
  c_bench->add_option("--reps", bench.repetitions, "repetitions per cell")->check(CLI::PositiveNumber);
  c_bench->add_option("--features", bench.features, "record dimension n")->check(CLI::PositiveNumber);
  c_bench->add_option("--workers", bench.workers, "scoring workers, 0 = all cores");
  c_bench->add_option("--speedup", b_speedup, "also time scoring at these worker counts")->delimiter(',');
  c_bench->add_option("--out", b_out, "CSV, - for stdout")->capture_default_str();
  b_seed.add(c_bench, "benchmark seed");

  // synth
  qfe_synth_opts synth;
  qfe_synth_opts_init(&synth);
  std::string sy_out = "-";
  bool sy_messy = false;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic lending dataset");
  c_synth->add_option("--rows", synth.rows, "rows")->capture_default_str()->check(CLI::PositiveNumber);
  c_synth->add_option("--features", synth.features, "numeric features")->capture_default_str()->check(CLI::PositiveNumber);
  c_synth->add_option("--separation", synth.separation, "class separation in noise std devs")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "seed")->capture_default_str();
  c_synth->add_flag("--messy", sy_messy, "add nulls, a timestamp and a categorical column");
  c_synth->add_option("--out", sy_out, "CSV, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!log_level.empty() && qfe_set_log_level(log_level.c_str()) != QFE_OK) return report(QFE_ERR_ARGUMENT);
  common.config_path = c_or_null(config_path);
  install_signals();

  if (c_train->parsed()) {
    train.common = common;
    train.data_path = train_data.c_str();
    train.model_path = train_model.c_str();
    train.label_column = c_or_null(train_label);
    train.has_seed = train_seed.given();
    train.seed = train_seed.value;
    return report(qfe_train(&train));
  }
  if (c_keygen->parsed()) {
    keygen.common = common;
    keygen.model_path = kg_model.c_str();
    keygen.out_dir = kg_dir.c_str();
    keygen.prefix = kg_prefix.c_str();
    keygen.has_seed = kg_seed.given();
    keygen.seed = kg_seed.value;
    return report(qfe_keygen(&keygen));
  }
  if (c_enc->parsed()) {
    enc.common = common;
    enc.client_bundle_path = enc_bundle.c_str();
    enc.records_path = enc_records.c_str();
    enc.out_path = enc_out.c_str();
    enc.has_seed = enc_seed.given();
    enc.seed = enc_seed.value;
    return report(qfe_encrypt_records(&enc));
  }
  if (c_score->parsed()) {
    score.common = common;
    score.eval_bundle_path = sc_bundle.c_str();
    score.ciphertexts_path = sc_in.c_str();
    score.out_path = sc_out.c_str();
    score.with_timings = sc_timings;
    return report(qfe_score(&score));
  }
  if (c_sa->parsed()) {
    sa.common = common;
    sa.state_path = sa_state.c_str();
    sa.listen = c_or_null(sa_listen);
    sa.client_token = sa_token_opt->count() ? sa_token.c_str() : nullptr;
    return report(qfe_serve_authority(&sa));
  }
  if (c_se->parsed()) {
    se.common = common;
    se.listen = c_or_null(se_listen);
    se.eval_bundle_path = c_or_null(se_bundle);
    se.authority = c_or_null(se_authority);
    return report(qfe_serve_evaluator(&se));
  }
  if (c_sub->parsed()) {
    sub.common = common;
    sub.evaluator = c_or_null(sub_eval);
    sub.client_bundle_path = c_or_null(sub_bundle);
    sub.authority = c_or_null(sub_auth);
    sub.client_token = sub_token_opt->count() ? sub_token.c_str() : nullptr;
    sub.records_path = sub_records.c_str();
    sub.out_path = sub_out.c_str();
    sub.with_timings = sub_timings;
    sub.has_seed = sub_seed.given();
    sub.seed = sub_seed.value;
    return report(qfe_submit(&sub));
  }
  if (c_bench->parsed()) {
    bench.common = common;
    bench.dims = b_dims.data();
    bench.n_dims = b_dims.size();
    bench.borrowers = b_borrowers.data();
    bench.n_borrowers = b_borrowers.size();
    bench.speedup_workers = b_speedup.data();
    bench.n_speedup_workers = b_speedup.size();
    bench.out_path = b_out.c_str();
    bench.has_seed = b_seed.given();
    bench.seed = b_seed.value;
    return report(qfe_bench(&bench));
  }
  if (c_synth->parsed()) {
    synth.common = common;
    synth.messy = sy_messy;
    synth.out_path = sy_out.c_str();
    return report(qfe_synth(&synth));
  }
  return 2;
}
