// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Operator commands behind the qfe tool.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "capi_internal.hpp"
#include "qfe/app/run_config.hpp"
#include "qfe/common/log.hpp"
#include "qfe/data/csv.hpp"
#include "qfe/data/synthetic.hpp"
#include "qfe/model/model_io.hpp"
#include "qfe/pairing/dlog.hpp"
#include "qfe/wire/services.hpp"

namespace qfe::capi {
namespace {

std::atomic<bool> g_shutdown{false};
static_assert(std::atomic<bool>::is_always_lock_free);

class Messages {
 public:
  explicit Messages(const qfe_common_opts& c) : c_(c) {}
  void info(const std::string& line) const { send(0, line); }
  void warn(const std::string& line) const { send(1, line); }

 private:
  void send(int level, const std::string& line) const {
    if (c_.on_message) c_.on_message(level, line.c_str(), c_.user);
  }
  const qfe_common_opts& c_;
};

std::string str_or(const char* s, const std::string& fallback = {}) { return s ? std::string(s) : fallback; }

std::string need_path(const char* s, const char* what) {
  if (!s || !*s) throw ArgumentError(std::string(what) + " is required");
  return s;
}

void emit(const std::string& path, std::string_view text) {
  if (path == "-") {
    if (std::fwrite(text.data(), 1, text.size(), stdout) != text.size() || std::fflush(stdout) != 0) {
      throw IoError("cannot write to standard output");
    }
    return;
  }
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void emit(const std::string& path, const Bytes& b) {
  emit(path, std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
}

Rng seeded_or_entropy(int has_seed, std::uint64_t seed) { return has_seed ? Rng::from_seed(seed) : Rng(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Borrower records from a CSV. The id comes from a borrower_id column when
// present, otherwise the row index. Features go through the bundle's
// training-time transform; without one, every other column except the
// label must already be a number in the scaled range.
std::vector<BorrowerRecord> load_records(const std::string& path, const ClientBundle& bundle,
                                         const std::string& label_column) {
  CsvTable t = read_csv(path);
  const std::size_t id_col = t.column("borrower_id");
  std::vector<std::size_t> raw_cols;
  if (!bundle.transform) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c != id_col && t.header[c] != label_column) raw_cols.push_back(c);
    }
    if (raw_cols.size() != bundle.n()) {
      throw ArgumentError("records have " + std::to_string(raw_cols.size()) + " feature columns, model expects " +
                          std::to_string(bundle.n()));
    }
  }
  std::vector<BorrowerRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = "row " + std::to_string(r + 1) + ": ";
    std::uint64_t id = r;
    if (id_col != std::string::npos) {
      const auto& cell = row[id_col];
      std::size_t used = 0;
      try {
        if (!cell) throw std::invalid_argument("null");
        id = std::stoull(*cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (!cell || used != cell->size()) throw FormatError(where + "borrower_id is not a non-negative integer");
    }
    std::vector<double> x;
    try {
      if (bundle.transform) {
        x = bundle.transform->apply(t.header, row);
      } else {
        for (std::size_t c : raw_cols) {
          auto v = row[c] ? parse_number(*row[c]) : std::nullopt;
          if (!v) throw FormatError("column '" + t.header[c] + "' is not a number");
          x.push_back(*v);
        }
      }
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    }
    out.push_back({id, quantize_record(x, bundle.config)});
  }
  return out;
}

void serve_until_shutdown() {
  while (!g_shutdown.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

}  // namespace
}  // namespace qfe::capi

using namespace qfe;
using namespace qfe::capi;

extern "C" {

void qfe_train_opts_init(qfe_train_opts* o) { *o = {}; }
void qfe_keygen_opts_init(qfe_keygen_opts* o) {
  *o = {};
  o->out_dir = ".";
  o->prefix = "qfe";
}
void qfe_encrypt_opts_init(qfe_encrypt_opts* o) {
  *o = {};
  o->workers = 1;
}
void qfe_score_opts_init(qfe_score_opts* o) {
  *o = {};
  o->out_path = "-";
  o->workers = 1;
}
void qfe_serve_authority_opts_init(qfe_serve_authority_opts* o) { *o = {}; }
void qfe_serve_evaluator_opts_init(qfe_serve_evaluator_opts* o) { *o = {}; }
void qfe_submit_opts_init(qfe_submit_opts* o) {
  *o = {};
  o->out_path = "-";
  o->workers = 1;
}
void qfe_bench_opts_init(qfe_bench_opts* o) {
  *o = {};
  o->out_path = "-";
}
void qfe_synth_opts_init(qfe_synth_opts* o) {
  *o = {};
  o->rows = 1000;
  o->features = 130;
  o->separation = 1.0;
  o->seed = 1;
  o->out_path = "-";
}

void qfe_request_shutdown(void) { g_shutdown.store(true); }

qfe_status qfe_train(const qfe_train_opts* o) {
  return guard([&] {
    require(o, "options");
    Messages msg(o->common);
    RunConfig rc = load_run_config(str_or(o->common.config_path));
    TrainConfig tc = rc.train;
    if (o->epochs) tc.epochs = o->epochs;
    if (o->batch_size) tc.batch_size = o->batch_size;
    if (o->hidden) tc.hidden = o->hidden;
    if (o->workers) tc.workers = o->workers;
    if (o->learning_rate > 0) tc.learning_rate = o->learning_rate;
    if (o->has_seed) tc.seed = o->seed;
    tc.validate();
    CleaningPolicy policy = rc.cleaning;
    if (o->label_column && *o->label_column) policy.label_column = o->label_column;
    const std::string model_path = need_path(o->model_path, "model path");

    CleanDataset data = preprocess(RawDataset::from_csv(read_csv(need_path(o->data_path, "data path")),
                                                        policy.label_column), policy);
    msg.info("dataset: " + std::to_string(data.rows()) + " rows, " + std::to_string(data.dim()) + " features");
    TrainResult res = train(data.features, data.labels, tc, [&](std::size_t epoch, double loss) {
      msg.info("epoch " + std::to_string(epoch) + "/" + std::to_string(tc.epochs) + " loss " + fmt("%.6f", loss));
    });

    ModelFile m;
    m.params = res.params;
    m.transform = data.transform;
    m.train = tc;
    m.epoch_losses = res.epoch_losses;
    QuantConfig qc = rc.quantization.value_or(QuantConfig::desk());
    m.quantized = export_quantized(res.params, qc);
    ErrorBudget budget = quantization_error_budget(res.params.pr, res.params.d_mat, m.quantized->pr_int,
                                                   m.quantized->d_int, qc);
    save_model(model_path, m);
    std::string score_err;
    for (double e : budget.score) score_err += (score_err.empty() ? "" : ", ") + fmt("%.4g", e);
    msg.info("quantization error bound: scores [" + score_err + "], probability " +
             fmt("%.4g", std::min(1.0, budget.probability)));
    msg.info("model written to " + model_path);
    log_event(LogLevel::kInfo, "cli", "train_done",
              {{"rows", data.rows()}, {"features", data.dim()}, {"final_loss", res.epoch_losses.back()}});
  });
}

qfe_status qfe_keygen(const qfe_keygen_opts* o) {
  return guard([&] {
    require(o, "options");
    Messages msg(o->common);
    RunConfig rc = load_run_config(str_or(o->common.config_path));
    ModelFile m = load_model(need_path(o->model_path, "model path"));
    QuantizedModel qm;
    if (rc.quantization) qm = export_quantized(m.params, *rc.quantization);
    else if (m.quantized) qm = *m.quantized;
    else qm = export_quantized(m.params, QuantConfig::desk());

    Rng rng = seeded_or_entropy(o->has_seed, o->seed);
    std::optional<FeatureTransform> transform;
    if (!m.transform.columns.empty()) transform = m.transform;
    AuthoritySetup s = authority_setup(qm, setup(), rng, transform);

    std::filesystem::path dir(str_or(o->out_dir, "."));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const std::string prefix = str_or(o->prefix, "qfe");
    const auto auth = (dir / (prefix + ".auth")).string();
    const auto client = (dir / (prefix + ".client")).string();
    const auto eval = (dir / (prefix + ".eval")).string();
    write_file(auth, serialize(s));
    write_file(client, serialize(s.client));
    write_file(eval, serialize(s.evaluator));
    msg.info("authority state: " + auth);
    msg.info("client bundle:   " + client);
    msg.info("evaluator bundle: " + eval);
    msg.info("n=" + std::to_string(qm.n()) + " d=" + std::to_string(qm.d()) +
             " score bound=" + std::to_string(s.evaluator.dlog_bound) + " keygen " + fmt("%.1f ms", s.keygen_ms));
  });
}

qfe_status qfe_encrypt_records(const qfe_encrypt_opts* o) {
  return guard([&] {
    require(o, "options");
    Messages msg(o->common);
    RunConfig rc = load_run_config(str_or(o->common.config_path));
    const std::string out = need_path(o->out_path, "output path");
    ClientBundle b = deserialize_client_bundle(read_file(need_path(o->client_bundle_path, "client bundle")));
    auto records = load_records(need_path(o->records_path, "records path"), b, rc.cleaning.label_column);
    auto batch = encrypt_batch(records, b, seeded_or_entropy(o->has_seed, o->seed), o->workers);
    emit(out, serialize_batch(batch, b.quant_digest));
    msg.info("encrypted " + std::to_string(batch.size()) + " records");
  });
}

qfe_status qfe_score(const qfe_score_opts* o) {
  return guard([&] {
    require(o, "options");
    load_run_config(str_or(o->common.config_path));
    EvaluatorBundle b = deserialize_eval_bundle(read_file(need_path(o->eval_bundle_path, "evaluator bundle")));
    Digest digest{};
    auto batch = deserialize_batch(read_file(need_path(o->ciphertexts_path, "ciphertext batch")), &digest);
    if (digest != b.quant_digest) {
      throw ConfigError("ciphertext batch was produced under a different quantization config");
    }
    auto reports = score_batch(batch, b, o->workers);
    emit(str_or(o->out_path, "-"), to_jsonl(reports, o->with_timings != 0));
  });
}

qfe_status qfe_serve_authority(const qfe_serve_authority_opts* o) {
  return guard([&] {
    require(o, "options");
    Messages msg(o->common);
    RunConfig rc = load_run_config(str_or(o->common.config_path));
    AuthoritySetup s = deserialize_authority(read_file(need_path(o->state_path, "authority state")));
    AuthorityServiceConfig cfg;
    cfg.listen = resolve_address(o->listen, kAuthorityAddrEnv, rc.authority, kDefaultAuthorityAddr);
    cfg.client_token = o->client_token ? std::string(o->client_token) : rc.client_token;
    g_shutdown.store(false);
    auto svc = serve_authority(std::move(s), cfg);
    msg.info("authority listening on " + ServiceAddress{cfg.listen.host, svc->port()}.str());
    serve_until_shutdown();
    svc->stop();
    msg.info("authority stopped");
  });
}

qfe_status qfe_serve_evaluator(const qfe_serve_evaluator_opts* o) {
  return guard([&] {
    require(o, "options");
    Messages msg(o->common);
    RunConfig rc = load_run_config(str_or(o->common.config_path));
    EvaluatorServiceConfig cfg;
    cfg.listen = resolve_address(o->listen, kEvaluatorAddrEnv, rc.evaluator, kDefaultEvaluatorAddr);
    if (o->eval_bundle_path && *o->eval_bundle_path) {
      cfg.bundle = deserialize_eval_bundle(read_file(o->eval_bundle_path));
    } else {
      cfg.authority = resolve_address(o->authority, kAuthorityAddrEnv, rc.authority, kDefaultAuthorityAddr);
    }
    cfg.workers = o->workers;
    g_shutdown.store(false);
    auto svc = serve_evaluator(cfg);
    msg.info("evaluator listening on " + ServiceAddress{cfg.listen.host, svc->port()}.str());
    serve_until_shutdown();
    svc->stop();
    msg.info("evaluator stopped");
  });
}

qfe_status qfe_submit(const qfe_submit_opts* o) {
  return guard([&] {
    require(o, "options");
    Messages msg(o->common);
    RunConfig rc = load_run_config(str_or(o->common.config_path));
    ServiceAddress evaluator = resolve_address(o->evaluator, kEvaluatorAddrEnv, rc.evaluator, kDefaultEvaluatorAddr);
    ClientBundle b;
    if (o->client_bundle_path && *o->client_bundle_path) {
      b = deserialize_client_bundle(read_file(o->client_bundle_path));
    } else {
      ServiceAddress authority = resolve_address(o->authority, kAuthorityAddrEnv, rc.authority, kDefaultAuthorityAddr);
      b = fetch_client_bundle(authority, o->client_token ? std::string(o->client_token) : rc.client_token);
    }
    auto records = load_records(need_path(o->records_path, "records path"), b, rc.cleaning.label_column);
    SubmitOptions so;
    so.workers = o->workers ? o->workers : 1;
    auto reports = client_submit(evaluator, records, b, seeded_or_entropy(o->has_seed, o->seed), so);
    emit(str_or(o->out_path, "-"), to_jsonl(reports, o->with_timings != 0));
    msg.info("scored " + std::to_string(reports.size()) + " borrowers via " + evaluator.str());
  });
}

qfe_status qfe_bench(const qfe_bench_opts* o) {
  return guard([&] {
    require(o, "options");
    Messages msg(o->common);
    RunConfig rc = load_run_config(str_or(o->common.config_path));
    BenchPlan plan = rc.bench;
    if (o->n_dims) {
      require(o->dims, "dims");
      plan.attribute_dims.assign(o->dims, o->dims + o->n_dims);
    }
    if (o->n_borrowers) {
      require(o->borrowers, "borrowers");
      plan.borrower_counts.assign(o->borrowers, o->borrowers + o->n_borrowers);
    }
    if (o->repetitions) plan.repetitions = o->repetitions;
    if (o->features) plan.features = o->features;
    if (o->workers) plan.workers = o->workers;
    if (o->has_seed) plan.seed = o->seed;
    if (rc.quantization) plan.config = *rc.quantization;
    plan.validate();
    std::vector<std::size_t> speedup_workers;
    if (o->n_speedup_workers) {
      require(o->speedup_workers, "speedup workers");
      speedup_workers.assign(o->speedup_workers, o->speedup_workers + o->n_speedup_workers);
    }
    const std::string out = str_or(o->out_path, "-");

    auto rows = run_bench(plan, [&](const BenchRow& r) {
      std::string cell = "d=" + std::to_string(r.dim) + " borrowers=" + std::to_string(r.borrowers);
      if (r.failed) {
        msg.warn(cell + " failed: " + r.error);
        return;
      }
      msg.info(cell + ": encrypt " + fmt("%.1f", r.encrypt_ms) + " ms (sd " + fmt("%.1f", r.encrypt_sd) +
               "), score " + fmt("%.1f", r.score_ms) + " ms (sd " + fmt("%.1f", r.score_sd) + ")");
    });
    emit(out, bench_csv(rows));
    for (const auto& [d, fit] : encrypt_linearity(rows)) {
      const std::string head = "encrypt vs borrowers at d=" + std::to_string(d) + ": ";
      if (std::isnan(fit.r2)) {
        msg.info(head + "no fit, needs two borrower counts");
      } else {
        msg.info(head + fmt("%.3f", fit.slope) + " ms/borrower, R^2 " + fmt("%.4f", fit.r2));
      }
    }
    if (!speedup_workers.empty()) {
      const std::size_t d = plan.attribute_dims.front();
      const std::size_t n = *std::max_element(plan.borrower_counts.begin(), plan.borrower_counts.end());
      msg.info("parallel scoring, d=" + std::to_string(d) + ", " + std::to_string(n) + " borrowers, " +
               std::to_string(std::thread::hardware_concurrency()) + " hardware threads");
      for (const auto& s : parallel_speedup(d, n, speedup_workers, plan.seed, plan.features, plan.config)) {
        msg.info("  workers=" + std::to_string(s.workers) + ": " + fmt("%.1f", s.score_ms) + " ms, speedup " +
                 fmt("%.2fx", s.speedup) + ", reports " + (s.identical ? "identical" : "DIFFERENT"));
      }
    }
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.failed ? 1 : 0;
    if (failed) msg.warn(std::to_string(failed) + " of " + std::to_string(rows.size()) + " cells failed");
  });
}

qfe_status qfe_synth(const qfe_synth_opts* o) {
  return guard([&] {
    require(o, "options");
    load_run_config(str_or(o->common.config_path));
    SyntheticSpec spec;
    spec.rows = o->rows;
    spec.features = o->features;
    spec.separation = o->separation;
    spec.messy = o->messy != 0;
    spec.seed = o->seed;
    if (spec.rows == 0 || spec.features == 0) throw ArgumentError("rows and features must be positive");
    emit(str_or(o->out_path, "-"), format_csv(generate_synthetic(spec)));
  });
}

}  // extern "C"
