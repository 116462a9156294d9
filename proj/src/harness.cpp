#include "geomatch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

namespace geomatch {

using nlohmann::json;

void SweepConfig::validate() const {
  if (n < 2) fail(ErrorKind::parameter, "sweep needs n >= 2");
  if (d < 1) fail(ErrorKind::parameter, "sweep needs d >= 1");
  if (models.empty()) fail(ErrorKind::parameter, "sweep needs at least one model");
  if (estimators.empty()) fail(ErrorKind::parameter, "sweep needs at least one estimator");
  if (sigma_grid.empty()) fail(ErrorKind::parameter, "sigma grid is empty");
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    if (!(sigma_grid[i] > 0.0) || !std::isfinite(sigma_grid[i]))
      fail(ErrorKind::parameter, "sigma grid values must be finite and > 0");
    if (i > 0 && !(sigma_grid[i] > sigma_grid[i - 1]))
      fail(ErrorKind::parameter, "sigma grid must be strictly ascending");
  }
  if (trials < 1) fail(ErrorKind::parameter, "trials must be >= 1");
  if (workers < 1) fail(ErrorKind::parameter, "workers must be >= 1");
  for (const auto& e : estimators) e.validate();
}

std::vector<double> log_spaced(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo)) fail(ErrorKind::parameter, "log-spaced grid needs 0 < min <= max");
  if (points < 1) fail(ErrorKind::parameter, "log-spaced grid needs >= 1 point");
  if (points == 1) return {lo};
  std::vector<double> out(points);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) out[i] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_sigma_grid(int n, int d) {
  const double nn = static_cast<double>(n);
  return log_spaced(0.1 * std::pow(nn, -2.0 / d), 10.0 * std::pow(nn, -1.0 / d), 15);
}

namespace {

std::string_view matcher_name(Matcher m) { return m == Matcher::exact ? "exact" : "greedy"; }

Matcher parse_matcher(std::string_view s) {
  if (s == "exact") return Matcher::exact;
  if (s == "greedy") return Matcher::greedy;
  fail(ErrorKind::parameter, "unknown matcher '" + std::string(s) + "'");
}

EstimatorConfig estimator_from_json(const json& j) {
  if (j.is_string()) return parse_estimator_label(j.get<std::string>());
  if (!j.is_object()) fail(ErrorKind::parameter, "estimator entry must be a string or an object");
  EstimatorConfig e = parse_estimator_label(j.at("kind").get<std::string>());
  if (j.contains("matcher")) e.matcher = parse_matcher(j["matcher"].get<std::string>());
  e.grid_size = j.value("grid_size", e.grid_size);
  e.eta = j.value("eta", e.eta);
  e.max_iter = j.value("max_iter", e.max_iter);
  e.restarts = j.value("restarts", e.restarts);
  e.mc_samples = j.value("mc_samples", e.mc_samples);
  e.seed = j.value("seed", e.seed);
  if (j.contains("sigma") && !j["sigma"].is_null()) e.sigma = j["sigma"].get<double>();
  return e;
}

json estimator_to_json(const EstimatorConfig& e) {
  json j;
  j["kind"] = std::string(to_string(e.kind));
  j["matcher"] = std::string(matcher_name(e.matcher));
  j["grid_size"] = e.grid_size;
  j["eta"] = e.eta;
  j["max_iter"] = e.max_iter;
  j["restarts"] = e.restarts;
  j["mc_samples"] = e.mc_samples;
  j["seed"] = e.seed;
  j["sigma"] = e.sigma ? json(*e.sigma) : json(nullptr);
  return j;
}

}  // namespace

SweepConfig sweep_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::parameter, std::string("sweep config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::parameter, "sweep config must be a JSON object");
  try {
    SweepConfig cfg;
    cfg.n = j.value("n", cfg.n);
    cfg.d = j.value("d", cfg.d);
    if (j.contains("models")) {
      cfg.models.clear();
      for (const auto& m : j["models"]) cfg.models.push_back(parse_model(m.get<std::string>()));
    }
    if (j.contains("estimators"))
      for (const auto& e : j["estimators"]) cfg.estimators.push_back(estimator_from_json(e));
    if (j.contains("sigma_grid") && !j["sigma_grid"].is_null()) {
      const auto& g = j["sigma_grid"];
      if (g.is_array())
        cfg.sigma_grid = g.get<std::vector<double>>();
      else
        cfg.sigma_grid = log_spaced(g.at("min").get<double>(), g.at("max").get<double>(),
                                    g.at("points").get<int>());
    } else {
      cfg.sigma_grid = default_sigma_grid(cfg.n, std::max(cfg.d, 1));
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    cfg.output_path = j.value("output_path", cfg.output_path);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.record_timing = j.value("record_timing", cfg.record_timing);
    if (j.contains("covariance") && !j["covariance"].is_null()) {
      const auto rows = j["covariance"].get<std::vector<std::vector<double>>>();
      Matrix c(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != c.cols())
          fail(ErrorKind::dimension, "covariance rows differ in length");
        for (std::size_t s = 0; s < rows[r].size(); ++s) c(r, s) = rows[r][s];
      }
      cfg.covariance = c;
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    fail(ErrorKind::parameter, std::string("sweep config: ") + e.what());
  }
}

std::string sweep_config_to_json(const SweepConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["d"] = cfg.d;
  j["models"] = json::array();
  for (auto m : cfg.models) j["models"].push_back(std::string(to_string(m)));
  j["estimators"] = json::array();
  for (const auto& e : cfg.estimators) j["estimators"].push_back(estimator_to_json(e));
  j["sigma_grid"] = cfg.sigma_grid;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["output_path"] = cfg.output_path;
  j["workers"] = cfg.workers;
  j["record_timing"] = cfg.record_timing;
  if (cfg.covariance) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < cfg.covariance->rows(); ++r) {
      json row = json::array();
      for (Eigen::Index s = 0; s < cfg.covariance->cols(); ++s) row.push_back((*cfg.covariance)(r, s));
      rows.push_back(row);
    }
    j["covariance"] = rows;
  } else {
    j["covariance"] = nullptr;
  }
  return j.dump(2);
}

SweepConfig demo_config(int n, int d) {
  SweepConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.models = {ModelKind::linear_assignment, ModelKind::dot_product};
  EstimatorConfig mle;
  mle.kind = EstimatorKind::mle_linear;
  cfg.estimators.push_back(mle);
  if (d == 2) {
    EstimatorConfig grid;
    grid.kind = EstimatorKind::aml_grid2d;
    grid.grid_size = 100;
    cfg.estimators.push_back(grid);
    grid.matcher = Matcher::greedy;
    cfg.estimators.push_back(grid);
  } else {
    EstimatorConfig flip;
    flip.kind = EstimatorKind::aml_signflip;
    cfg.estimators.push_back(flip);
    flip.matcher = Matcher::greedy;
    cfg.estimators.push_back(flip);
    EstimatorConfig ume;
    ume.kind = EstimatorKind::umeyama;
    cfg.estimators.push_back(ume);
  }
  cfg.sigma_grid = default_sigma_grid(n, d);
  cfg.trials = 10;
  return cfg;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SeedHasher::SeedHasher(std::uint64_t base) : state_(splitmix64(base)) {}

SeedHasher& SeedHasher::add(std::uint64_t v) {
  state_ = splitmix64(state_ ^ splitmix64(v));
  return *this;
}

SeedHasher& SeedHasher::add(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  add(s.size());
  return add(h);
}

std::uint64_t SeedHasher::value() const { return state_; }

std::uint64_t instance_seed(std::uint64_t base_seed, int sigma_index, int trial) {
  return SeedHasher(base_seed).add("instance").add(static_cast<std::uint64_t>(sigma_index))
      .add(static_cast<std::uint64_t>(trial)).value();
}

std::uint64_t record_seed(std::uint64_t base_seed, ModelKind model, const EstimatorConfig& est,
                          int sigma_index, int trial) {
  return SeedHasher(base_seed)
      .add(to_string(model))
      .add(est.label())
      .add(est.seed)
      .add(static_cast<std::uint64_t>(sigma_index))
      .add(static_cast<std::uint64_t>(trial))
      .value();
}

SweepWriteError::SweepWriteError(const std::string& what, std::vector<SweepRecord> records)
    : Error(ErrorKind::io, what), records_(std::move(records)) {}

namespace {

struct Task {
  int model_index;
  int estimator_index;
  int sigma_index;
  int trial;
};

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (pool == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> threads;
  threads.reserve(pool);
  for (int w = 0; w < pool; ++w)
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

SweepRecord run_task(const SweepConfig& cfg, const Task& task, const Instance& inst) {
  const ModelKind model = cfg.models[task.model_index];
  EstimatorConfig est = cfg.estimators[task.estimator_index];
  SweepRecord rec;
  rec.model = model;
  rec.estimator = est.label();
  rec.n = cfg.n;
  rec.d = cfg.d;
  rec.sigma = cfg.sigma_grid[task.sigma_index];
  rec.sigma_index = task.sigma_index;
  rec.trial = task.trial;
  rec.seed = record_seed(cfg.base_seed, model, est, task.sigma_index, task.trial);
  rec.instance_hash = instance_hash(inst);
  est.seed = rec.seed;
  if (!est.sigma) est.sigma = inst.sigma;
  try {
    const Observation obs = observe(inst, model);
    const auto start = std::chrono::steady_clock::now();
    const EstimateResult res = estimate(obs, est);
    const auto stop = std::chrono::steady_clock::now();
    rec.overlap = overlap(res.permutation, inst.pi_star);
    rec.objective = res.objective;
    rec.iterations = res.iterations;
    if (cfg.record_timing)
      rec.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.overlap = 0.0;
    rec.objective = std::numeric_limits<double>::quiet_NaN();
    rec.iterations = -1;
  }
  return rec;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const int sigmas = static_cast<int>(cfg.sigma_grid.size());

  std::vector<Instance> instances(static_cast<std::size_t>(sigmas) * cfg.trials);
  parallel_for(instances.size(), cfg.workers, [&](std::size_t k) {
    const int s = static_cast<int>(k) / cfg.trials, t = static_cast<int>(k) % cfg.trials;
    instances[k] = sample_instance(cfg.n, cfg.d, cfg.sigma_grid[s], cfg.covariance,
                                   instance_seed(cfg.base_seed, s, t));
  });

  std::vector<Task> tasks;
  for (int m = 0; m < static_cast<int>(cfg.models.size()); ++m)
    for (int e = 0; e < static_cast<int>(cfg.estimators.size()); ++e) {
      if (!supports(cfg.estimators[e].kind, cfg.models[m])) continue;
      for (int s = 0; s < sigmas; ++s)
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({m, e, s, t});
    }
  if (tasks.empty()) fail(ErrorKind::parameter, "no estimator supports any configured model");

  std::vector<SweepRecord> records(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t k) {
    const Task& t = tasks[k];
    records[k] = run_task(cfg, t, instances[static_cast<std::size_t>(t.sigma_index) * cfg.trials + t.trial]);
  });

  if (!cfg.output_path.empty()) {
    try {
      write_text_file(cfg.output_path, records_to_csv(records));
    } catch (const Error& e) {
      throw SweepWriteError(e.what(), std::move(records));
    }
  }
  return records;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string records_to_csv(const std::vector<SweepRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += to_string(r.model);
    out += ',' + r.estimator;
    out += ',' + std::to_string(r.n);
    out += ',' + std::to_string(r.d);
    out += ',' + format_real(r.sigma);
    out += ',' + std::to_string(r.trial);
    out += ',' + std::to_string(r.seed);
    out += ',' + std::to_string(r.instance_hash);
    out += ',' + format_real(r.overlap);
    out += ',' + format_real(r.objective);
    out += ',' + format_real(r.runtime_ms);
    out += ',' + std::to_string(r.iterations);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  os.flush();
  if (!os) fail(ErrorKind::io, "failed writing '" + path + "'");
}

std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records) {
  if (records.empty()) fail(ErrorKind::contract, "summarize needs at least one record");

  struct Acc {
    SummaryRow row;
    std::vector<double> overlaps;
    double runtime = 0.0;
  };
  std::vector<std::pair<ModelKind, std::string>> pair_order;
  std::map<std::pair<std::size_t, double>, Acc> groups;
  for (const auto& r : records) {
    const std::pair<ModelKind, std::string> key{r.model, r.estimator};
    auto it = std::find(pair_order.begin(), pair_order.end(), key);
    const std::size_t idx = static_cast<std::size_t>(it - pair_order.begin());
    if (it == pair_order.end()) pair_order.push_back(key);
    Acc& acc = groups[{idx, r.sigma}];
    acc.row.model = r.model;
    acc.row.estimator = r.estimator;
    acc.row.sigma = r.sigma;
    if (r.failed()) {
      ++acc.row.failures;
      continue;
    }
    ++acc.row.count;
    acc.overlaps.push_back(r.overlap);
    acc.runtime += r.runtime_ms;
  }

  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& [key, acc] : groups) {
    SummaryRow row = acc.row;
    if (row.count > 0) {
      const double c = row.count;
      double sum = 0.0;
      for (double v : acc.overlaps) sum += v;
      row.mean_overlap = sum / c;
      double ss = 0.0;
      for (double v : acc.overlaps) ss += (v - row.mean_overlap) * (v - row.mean_overlap);
      row.std_overlap = std::sqrt(ss / c);
      row.mean_runtime_ms = acc.runtime / c;
    } else {
      row.mean_overlap = row.std_overlap = row.mean_runtime_ms = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string summary_to_json(const std::vector<SummaryRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["model"] = std::string(to_string(r.model));
    j["estimator"] = r.estimator;
    j["sigma"] = r.sigma;
    j["count"] = r.count;
    j["failures"] = r.failures;
    j["mean_overlap"] = r.mean_overlap;
    j["std_overlap"] = r.std_overlap;
    j["mean_runtime_ms"] = r.mean_runtime_ms;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace geomatch
