#include "cli/config.hpp"

#include <fstream>
#include <set>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/errmodel/error_model.hpp"

namespace bnpfc::cli {

using nlohmann::json;

namespace {

// Typed access to one JSON object with the field path carried into errors.
class Fields {
 public:
  Fields(const json& obj, std::string path, std::set<std::string> allowed) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "must be an object");
    for (const auto& [key, _] : obj_.items()) {
      if (!allowed.count(key)) fail(at(key), "is not a recognized field");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + " " + what);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return obj_.contains(key); }
  const json& raw(const std::string& key) const { return obj_.at(key); }

  std::string str(const std::string& key, std::string fallback) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_string()) fail(at(key), "must be a string");
    return obj_[key].get<std::string>();
  }
  std::string required_str(const std::string& key) const {
    if (!has(key)) fail(at(key), "is required");
    return str(key, "");
  }
  long long integer(const std::string& key, long long fallback, long long lo, long long hi) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_number_integer()) fail(at(key), "must be an integer");
    const auto v = obj_[key].get<long long>();
    if (v < lo || v > hi) fail(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_number()) fail(at(key), "must be a number");
    return obj_[key].get<double>();
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_boolean()) fail(at(key), "must be true or false");
    return obj_[key].get<bool>();
  }
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_array() || obj_[key].empty()) fail(at(key), "must be a nonempty array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < obj_[key].size(); ++i) {
      if (!obj_[key][i].is_string()) fail(at(key) + "[" + std::to_string(i) + "]", "must be a string");
      out.push_back(obj_[key][i].get<std::string>());
    }
    return out;
  }

 private:
  const json& obj_;
  std::string path_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

Quarter parse_quarter(const std::string& text, const std::string& field) {
  try {
    return Quarter::parse(text);
  } catch (const DataError& e) {
    throw ConfigError(field + " " + e.what());
  }
}

template <class F>
auto rethrow_as_config(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> all_model_ids() {
  std::vector<std::string> out;
  for (const char* mean : {"UC", "Linear", "GP", "GPSub"})
    for (const char* err : {"Homosk", "DPM", "SV", "DPMSV"}) out.push_back(std::string(mean) + "-" + err);
  return out;
}

data::DatasetSpec RunConfig::dataset_spec(data::DatasetVariant variant, int horizon) const {
  data::DatasetSpec d;
  d.variant = variant;
  d.target_series = target;
  d.horizon = horizon;
  d.include_expectations = include_expectations;
  d.expectations_series = expectations_series;
  return d;
}

engine::ModelSpec RunConfig::model_spec(const std::string& id, data::DatasetVariant variant, int horizon) const {
  engine::ModelSpec spec = engine::parse_model_id(id, dataset_spec(variant, horizon));
  spec.priors.linear = linear_prior;
  return spec;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  const Fields top(doc, "", {"data", "dataset", "models", "horizons", "evaluation", "benchmark", "mcmc", "output",
                             "workers", "draws_format", "dump_traces", "lasso", "priors"});
  RunConfig c;

  if (!top.has("data")) Fields::fail("data", "is required");
  const Fields data(top.raw("data"), "data", {"panel", "series"});
  c.panel = resolve(base_dir, data.required_str("panel"));
  c.series_info = resolve(base_dir, data.required_str("series"));

  if (top.has("dataset")) {
    const Fields ds(top.raw("dataset"), "dataset", {"variants", "target", "include_expectations", "expectations_series"});
    c.datasets.clear();
    for (const auto& v : ds.strings("variants", {"Moderate"}))
      c.datasets.push_back(rethrow_as_config("dataset.variants", [&] { return data::parse_dataset_variant(v); }));
    c.target = ds.str("target", c.target);
    c.include_expectations = ds.boolean("include_expectations", c.include_expectations);
    c.expectations_series = ds.str("expectations_series", c.expectations_series);
  }

  if (top.has("models") && top.raw("models").is_string() && top.raw("models").get<std::string>() == "all") {
    c.models = all_model_ids();
  } else {
    c.models = top.strings("models", all_model_ids());
  }
  std::set<std::string> seen;
  for (auto& id : c.models) {
    const auto spec = rethrow_as_config("models", [&] { return engine::parse_model_id(id, {}); });
    id = spec.id();
    if (!seen.insert(id).second) Fields::fail("models", "lists " + id + " twice");
  }

  if (top.has("horizons")) {
    const json& h = top.raw("horizons");
    if (!h.is_array() || h.empty()) Fields::fail("horizons", "must be a nonempty array of integers");
    c.horizons.clear();
    for (const auto& v : h) {
      if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 40)
        Fields::fail("horizons", "entries must be integers in [1, 40]");
      c.horizons.push_back(v.get<int>());
    }
  }

  if (top.has("evaluation")) {
    const Fields ev(top.raw("evaluation"), "evaluation", {"start", "end", "min_train", "max_origins"});
    if (ev.has("start")) c.eval_start = parse_quarter(ev.str("start", ""), "evaluation.start");
    if (ev.has("end")) c.eval_end = parse_quarter(ev.str("end", ""), "evaluation.end");
    c.min_train = static_cast<int>(ev.integer("min_train", c.min_train, 2, 100000));
    c.max_origins = static_cast<int>(ev.integer("max_origins", c.max_origins, 0, 100000));
    if (c.eval_end < c.eval_start) Fields::fail("evaluation", "end precedes start");
  }

  c.benchmark = top.str("benchmark", c.benchmark);
  c.benchmark = rethrow_as_config("benchmark", [&] { return engine::parse_model_id(c.benchmark, {}).id(); });

  if (top.has("mcmc")) {
    const Fields m(top.raw("mcmc"), "mcmc", {"n_iter", "n_burn", "thin", "seed", "adapt", "initial_step", "store_paths"});
    c.mcmc.n_iter = static_cast<int>(m.integer("n_iter", c.mcmc.n_iter, 1, 100000000));
    c.mcmc.n_burn = static_cast<int>(m.integer("n_burn", c.mcmc.n_burn, 0, 100000000));
    c.mcmc.thin = static_cast<int>(m.integer("thin", c.mcmc.thin, 1, 1000000));
    if (m.has("seed")) {
      const auto& s = m.raw("seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
        Fields::fail("mcmc.seed", "must be a nonnegative integer");
      c.mcmc.seed = m.raw("seed").get<std::uint64_t>();
    }
    c.mcmc.adapt = m.boolean("adapt", c.mcmc.adapt);
    c.mcmc.initial_step = m.number("initial_step", c.mcmc.initial_step);
    c.mcmc.store_paths = m.boolean("store_paths", false);
  } else {
    c.mcmc.store_paths = false;
  }
  rethrow_as_config("mcmc", [&] {
    c.mcmc.validate();
    return 0;
  });

  if (top.has("priors")) {
    const Fields p(top.raw("priors"), "priors", {"linear"});
    const auto lin = p.str("linear", "flat");
    if (lin == "flat") c.linear_prior = engine::LinearPrior::Flat;
    else if (lin == "kernel_limit") c.linear_prior = engine::LinearPrior::KernelLimit;
    else Fields::fail("priors.linear", "must be \"flat\" or \"kernel_limit\"");
  }

  c.out = resolve(base_dir, top.str("output", "run"));
  c.workers = static_cast<int>(top.integer("workers", c.workers, 1, 1024));
  const auto fmt = top.str("draws_format", "csv");
  if (fmt == "csv") c.draws_format = DrawsFormat::Csv;
  else if (fmt == "bin") c.draws_format = DrawsFormat::Bin;
  else Fields::fail("draws_format", "must be \"csv\" or \"bin\"");
  c.dump_traces = top.boolean("dump_traces", false);

  if (top.has("lasso")) {
    const Fields l(top.raw("lasso"), "lasso", {"model", "folds"});
    c.lasso_model = rethrow_as_config("lasso.model", [&] { return engine::parse_model_id(l.str("model", c.lasso_model), {}).id(); });
    c.lasso_folds = static_cast<int>(l.integer("folds", c.lasso_folds, 2, 100));
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  const auto base = std::filesystem::absolute(path).parent_path();
  if (doc.is_object() && doc.contains("config") && doc.contains("cells")) return parse_config(doc["config"], base);
  return parse_config(doc, base);
}

std::string to_string(DrawsFormat f) { return f == DrawsFormat::Csv ? "csv" : "bin"; }

json to_json(const RunConfig& c) {
  json variants = json::array();
  for (auto v : c.datasets) variants.push_back(data::to_string(v));
  return json{
      {"data", {{"panel", std::filesystem::absolute(c.panel).string()},
                {"series", std::filesystem::absolute(c.series_info).string()}}},
      {"dataset",
       {{"variants", variants},
        {"target", c.target},
        {"include_expectations", c.include_expectations},
        {"expectations_series", c.expectations_series}}},
      {"models", c.models},
      {"horizons", c.horizons},
      {"evaluation",
       {{"start", c.eval_start.to_string()},
        {"end", c.eval_end.to_string()},
        {"min_train", c.min_train},
        {"max_origins", c.max_origins}}},
      {"benchmark", c.benchmark},
      {"mcmc",
       {{"n_iter", c.mcmc.n_iter},
        {"n_burn", c.mcmc.n_burn},
        {"thin", c.mcmc.thin},
        {"seed", c.mcmc.seed},
        {"adapt", c.mcmc.adapt},
        {"initial_step", c.mcmc.initial_step},
        {"store_paths", c.mcmc.store_paths}}},
      {"priors", {{"linear", c.linear_prior == engine::LinearPrior::Flat ? "flat" : "kernel_limit"}}},
      {"output", std::filesystem::absolute(c.out).string()},
      {"workers", c.workers},
      {"draws_format", to_string(c.draws_format)},
      {"dump_traces", c.dump_traces},
      {"lasso", {{"model", c.lasso_model}, {"folds", c.lasso_folds}}},
  };
}

}  // namespace bnpfc::cli
