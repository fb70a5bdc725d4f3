// Writes a synthetic quarterly panel with the layout of a FRED-QD extract:
// raw levels plus a sidecar of transformation codes and M/L membership flags.
// Inflation is driven by a random-walk trend, lagged latent factors (one
// entering nonlinearly) and stochastic-volatility errors with occasional
// outliers, so every model in the grid has something to find.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>

#include "bnpfc/core/random.hpp"
#include "bnpfc/data/panel.hpp"

namespace {

using namespace bnpfc;

struct SeriesDef {
  std::string name;
  int tcode;
  bool moderate;
  bool large;
  int factor;      // dominant latent factor
  double loading;
  double noise;
};

// Integrates a transformed series back to raw levels for its code.
std::vector<double> integrate(const std::vector<double>& s, int tcode) {
  const std::size_t T = s.size();
  std::vector<double> x(T);
  switch (tcode) {
    case 1:
      return s;
    case 2: {
      double level = 5.0;
      for (std::size_t t = 0; t < T; ++t) x[t] = level += s[t];
      return x;
    }
    case 5: {
      double log_level = std::log(100.0);
      for (std::size_t t = 0; t < T; ++t) x[t] = std::exp(log_level += s[t] / 100.0);
      return x;
    }
    case 6: {
      double growth = 0.005, log_level = std::log(100.0);
      for (std::size_t t = 0; t < T; ++t) x[t] = std::exp(log_level += growth += s[t] / 400.0);
      return x;
    }
    case 7: {
      double growth = 0.01, level = 100.0;
      for (std::size_t t = 0; t < T; ++t) x[t] = level *= 1.0 + (growth += s[t] / 1000.0);
      return x;
    }
  }
  throw std::invalid_argument("unsupported tcode");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled synthetic panel"};
  std::string panel_path = "data/synthetic_panel.csv";
  std::string series_path = "data/synthetic_series.csv";
  int T = 200;
  std::uint64_t seed = 20240501;
  app.add_option("--panel", panel_path, "Output panel CSV");
  app.add_option("--series", series_path, "Output sidecar CSV");
  app.add_option("--quarters", T, "Number of quarters")->check(CLI::Range(60, 2000));
  app.add_option("--seed", seed, "Seed");
  CLI11_PARSE(app, argc, argv);

  RandomStream rng(seed);
  const int burn = 20;
  const int n = T + burn;

  // Latent factors: real activity, financial conditions, cost pressure.
  std::vector<std::vector<double>> f(3, std::vector<double>(static_cast<std::size_t>(n), 0.0));
  const double persistence[3] = {0.8, 0.7, 0.9};
  for (int t = 1; t < n; ++t)
    for (int k = 0; k < 3; ++k)
      f[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] =
          persistence[k] * f[static_cast<std::size_t>(k)][static_cast<std::size_t>(t - 1)] +
          std::sqrt(1.0 - persistence[k] * persistence[k]) * rng.normal();
  auto F = [&](int k, int t) { return f[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)]; };

  // Headline and core inflation (annualized percent) with SV errors.
  std::vector<double> infl(static_cast<std::size_t>(n)), core(static_cast<std::size_t>(n)), trend(static_cast<std::size_t>(n));
  double tau = 3.5, h = std::log(1.0);
  for (int t = 0; t < n; ++t) {
    tau += 0.15 * rng.normal();
    h = -0.2 + 0.95 * (h + 0.2) + 0.2 * rng.normal();
    trend[static_cast<std::size_t>(t)] = tau;
    const double lagged = t > 0 ? 0.8 * F(2, t - 1) + 0.4 * F(0, t - 1) - 0.6 * std::max(F(1, t - 1), 0.0) : 0.0;
    double e = std::exp(0.5 * h) * rng.normal();
    if (rng.uniform() < 0.05) e += 4.0 * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    infl[static_cast<std::size_t>(t)] = tau + lagged + e;
    core[static_cast<std::size_t>(t)] = tau + 0.5 * lagged + 0.5 * std::exp(0.5 * h) * rng.normal();
  }

  std::vector<SeriesDef> defs;
  const int moderate_codes[] = {5, 1, 2, 5, 7, 1, 5, 2, 1};
  for (int i = 0; i < 27; ++i) {
    const int factor = i % 3;
    const char* prefix[] = {"REAL", "FIN", "COST"};
    defs.push_back({std::string(prefix[factor]) + (i / 3 < 9 ? "0" : "") + std::to_string(i / 3 + 1),
                    moderate_codes[i % 9], true, true, factor, 0.5 + 0.1 * (i % 5), 0.6});
  }
  for (int i = 0; i < 20; ++i) {
    const int factor = (i + 1) % 3;
    defs.push_back({"LX" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1), moderate_codes[(i + 4) % 9],
                    false, true, factor, 0.3 + 0.05 * (i % 4), 0.9});
  }

  data::SeriesPanel panel;
  for (int t = 0; t < T; ++t) panel.dates.push_back(Quarter::from_year_quarter(1972, 1) + t);
  const auto columns = static_cast<Eigen::Index>(defs.size() + 3);
  panel.values.resize(T, columns);

  auto price_level = [&](const std::vector<double>& pi) {
    std::vector<double> p(static_cast<std::size_t>(T));
    double level = 40.0;
    for (int t = 0; t < T; ++t) p[static_cast<std::size_t>(t)] = level *= std::exp(pi[static_cast<std::size_t>(t + burn)] / 400.0);
    return p;
  };
  auto put = [&](Eigen::Index col, const std::string& name, int tcode, bool m, bool l, const std::vector<double>& x) {
    panel.names.push_back(name);
    panel.tcodes.push_back(tcode);
    panel.moderate.push_back(m);
    panel.large.push_back(l);
    for (int t = 0; t < T; ++t) panel.values(t, col) = x[static_cast<std::size_t>(t)];
  };

  put(0, "CPIAUCSL", 6, true, true, price_level(infl));
  put(1, "CPILFESL", 6, false, true, price_level(core));
  std::vector<double> expectations(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    expectations[static_cast<std::size_t>(t)] = trend[static_cast<std::size_t>(t + burn)] + 0.3 * F(2, t + burn) + 0.1 * rng.normal();
  }
  put(2, "INFEXP", 1, true, true, expectations);

  for (std::size_t j = 0; j < defs.size(); ++j) {
    const auto& d = defs[j];
    std::vector<double> s(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) s[static_cast<std::size_t>(t)] = d.loading * F(d.factor, t + burn) + d.noise * rng.normal();
    auto x = integrate(s, d.tcode);
    if (d.name == "LX20") {
      for (int t = 0; t < 4; ++t) x[static_cast<std::size_t>(t)] = std::nan("");
    }
    put(static_cast<Eigen::Index>(j + 3), d.name, d.tcode, d.moderate, d.large, x);
  }

  panel.validate();
  data::write_panel(panel, panel_path, series_path);
  std::cout << "wrote " << T << " quarters x " << panel.num_series() << " series to " << panel_path << " and "
            << series_path << "\n";
  return 0;
}
