#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include "tune/dataset.hpp"
#include "tune/error.hpp"
#include "tune/rng.hpp"

namespace tune {

//! Synthetic electricity-market-style stream with the ELEC2 column layout
//! (date, day, period, nswprice, nswdemand, vicprice, vicdemand, transfer,
//! class UP/DOWN). Prices follow a demand-driven mean-reverting process and
//! the label compares the price against a context threshold built from
//! progressively smaller feature effects, so deeper interaction models keep
//! gaining accuracy. Feature values are quantized like the published data.
//! Deterministic given (n_rows, seed).
inline LabeledDataset make_synthetic_elec2(std::size_t n_rows, std::uint64_t seed) {
  if (n_rows == 0) fail(errc::invalid_value, "synthetic dataset needs at least one row");
  RandomStream rng = RandomStream(seed).substream("synth-elec2");

  LabeledDataset data;
  data.feature_names = {"date", "day",      "period",    "nswprice",
                        "nswdemand", "vicprice", "vicdemand", "transfer"};
  data.n_features = data.feature_names.size();
  data.n_rows = n_rows;
  data.features.reserve(n_rows * data.n_features);
  data.labels.reserve(n_rows);

  auto clamp01 = [](double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };
  auto quant = [](double v, double step) { return std::round(v / step) * step; };
  auto gauss = [&rng]() {
    double u1 = rng.next_real();
    double u2 = rng.next_real();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };

  double price_core = 0.45;
  for (std::size_t t = 0; t < n_rows; ++t) {
    double date = n_rows > 1 ? static_cast<double>(t) / static_cast<double>(n_rows - 1) : 0.0;
    auto period_slot = static_cast<double>(t % 48);
    double day = static_cast<double>((t / 48) % 7 + 1);
    double period = (period_slot + 0.5) / 48.0;

    double season = 0.08 * std::sin(2.0 * M_PI * (4.0 * date + 0.3));
    double daily = std::sin(2.0 * M_PI * (period - 0.32));
    bool weekend = day >= 6.0;

    double nswdemand =
        clamp01(0.52 + 0.16 * daily + (weekend ? -0.06 : 0.03) + season + 0.05 * gauss());
    double vicdemand = clamp01(0.50 + 0.13 * std::sin(2.0 * M_PI * (period - 0.38)) +
                               (weekend ? -0.05 : 0.02) + 0.8 * season + 0.05 * gauss());

    double demand_level = 0.75 * nswdemand + 0.25 * vicdemand;
    price_core = 0.70 * price_core + 0.30 * (0.22 + 0.55 * demand_level) + 0.045 * gauss();
    double nswprice = clamp01(price_core + 0.030 * gauss());
    double vicprice = clamp01(0.55 * price_core + 0.28 * vicdemand + 0.05 + 0.045 * gauss());
    double transfer = clamp01(0.5 + 0.9 * (vicprice - nswprice) + 0.06 * gauss());

    // quantize what the model sees (and what drives the label below)
    date = quant(date, 1e-5);
    nswprice = quant(nswprice, 1e-3);
    nswdemand = quant(nswdemand, 1e-3);
    vicprice = quant(vicprice, 1e-3);
    vicdemand = quant(vicdemand, 1e-3);
    transfer = quant(transfer, 1e-3);

    // context threshold: a pseudo-random staircase of price regimes over the
    // date axis. Regimes are fine enough that shallow trees cannot isolate
    // them (their leaves mix neighbouring regimes), so accuracy rises with
    // depth well past the coarse-structure plateau; regime offsets dominate
    // the label noise, so an isolated regime is almost pure.
    bool evening = period > 0.58 && period < 0.88;
    double threshold = 0.524;
    {
      // coarse blocks lift what shallow trees can learn; fine steps keep
      // paying until the leaves isolate single regimes
      auto block = static_cast<std::uint64_t>(date * 16.0);
      if (block > 15) block = 15;
      double ub = static_cast<double>(detail::mix64(0xB10C0000 + block) >> 11) * 0x1.0p-53;
      double bsign = ub < 0.5 ? -1.0 : 1.0;
      double bmag = 0.020 + 0.030 * (ub < 0.5 ? ub * 2.0 : (ub - 0.5) * 2.0);
      threshold += bsign * bmag;

      auto step = static_cast<std::uint64_t>(date * 160.0);
      if (step > 159) step = 159;
      double u = static_cast<double>(detail::mix64(0x5EED0000 + step) >> 11) * 0x1.0p-53;
      double sign = u < 0.5 ? -1.0 : 1.0;
      double mag = 0.055 + 0.035 * (u < 0.5 ? u * 2.0 : (u - 0.5) * 2.0);
      threshold += sign * mag;
    }
    if (evening) {
      threshold += 0.018;
      threshold += nswdemand > 0.60 ? 0.015 : -0.015;
    } else {
      threshold -= 0.007;
      threshold += nswdemand > 0.47 ? -0.014 : 0.014;
    }
    if (weekend) {
      threshold += vicdemand > 0.44 ? 0.014 : -0.014;
    } else {
      threshold += transfer > 0.50 ? 0.012 : -0.012;
    }

    bool up = nswprice > threshold + 0.012 * gauss();

    data.features.push_back(date);
    data.features.push_back(day);
    data.features.push_back(period);
    data.features.push_back(nswprice);
    data.features.push_back(nswdemand);
    data.features.push_back(vicprice);
    data.features.push_back(vicdemand);
    data.features.push_back(transfer);
    data.labels.push_back(up ? "UP" : "DOWN");
  }
  return data;
}

//! Writes a dataset as a headered CSV with a trailing label column.
inline void write_csv(const LabeledDataset& data, const std::string& path,
                      const std::string& label_column = "class") {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write '" + path + "'");
  for (const auto& name : data.feature_names) out << name << ',';
  out << label_column << '\n';
  char buf[64];
  for (std::size_t r = 0; r < data.n_rows; ++r) {
    for (std::size_t f = 0; f < data.n_features; ++f) {
      std::snprintf(buf, sizeof(buf), "%.6f", data.at(r, f));
      out << buf << ',';
    }
    out << data.labels[r] << '\n';
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

} // namespace tune
