#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "peakcast/peakcast.hpp"

using namespace peakcast;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string sci4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    write_file(path, content);
  }
}

std::optional<Date> date_arg(const std::string& text, const char* flag) {
  if (text.empty()) return std::nullopt;
  auto d = parse_date(text);
  if (!d) throw Usage(std::string(flag) + ": expected YYYY-MM-DD, got '" + text + "'");
  return d;
}

CalendarSpec load_calendar(const std::string& path, const DemandTrace& trace) {
  if (!path.empty()) {
    try {
      return parse_calendar(read_file(path));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": " + e.what());
    }
  }
  const auto first = static_cast<int>(std::chrono::year_month_day{trace.start().date()}.year());
  const auto last = static_cast<int>(std::chrono::year_month_day{(trace.end_time() + -1).date()}.year());
  return default_calendar(first, last);
}

// Days of the trace that have the full 48-hour history and a complete target day.
std::vector<Date> forecastable_days(const DemandTrace& trace) {
  std::vector<Date> out;
  if (trace.empty()) return out;
  Date d = trace.start().date() + std::chrono::days{trace.start().at_midnight() ? 2 : 3};
  for (; !(trace.end_time() < DateHour{d + std::chrono::days{1}, 0}); d += std::chrono::days{1}) out.push_back(d);
  return out;
}

std::vector<Date> select_test_days(const DemandTrace& trace, const std::string& test_start, int test_days) {
  auto days = forecastable_days(trace);
  if (auto start = date_arg(test_start, "--test-start")) {
    std::erase_if(days, [&](Date d) { return d < *start; });
  } else if (test_days > 0 && days.size() > static_cast<std::size_t>(test_days)) {
    days.erase(days.begin(), days.end() - test_days);
  }
  if (days.empty()) fail(ErrorCode::EmptyDataset, "no forecastable test days in the trace");
  return days;
}

DayProfile actual_day(const DemandTrace& trace, Date date) {
  const auto first = trace.index_of(DateHour{date, 0});
  if (first < 0 || trace.index_of(DateHour{date, 23}) < 0)
    fail(ErrorCode::MissingHistory, "trace lacks the full day " + format_date(date));
  DayProfile out{};
  for (std::size_t h = 0; h < kHorizon; ++h) out[h] = trace[static_cast<std::size_t>(first) + h].demand_kw;
  return out;
}

struct Forecaster {
  std::string name;
  AnyModel model;
  bool naive = false;

  const NormalizationParams& normalization() const {
    return std::visit([](const auto& m) -> const NormalizationParams& { return m.normalization; }, model);
  }

  DayProfile operator()(const DemandTrace& trace, Date date, const CalendarSpec& cal) const {
    if (naive) return seasonal_naive_predict(trace, date);
    const auto inputs = history_inputs(trace, date, cal, normalization());
    if (const auto* lstm = std::get_if<ModelParams>(&model)) return predict_day(*lstm, inputs);
    return predict_linreg(std::get<LinRegModel>(model), inputs);
  }
};

Forecaster load_forecaster(const std::string& path) {
  try {
    return {std::filesystem::path(path).stem().string(), deserialize_any(load_bytes(path)), false};
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  SyntheticConfig config;
  std::string start;
  std::string out;
};

void add_synth(CLI::App& app, SynthArgs& a, std::function<void()>& action) {
  auto* sub = app.add_subcommand("synth", "Generate a synthetic campus-like trace CSV");
  sub->add_option("--days", a.config.days, "Number of days")->capture_default_str();
  sub->add_option("--seed", a.config.seed, "Random seed")->capture_default_str();
  sub->add_option("--start", a.start, "First day, YYYY-MM-DD (default 2018-01-01)");
  sub->add_option("--base-kw", a.config.base_kw)->capture_default_str();
  sub->add_option("--daily-amplitude-kw", a.config.daily_amplitude_kw)->capture_default_str();
  sub->add_option("--weekly-amplitude-kw", a.config.weekly_amplitude_kw)->capture_default_str();
  sub->add_option("--seasonal-amplitude-kw", a.config.seasonal_amplitude_kw)->capture_default_str();
  sub->add_option("--noise-sd-kw", a.config.noise_sd_kw)->capture_default_str();
  sub->add_option("--min-kw", a.config.min_kw)->capture_default_str();
  sub->add_option("--max-kw", a.config.max_kw)->capture_default_str();
  sub->add_option("--bimodal-probability", a.config.bimodal_probability)->capture_default_str();
  sub->add_option("-o,--out", a.out, "Output CSV (default stdout)");
  sub->callback([&] {
    action = [&] {
      if (auto d = date_arg(a.start, "--start")) a.config.start = *d;
      emit(a.out, serialize_trace(generate_synthetic(a.config)));
    };
  });
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string trace, calendar, config_file, out, report, model_type = "lstm", precision = "full";
  std::vector<std::size_t> hidden{100, 90, 80, 70};
  int train_days = 0, validation_days = 0;
  double ridge_lambda = 1e-6;
  std::optional<int> epochs, batch_size, patience;
  std::optional<double> lr_start, lr_end, dropout, clip;
  std::optional<std::uint64_t> seed;
  bool no_shuffle = false;
};

Precision precision_arg(const std::string& p) { return p == "half" ? Precision::Half : Precision::Full; }

void add_train(CLI::App& app, TrainArgs& a, std::function<void()>& action) {
  auto* sub = app.add_subcommand("train", "Train an LSTM or linear-regression forecaster");
  sub->add_option("--trace", a.trace, "Trace CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--calendar", a.calendar, "Calendar file")->check(CLI::ExistingFile);
  sub->add_option("--config", a.config_file, "Training config (key = value); flags override it")
      ->check(CLI::ExistingFile);
  sub->add_option("-o,--out", a.out, "Model file to write")->required();
  sub->add_option("--report", a.report, "Per-epoch report CSV");
  sub->add_option("--model-type", a.model_type)->check(CLI::IsMember({"lstm", "linreg"}))->capture_default_str();
  sub->add_option("--hidden", a.hidden, "Hidden sizes, comma separated")->delimiter(',')->capture_default_str();
  sub->add_option("--train-days", a.train_days, "Use only the first N days (0 = all)");
  sub->add_option("--validation-days", a.validation_days, "Hold out the last N training days for early stopping");
  sub->add_option("--ridge-lambda", a.ridge_lambda)->capture_default_str();
  sub->add_option("--precision", a.precision)->check(CLI::IsMember({"full", "half"}))->capture_default_str();
  sub->add_option("--epochs", a.epochs);
  sub->add_option("--batch-size", a.batch_size);
  sub->add_option("--lr-start", a.lr_start);
  sub->add_option("--lr-end", a.lr_end);
  sub->add_option("--dropout-rate", a.dropout);
  sub->add_option("--grad-clip-norm", a.clip);
  sub->add_option("--patience", a.patience);
  sub->add_option("--seed", a.seed);
  sub->add_flag("--no-shuffle", a.no_shuffle);
  sub->callback([&] {
    action = [&] {
      TrainConfig config;
      if (!a.config_file.empty()) {
        try {
          config = parse_train_config(read_file(a.config_file));
        } catch (const Error& e) {
          throw Error(e.code(), a.config_file + ": " + e.what());
        }
      }
      if (a.epochs) config.epochs = *a.epochs;
      if (a.batch_size) config.batch_size = *a.batch_size;
      if (a.lr_start) config.lr_start = *a.lr_start;
      if (a.lr_end) config.lr_end = *a.lr_end;
      if (a.dropout) config.dropout_rate = *a.dropout;
      if (a.clip) config.grad_clip_norm = *a.clip;
      if (a.patience) config.patience = *a.patience;
      if (a.seed) config.seed = *a.seed;
      if (a.no_shuffle) config.shuffle = false;
      validate(config);

      DemandTrace trace = load_trace(a.trace);
      if (a.train_days > 0) {
        if (static_cast<std::size_t>(a.train_days) * 24 > trace.size())
          fail(ErrorCode::TooShort, "--train-days exceeds the trace length");
        trace = trace.slice(0, static_cast<std::size_t>(a.train_days) * 24);
      }
      const auto cal = load_calendar(a.calendar, trace);
      DemandTrace fit_part = trace;
      if (a.validation_days > 0) {
        const auto held = static_cast<std::size_t>(a.validation_days) * 24;
        if (held + kInputHours + kHorizon > trace.size())
          fail(ErrorCode::TooShort, "--validation-days leaves no training windows");
        fit_part = trace.slice(0, trace.size() - held);
      }
      const auto norm = fit_normalizer(fit_part);
      auto windows = build_windows(trace, cal, norm);
      std::vector<WindowSample> train_set, val_set;
      for (auto& w : windows)
        (DateHour{w.target_date, 0} < fit_part.end_time() ? train_set : val_set).push_back(std::move(w));

      const auto precision = precision_arg(a.precision);
      if (a.model_type == "linreg") {
        auto m = fit_linreg(train_set, norm, a.ridge_lambda);
        const auto bytes = serialize(m, precision);
        save_model(a.out, bytes);
        std::cout << "model: linreg\nsamples: " << train_set.size() << "\nparameters: " << m.parameter_count()
                  << "\nbytes: " << bytes.size() << "\n";
        if (!a.report.empty()) emit(a.report, "epoch,loss,validation_mape,lr\n");
        return;
      }

      const Architecture arch{kFeatureDim, a.hidden, kHorizon};
      auto result = train(init_model(arch, norm, config.seed), train_set, config, val_set);
      const auto bytes = serialize(result.model, precision);
      save_model(a.out, bytes);
      if (!a.report.empty()) {
        std::string csv = "epoch,loss,validation_mape,lr\n";
        const auto& r = result.report;
        for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
          csv += std::to_string(e) + "," + sci4(r.epoch_loss[e]) + "," +
                 (e < r.validation_mape.size() ? fmt4(r.validation_mape[e]) : std::string()) + "," +
                 sci4(lr_schedule(static_cast<int>(e), config.epochs, config.lr_start, config.lr_end)) + "\n";
        }
        emit(a.report, csv);
      }
      std::cout << "model: lstm\nsamples: " << train_set.size() << "\nvalidation_samples: " << val_set.size()
                << "\nepochs_run: " << result.report.epoch_loss.size()
                << "\nfinal_loss: " << result.report.epoch_loss.back() << "\nparameters: "
                << result.model.parameter_count() << "\nbytes: " << bytes.size() << "\n";
      std::cerr << "wall_seconds: " << result.report.wall_seconds << "\n";
    };
  });
}

// ---- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string model, trace, calendar, date, out;
  std::vector<int> ks{1};
};

void add_predict(CLI::App& app, PredictArgs& a, std::function<void()>& action) {
  auto* sub = app.add_subcommand("predict", "Forecast one day and label its top/bottom-k hours");
  sub->add_option("--model", a.model)->required()->check(CLI::ExistingFile);
  sub->add_option("--trace", a.trace, "History trace CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--calendar", a.calendar)->check(CLI::ExistingFile);
  sub->add_option("--date", a.date, "Day to forecast (default: the day after the trace)");
  sub->add_option("--k", a.ks, "k values, comma separated")->delimiter(',')->capture_default_str();
  sub->add_option("-o,--out", a.out, "Output CSV (default stdout)");
  sub->callback([&] {
    action = [&] {
      const auto f = load_forecaster(a.model);
      const auto trace = load_trace(a.trace);
      const auto cal = load_calendar(a.calendar, trace);
      const Date date = date_arg(a.date, "--date").value_or(trace.end_time().date());
      const auto forecast = f(trace, date, cal);
      std::string csv = "k," + std::string(kLabelHeader) + "\n";
      for (int k : a.ks) {
        const auto rows = format_label_rows(date, label_day(forecast, k), forecast);
        std::istringstream in(rows);
        for (std::string line; std::getline(in, line);) csv += std::to_string(k) + "," + line + "\n";
      }
      emit(a.out, csv);
    };
  });
}

// ---- evaluate ---------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> models;
  std::string trace, calendar, test_start, out, mape_out;
  int test_days = 130, k_min = 1, k_max = 5;
  bool naive = false;
};

void add_evaluate(CLI::App& app, EvalArgs& a, std::function<void()>& action) {
  auto* sub = app.add_subcommand("evaluate", "Score models on the test days of a trace");
  sub->add_option("--model", a.models, "Model file (repeatable)")->check(CLI::ExistingFile);
  sub->add_flag("--naive", a.naive, "Include the seasonal-naive reference");
  sub->add_option("--trace", a.trace)->required()->check(CLI::ExistingFile);
  sub->add_option("--calendar", a.calendar)->check(CLI::ExistingFile);
  sub->add_option("--test-start", a.test_start, "First test day, YYYY-MM-DD");
  sub->add_option("--test-days", a.test_days, "Score the last N days when --test-start is absent")
      ->capture_default_str();
  sub->add_option("--k-min", a.k_min)->capture_default_str();
  sub->add_option("--k-max", a.k_max)->capture_default_str();
  sub->add_option("-o,--out", a.out, "Accuracy CSV (default stdout)");
  sub->add_option("--mape-out", a.mape_out, "MAPE CSV (default stdout after the accuracy table)");
  sub->callback([&] {
    action = [&] {
      if (a.models.empty() && !a.naive) throw Usage("evaluate needs --model or --naive");
      const auto trace = load_trace(a.trace);
      const auto cal = load_calendar(a.calendar, trace);
      const auto days = select_test_days(trace, a.test_start, a.test_days);
      std::vector<Forecaster> fs;
      for (const auto& p : a.models) fs.push_back(load_forecaster(p));
      if (a.naive) fs.push_back({"seasonal-naive", ModelParams{}, true});

      std::string acc = std::string(kAccuracyHeader) + "\n";
      std::string mape_csv = "model,days,mape\n";
      for (const auto& f : fs) {
        std::vector<EvalDay> scored;
        for (Date d : days) scored.push_back({actual_day(trace, d), f(trace, d, cal)});
        const auto table = score_days(f.name, scored, a.k_min, a.k_max);
        acc += format_accuracy_rows(table);
        mape_csv += f.name + "," + std::to_string(table.days) + "," + fmt4(table.mape) + "\n";
      }
      if (a.out.empty() && a.mape_out.empty()) {
        emit("", acc + "\n" + mape_csv);
      } else {
        emit(a.out, acc);
        if (!a.mape_out.empty()) emit(a.mape_out, mape_csv);
      }
    };
  });
}

// ---- simulate ---------------------------------------------------------------

struct SimArgs {
  std::string model, trace, calendar, test_start, out, dispatch_out;
  int test_days = 130, k = 1;
  BatterySpec battery;
  TariffSpec tariff;
};

void add_simulate(CLI::App& app, SimArgs& a, std::function<void()>& action) {
  auto* sub = app.add_subcommand("simulate", "Dispatch a battery on forecast labels and report monthly savings");
  sub->add_option("--model", a.model)->required()->check(CLI::ExistingFile);
  sub->add_option("--trace", a.trace)->required()->check(CLI::ExistingFile);
  sub->add_option("--calendar", a.calendar)->check(CLI::ExistingFile);
  sub->add_option("--test-start", a.test_start);
  sub->add_option("--test-days", a.test_days)->capture_default_str();
  sub->add_option("--k", a.k)->capture_default_str();
  sub->add_option("--capacity-kwh", a.battery.capacity_kwh)->capture_default_str();
  sub->add_option("--max-power-kw", a.battery.max_power_kw)->capture_default_str();
  sub->add_option("--efficiency", a.battery.round_trip_efficiency)->capture_default_str();
  sub->add_option("--demand-charge", a.tariff.demand_charge_per_kw, "$ per kW per month")->capture_default_str();
  sub->add_option("-o,--out", a.out, "Monthly savings CSV (default stdout)");
  sub->add_option("--dispatch-out", a.dispatch_out, "Hourly dispatch CSV");
  sub->callback([&] {
    action = [&] {
      validate(a.battery);
      const auto f = load_forecaster(a.model);
      const auto trace = load_trace(a.trace);
      const auto cal = load_calendar(a.calendar, trace);
      const auto days = select_test_days(trace, a.test_start, a.test_days);
      std::vector<DayPlan> predicted, oracle;
      for (Date d : days) {
        const auto actual = actual_day(trace, d);
        predicted.push_back({d, actual, label_day(f(trace, d, cal), a.k)});
        oracle.push_back({d, actual, label_day(actual, a.k)});
      }
      std::vector<MonthDay> hourly;
      const auto pm = simulate_months(predicted, a.battery, a.tariff, &hourly);
      const auto om = simulate_months(oracle, a.battery, a.tariff);
      std::string csv = "month,k,raw_peak_kw,net_peak_kw,savings_usd,oracle_net_peak_kw,oracle_savings_usd\n";
      for (std::size_t i = 0; i < pm.size(); ++i) {
        csv += format_date(pm[i].month_start).substr(0, 7) + "," + std::to_string(a.k) + "," +
               fmt4(pm[i].raw_peak_kw) + "," + fmt4(pm[i].net_peak_kw) + "," + fmt4(pm[i].savings_usd) + "," +
               fmt4(om[i].net_peak_kw) + "," + fmt4(om[i].savings_usd) + "\n";
      }
      emit(a.out, csv);
      if (!a.dispatch_out.empty()) {
        std::string d = "date,hour,label,demand_kw,net_load_kw,soc_kwh\n";
        for (std::size_t i = 0; i < hourly.size(); ++i)
          for (std::size_t h = 0; h < kHorizon; ++h)
            d += format_date(hourly[i].date) + "," + std::to_string(h) + "," +
                 static_cast<char>(predicted[i].labeling.labels[h]) + "," + fmt4(hourly[i].demand_kw[h]) + "," +
                 fmt4(hourly[i].dispatch.net_load_kw[h]) + "," + fmt4(hourly[i].dispatch.soc_kwh[h + 1]) + "\n";
        emit(a.dispatch_out, d);
      }
    };
  });
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::vector<double> accuracies, capacities{1000, 2000, 4000};
  std::vector<int> ks;
  std::string metrics, metrics_model, mode = "hour", out;
  double demand_charge = 22.0, unit_cost = 200.0;
};

std::vector<double> accuracies_from_metrics(const std::string& path, const std::string& model, bool hour_level) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  if (detail::trim(line) != kAccuracyHeader) fail(ErrorCode::MalformedRow, path + ": not an accuracy CSV");
  std::vector<std::pair<int, double>> found;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) break;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) fail(ErrorCode::MalformedRow, path + ": expected 6 fields in '" + line + "'");
    if (!model.empty() && f[0] != model) continue;
    double v = 0;
    if (!detail::parse_real(hour_level ? f[2] : f[3], v))
      fail(ErrorCode::MalformedRow, path + ": bad accuracy in '" + line + "'");
    found.push_back({std::stoi(f[1]), v / 100.0});
  }
  std::sort(found.begin(), found.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].first != static_cast<int>(i) + 1)
      fail(ErrorCode::MalformedRow, path + ": rows for model '" + model + "' must cover k = 1.." +
                                        std::to_string(found.size()) + " once each");
    out.push_back(found[i].second);
  }
  if (out.empty()) fail(ErrorCode::EmptyDataset, path + ": no rows for model '" + model + "'");
  return out;
}

void add_sweep(CLI::App& app, SweepArgs& a, std::function<void()>& action) {
  auto* sub = app.add_subcommand("sweep", "Closed-form savings and payback over battery sizes and k");
  auto* acc = sub->add_option("--accuracies", a.accuracies, "Capture fraction per k, starting at k=1")
                  ->delimiter(',');
  auto* met = sub->add_option("--metrics", a.metrics, "Accuracy CSV from evaluate")->check(CLI::ExistingFile);
  acc->excludes(met);
  sub->add_option("--metrics-model", a.metrics_model, "Model rows to read from --metrics");
  sub->add_option("--mode", a.mode, "Accuracy column: hour or day")
      ->check(CLI::IsMember({"hour", "day"}))
      ->capture_default_str();
  sub->add_option("--capacities", a.capacities, "kWh, comma separated")->delimiter(',')->capture_default_str();
  sub->add_option("--k", a.ks, "k values (default: every k with an accuracy)")->delimiter(',');
  sub->add_option("--demand-charge", a.demand_charge)->capture_default_str();
  sub->add_option("--unit-cost", a.unit_cost, "$ per kWh")->capture_default_str();
  sub->add_option("-o,--out", a.out, "Savings CSV (default stdout)");
  sub->callback([&] {
    action = [&] {
      if (!a.metrics.empty()) a.accuracies = accuracies_from_metrics(a.metrics, a.metrics_model, a.mode == "hour");
      if (a.accuracies.empty()) throw Usage("sweep needs --accuracies or --metrics");
      if (a.ks.empty())
        for (std::size_t k = 1; k <= a.accuracies.size(); ++k) a.ks.push_back(static_cast<int>(k));
      const auto report = savings_sweep(a.capacities, a.ks, a.accuracies, TariffSpec{a.demand_charge}, a.unit_cost);
      emit(a.out, std::string(kSavingsHeader) + "\n" + format_savings_rows(report));
    };
  });
}

// ---- info -------------------------------------------------------------------

struct InfoArgs {
  std::string model, trace;
  int runs = 100;
};

void add_info(CLI::App& app, InfoArgs& a, std::function<void()>& action) {
  auto* sub = app.add_subcommand("info", "Parameter count, file size and single-day latency of a model");
  sub->add_option("--model", a.model)->required()->check(CLI::ExistingFile);
  sub->add_option("--trace", a.trace, "Trace whose last 48 hours feed the latency runs")->check(CLI::ExistingFile);
  sub->add_option("--runs", a.runs)->capture_default_str()->check(CLI::PositiveNumber);
  sub->callback([&] {
    action = [&] {
      const auto bytes = load_bytes(a.model);
      ModelFileInfo info;
      Forecaster f;
      try {
        f = {"", deserialize_any(bytes, &info), false};
      } catch (const Error& e) {
        throw Error(e.code(), a.model + ": " + e.what());
      }
      const auto trace = a.trace.empty() ? generate_synthetic([] {
        SyntheticConfig c;
        c.days = 3;
        return c;
      }()) : load_trace(a.trace);
      const auto cal = load_calendar("", trace);
      const Date date = trace.end_time().date();
      DayProfile sink{};
      const auto t0 = std::chrono::steady_clock::now();
      for (int i = 0; i < a.runs; ++i) sink = f(trace, date, cal);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / a.runs;
      std::cout << "type: " << (info.type == ModelType::Lstm ? "lstm" : "linreg") << "\n"
                << "precision: " << (info.precision == Precision::Full ? "f64" : "f16") << "\n"
                << "parameters: " << info.parameter_count << "\n"
                << "bytes: " << bytes.size() << "\n"
                << "latency_ms: " << fmt4(ms) << "\n";
      if (!std::isfinite(sink[0])) std::cerr << "warning: non-finite forecast\n";
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peak-hour forecasting and battery peak-shaving toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  std::function<void()> action;

  SynthArgs synth;
  TrainArgs train_args;
  PredictArgs predict;
  EvalArgs eval;
  SimArgs sim;
  SweepArgs sweep;
  InfoArgs info;
  add_synth(app, synth, action);
  add_train(app, train_args, action);
  add_predict(app, predict, action);
  add_evaluate(app, eval, action);
  add_simulate(app, sim, action);
  add_sweep(app, sweep, action);
  add_info(app, info, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    action();
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
