#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "logbarrier/logbarrier.hpp"

namespace logbarrier::cli {
namespace {

namespace fs = std::filesystem;

struct AttackFlags {
  std::string model;
  std::string data;
  std::string norm = "linf";
  std::size_t topk = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  double lambda0 = 0;
  double beta = 0;
  double gamma = 0;
  double step_size = 0;
  double epsilon_stop = 0;
  std::size_t outer = 0;
  std::size_t inner = 0;
  double init_step = 0;
  std::size_t init_kmax = 0;
  std::string init_noise;
  double rho = 0;
  double alpha = 0;

  double ball_epsilon = 0;
  double baseline_step = 0;
  std::size_t baseline_iterations = 0;
  std::vector<double> eps_grid;

  std::vector<double> thresholds;
  std::vector<double> quantiles{0.5, 0.9, 1.0};
  std::string out;
  std::string format = "csv";
  std::string adv_out;
  bool dry_run = false;

  // Options whose presence overrides a default.
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_attack_flags(CLI::App& cmd, AttackFlags& f) {
  cmd.add_option("--model", f.model, "Model file")->required();
  cmd.add_option("--data", f.data, "Dataset CSV")->required();
  cmd.add_option("--norm", f.norm, "Norm of the LogBarrier attack")
      ->check(CLI::IsMember({"l2", "linf"}));
  cmd.add_option("--topk", f.topk, "Top-k misclassification level")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", f.seed, "Base random seed");
  cmd.add_option("--threads", f.threads,
                 std::string("Worker threads (default: $") + kThreadsEnvVar + " or all cores)");

  f.opts["lambda0"] = cmd.add_option("--lambda0", f.lambda0, "Initial barrier weight");
  f.opts["beta"] = cmd.add_option("--beta", f.beta, "Barrier weight shrink factor");
  f.opts["gamma"] = cmd.add_option("--gamma", f.gamma, "Backtracking factor");
  f.opts["step-size"] = cmd.add_option("--step-size", f.step_size, "Gradient step size h");
  f.opts["epsilon-stop"] =
      cmd.add_option("--epsilon-stop", f.epsilon_stop, "Inner-loop stopping threshold");
  f.opts["outer"] = cmd.add_option("--outer", f.outer, "Outer iterations K_outer");
  f.opts["inner"] = cmd.add_option("--inner", f.inner, "Inner iterations J_inner");
  f.opts["init-step"] = cmd.add_option("--init-step", f.init_step, "Initialisation step h");
  f.opts["init-kmax"] = cmd.add_option("--init-kmax", f.init_kmax, "Initialisation draws k_max");
  f.opts["init-noise"] = cmd.add_option("--init-noise", f.init_noise, "Initialisation noise")
                             ->check(CLI::IsMember({"normal", "bernoulli"}));
  f.opts["rho"] = cmd.add_option("--rho", f.rho, "Bernoulli noise density");
  f.opts["alpha"] = cmd.add_option("--alpha", f.alpha, "Smooth max-norm sharpness");

  f.opts["ball-epsilon"] =
      cmd.add_option("--ball-epsilon", f.ball_epsilon, "Baseline ball radius");
  f.opts["baseline-step"] = cmd.add_option("--baseline-step", f.baseline_step, "Baseline step");
  f.opts["baseline-iterations"] =
      cmd.add_option("--baseline-iterations", f.baseline_iterations, "Baseline iterations");
  cmd.add_option("--eps-grid", f.eps_grid,
                 "Ascending radii; baselines report the smallest successful one")
      ->delimiter(',');

  cmd.add_option("--thresholds", f.thresholds, "Distances for success-rate columns")
      ->delimiter(',');
  cmd.add_option("--quantiles", f.quantiles, "Quantile levels in (0,1]")->delimiter(',');
  cmd.add_option("--out", f.out, "Output directory for report files");
  cmd.add_option("--format", f.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd.add_flag("--dry-run", f.dry_run, "Print the resolved configuration and exit");
}

AttackConfig resolve_logbarrier(const AttackFlags& f) {
  AttackConfig c = f.norm == "l2" ? AttackConfig::l2_defaults() : AttackConfig::linf_defaults();
  if (f.given("lambda0")) c.lambda0 = f.lambda0;
  if (f.given("beta")) c.beta = f.beta;
  if (f.given("gamma")) c.gamma = f.gamma;
  if (f.given("step-size")) c.step_size = f.step_size;
  if (f.given("epsilon-stop")) c.epsilon_stop = f.epsilon_stop;
  if (f.given("outer")) c.outer_iterations = f.outer;
  if (f.given("inner")) c.inner_iterations = f.inner;
  if (f.given("init-step")) c.init_step = f.init_step;
  if (f.given("init-kmax")) c.init_max_draws = f.init_kmax;
  if (f.given("init-noise")) {
    c.init_noise = f.init_noise == "normal" ? InitNoise::kNormal : InitNoise::kBernoulli;
  }
  if (f.given("rho")) c.init_rho = f.rho;
  if (f.given("alpha")) c.measure.alpha = f.alpha;
  c.topk = f.topk;
  c.seed = f.seed;
  c.validate();
  return c;
}

BaselineConfig resolve_baseline(const AttackFlags& f, BaselineConfig::Kind kind) {
  const bool ifgsm = kind == BaselineConfig::Kind::kIfgsm;
  const double eps = f.given("ball-epsilon") ? f.ball_epsilon : (ifgsm ? 0.3 : 1.0);
  BaselineConfig c = ifgsm ? BaselineConfig::ifgsm_defaults(eps) : BaselineConfig::pgd_defaults(eps);
  if (f.given("baseline-step")) c.step_size = f.baseline_step;
  if (f.given("baseline-iterations")) c.iterations = f.baseline_iterations;
  c.seed = f.seed;
  c.validate();
  return c;
}

void print_config(std::ostream& out, const std::string& name, const AttackConfig& c) {
  out << "[" << name << "]\n"
      << "measure=" << (c.measure.kind == PerturbationMeasure::Kind::kSquaredL2 ? "squared_l2"
                                                                                 : "smooth_linf")
      << "\nalpha=" << format_real(c.measure.alpha) << "\nlambda0=" << format_real(c.lambda0)
      << "\nbeta=" << format_real(c.beta) << "\ngamma=" << format_real(c.gamma)
      << "\nstep_size=" << format_real(c.step_size)
      << "\nepsilon_stop=" << format_real(c.epsilon_stop) << "\nouter=" << c.outer_iterations
      << "\ninner=" << c.inner_iterations << "\ntopk=" << c.topk
      << "\ninit_step=" << format_real(c.init_step) << "\ninit_kmax=" << c.init_max_draws
      << "\ninit_noise=" << (c.init_noise == InitNoise::kNormal ? "normal" : "bernoulli")
      << "\nrho=" << format_real(c.init_rho) << "\nseed=" << c.seed << "\n";
}

void print_config(std::ostream& out, const std::string& name, const BaselineConfig& c,
                  const std::vector<double>& grid) {
  out << "[" << name << "]\n"
      << "epsilon_ball=" << format_real(c.epsilon_ball) << "\nstep_size=" << format_real(c.step_size)
      << "\niterations=" << c.iterations << "\ngrid=" << grid.size() << "\n";
}

struct Prepared {
  Classifier model;
  std::vector<Sample> samples;
};

Prepared load_inputs(const AttackFlags& f) {
  Prepared p{load_model(f.model), {}};
  p.samples = load_dataset(f.data, p.model.input_dim());
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    if (p.samples[i].label >= p.model.num_classes()) {
      throw ValidationError("sample " + std::to_string(i) + " label exceeds the model's classes");
    }
  }
  return p;
}

// Shared by `attack` and `compare`.
int run_evaluation(const AttackFlags& f, const std::vector<std::string>& attack_names,
                   std::ostream& out) {
  std::vector<AttackSpec> specs;
  std::vector<std::pair<std::string, AttackConfig>> lb_configs;
  std::vector<std::pair<std::string, BaselineConfig>> bl_configs;

  for (const std::string& name : attack_names) {
    if (name == "logbarrier") {
      lb_configs.emplace_back("logbarrier_" + f.norm, resolve_logbarrier(f));
    } else if (name == "ifgsm") {
      bl_configs.emplace_back("ifgsm", resolve_baseline(f, BaselineConfig::Kind::kIfgsm));
    } else if (name == "pgd") {
      bl_configs.emplace_back("pgd", resolve_baseline(f, BaselineConfig::Kind::kPgdL2));
    } else {
      throw InvalidInput("unknown attack '" + name + "'");
    }
  }
  if (f.dry_run) {
    for (const auto& [name, c] : lb_configs) print_config(out, name, c);
    for (const auto& [name, c] : bl_configs) print_config(out, name, c, f.eps_grid);
    return kExitOk;
  }
  if (f.out.empty()) throw InvalidInput("--out is required unless --dry-run is given");
  if (!std::is_sorted(f.eps_grid.begin(), f.eps_grid.end())) {
    throw InvalidInput("--eps-grid must be ascending");
  }

  const Prepared in = load_inputs(f);
  for (const auto& [name, c] : lb_configs) c.validate_for(in.model);

  std::vector<std::vector<Vector>> adversarial(attack_names.size(),
                                               std::vector<Vector>(in.samples.size()));
  for (std::size_t a = 0; a < attack_names.size(); ++a) {
    AttackSpec spec;
    const std::string& name = attack_names[a];
    std::vector<Vector>* store = &adversarial[a];
    if (name == "logbarrier") {
      const AttackConfig base = lb_configs.front().second;
      spec.name = lb_configs.front().first;
      spec.norm = f.norm == "l2" ? Norm::kL2 : Norm::kLinf;
      spec.run = [&model = in.model, base, store](const Sample& s, std::size_t i) {
        AttackConfig c = base;
        c.seed = base.seed + i;
        AttackResult r = run_logbarrier(model, s, c);
        (*store)[i] = r.adversarial;
        return r;
      };
    } else {
      const auto it = std::find_if(bl_configs.begin(), bl_configs.end(),
                                   [&](const auto& p) { return p.first == name; });
      const BaselineConfig base = it->second;
      const std::vector<double> grid = f.eps_grid;
      spec.name = name;
      spec.norm = name == "ifgsm" ? Norm::kLinf : Norm::kL2;
      spec.run = [&model = in.model, base, grid, store](const Sample& s, std::size_t i) {
        AttackResult r = grid.empty() ? run_baseline(model, s, base)
                                      : smallest_successful_radius(model, s, base.kind, grid).result;
        (*store)[i] = r.adversarial;
        return r;
      };
    }
    specs.push_back(std::move(spec));
  }

  const EvaluationReport report =
      evaluate(in.model, in.samples, specs, f.thresholds, f.quantiles, f.threads);
  write_report(report, f.out, f.format == "csv" ? ReportFormat::kCsv : ReportFormat::kStructured);
  for (const AttackSummary& s : report.summaries) {
    emit_curve(report, s.attack, fs::path(f.out) / ("curve_" + s.attack + ".csv"));
  }
  if (!f.adv_out.empty()) {
    std::ofstream adv(f.adv_out, std::ios::binary);
    if (!adv) throw IoError("cannot open " + f.adv_out + " for writing");
    adv << "id,attack,pixels...\n";
    for (std::size_t a = 0; a < specs.size(); ++a) {
      for (std::size_t i = 0; i < in.samples.size(); ++i) {
        const Vector& u = adversarial[a][i].empty() ? in.samples[i].pixels : adversarial[a][i];
        adv << i << ',' << specs[a].name;
        for (double v : u) adv << ',' << format_real(v);
        adv << '\n';
      }
    }
  }

  for (const AttackSummary& s : report.summaries) {
    out << s.attack << ": " << s.successes << "/" << s.samples << " succeeded";
    if (s.successes > 0) {
      out << ", mean " << (s.norm == Norm::kL2 ? "l2 " : "linf ")
          << format_real(s.norm == Norm::kL2 ? s.mean_l2 : s.mean_linf);
    }
    out << "\n";
  }
  return kExitOk;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> widths;
  if (text.empty()) return widths;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      const long v = std::stol(cell);
      if (v <= 0) throw InvalidInput("hidden widths must be positive");
      widths.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw InvalidInput("bad hidden width '" + cell + "'");
    }
  }
  return widths;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LogBarrier adversarial attack toolkit", "logbarrier"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train a fixture classifier");
  std::string train_data;
  std::string train_out;
  std::string write_data;
  std::string hidden;
  std::size_t blobs = 0;
  std::size_t classes = 0;
  std::size_t dim = 2;
  double spread = 0.08;
  TrainOptions topt;
  train->add_option("--data", train_data, "Training CSV");
  train->add_option("--blobs", blobs, "Generate this many Gaussian-blob samples instead of --data");
  train->add_option("--dim", dim, "Input dimension of generated blobs")->check(CLI::PositiveNumber);
  train->add_option("--spread", spread, "Standard deviation of generated blobs");
  train->add_option("--write-data", write_data, "Save the generated dataset here");
  train->add_option("--classes", classes, "Number of classes (default: max label + 1)");
  train->add_option("--hidden", hidden, "Comma-separated hidden widths, e.g. 16,16");
  train->add_option("--epochs", topt.epochs, "Full-batch epochs");
  train->add_option("--lr", topt.learning_rate, "Learning rate");
  train->add_option("--temperature", topt.temperature, "Softmax temperature of the model");
  train->add_option("--seed", topt.seed, "Initialisation seed");
  train->add_option("--out", train_out, "Where to write the model")->required();

  // attack / compare
  auto* attack = app.add_subcommand("attack", "Run one attack over a dataset");
  AttackFlags attack_flags;
  std::string attack_name = "logbarrier";
  add_attack_flags(*attack, attack_flags);
  attack->add_option("--attack", attack_name, "Attack to run")
      ->check(CLI::IsMember({"logbarrier", "ifgsm", "pgd"}));
  attack->add_option("--adv-out", attack_flags.adv_out, "Write adversarial points to this CSV");

  auto* compare = app.add_subcommand("compare", "Evaluate several attacks on a dataset");
  AttackFlags compare_flags;
  std::vector<std::string> compare_attacks{"logbarrier", "ifgsm", "pgd"};
  add_attack_flags(*compare, compare_flags);
  compare->add_option("--attacks", compare_attacks, "Attacks to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"logbarrier", "ifgsm", "pgd"}));

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Closed-form boundary distances for linear models");
  std::string oracle_model;
  std::string oracle_data;
  std::string oracle_norm = "l2";
  std::string oracle_out;
  oracle->add_option("--model", oracle_model, "Model file")->required();
  oracle->add_option("--data", oracle_data, "Dataset CSV")->required();
  oracle->add_option("--norm", oracle_norm, "Norm")->check(CLI::IsMember({"l2", "linf"}));
  oracle->add_option("--out", oracle_out, "Output CSV (default: stdout)");

  // curve
  auto* curve = app.add_subcommand("curve", "Emit defense-curve data from a per-sample report");
  std::string curve_report;
  std::string curve_attack;
  std::string curve_out;
  curve->add_option("--report", curve_report, "per_sample.csv written by attack/compare")
      ->required();
  curve->add_option("--attack", curve_attack, "Only this attack (default: all)");
  curve->add_option("--out", curve_out, "Output directory")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("logbarrier");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : app.get_subcommands()) sub = s;
    err << (sub != nullptr ? sub->help() : app.help());
    return kExitValidation;
  }

  try {
    if (*train) {
      std::vector<Sample> data;
      if (blobs > 0) {
        const std::size_t k = classes == 0 ? 2 : classes;
        data = make_blobs(blobs, k, dim, spread, topt.seed);
        if (!write_data.empty()) save_dataset(data, write_data);
      } else if (!train_data.empty()) {
        data = load_dataset(train_data);
      } else {
        throw InvalidInput("train needs --data or --blobs");
      }
      if (data.empty()) throw InvalidInput("training set is empty");
      std::size_t max_label = 0;
      for (const Sample& s : data) max_label = std::max(max_label, s.label);
      topt.num_classes = classes == 0 ? std::max<std::size_t>(2, max_label + 1) : classes;
      topt.hidden = parse_widths(hidden);
      const TrainResult r = train_toy(data, topt);
      save_model(r.model, train_out);
      out << "train accuracy " << format_real(r.train_accuracy) << ", loss "
          << format_real(r.final_loss) << "\n";
      return kExitOk;
    }
    if (*attack) return run_evaluation(attack_flags, {attack_name}, out);
    if (*compare) return run_evaluation(compare_flags, compare_attacks, out);
    if (*oracle) {
      const Classifier model = load_model(oracle_model);
      const std::vector<Sample> data = load_dataset(oracle_data, model.input_dim());
      const Norm norm = oracle_norm == "l2" ? Norm::kL2 : Norm::kLinf;
      std::ostringstream csv;
      csv << "id,label,distance,nearest_class,in_box\n";
      for (std::size_t i = 0; i < data.size(); ++i) {
        const LinearOracle o = linear_oracle_detail(model, data[i], norm);
        csv << i << ',' << data[i].label << ',' << format_real(o.distance) << ','
            << o.nearest_class << ',' << (o.projection_in_box ? 1 : 0) << '\n';
      }
      if (oracle_out.empty()) {
        out << csv.str();
      } else {
        std::ofstream file(oracle_out, std::ios::binary);
        if (!file) throw IoError("cannot open " + oracle_out + " for writing");
        file << csv.str();
      }
      return kExitOk;
    }
    if (*curve) {
      std::vector<SampleRecord> rows = read_per_sample_csv(curve_report);
      const EvaluationReport report = summarize(std::move(rows), {}, {}, norm_for_attack_name);
      std::error_code ec;
      fs::create_directories(curve_out, ec);
      if (ec) throw IoError("cannot create " + curve_out + ": " + ec.message());
      for (const AttackSummary& s : report.summaries) {
        if (!curve_attack.empty() && s.attack != curve_attack) continue;
        emit_curve(report, s.attack, fs::path(curve_out) / ("curve_" + s.attack + ".csv"));
      }
      if (!curve_attack.empty() && report.find(curve_attack) == nullptr) {
        throw InvalidInput("attack '" + curve_attack + "' not present in the report");
      }
      return kExitOk;
    }
  } catch (const TrainingDiverged& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const InfeasiblePoint& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    // Bad flags, unreadable or malformed inputs.
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace logbarrier::cli
