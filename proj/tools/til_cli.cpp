// til: command-line front end for the tensor Ising toolkit.
#include "til/curie_weiss.hpp"
#include "til/dobrushin.hpp"
#include "til/glauber.hpp"
#include "til/io.hpp"
#include "til/tensor.hpp"
#include "til/tsl.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using til::Json;

// Every line goes out in one write followed by a flush, so partial runs stay valid JSON-lines.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::out | std::ios::trunc);
      if (!*file_) throw til::ParseError(path + ": cannot open for writing");
    }
  }
  void line(const std::string& s) {
    std::ostream& os = file_ ? *file_ : std::cout;
    os << s + "\n";
    os.flush();
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string dump(const Json& j, bool pretty) { return pretty ? j.dump(2) : j.dump(); }

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    std::stringstream ts(tok);
    T v{};
    if (!(ts >> v) || !ts.eof()) throw til::ParseError(what + ": cannot parse \"" + tok + "\"");
    out.push_back(v);
  }
  if (out.empty()) throw til::ParseError(what + ": empty list");
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor Ising toolkit: exact Glauber gaps, Dobrushin certificates, tensorized localization, "
               "tensor Curie-Weiss experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path, format = "json";
  app.add_option("--seed", seed, "global seed, split per trajectory");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  // gap
  auto* gap = app.add_subcommand("gap", "exact spectral gap of Glauber dynamics for a potential file");
  std::string gap_file;
  gap->add_option("potential", gap_file, "tensor or potential JSON file")->required();

  // certify
  auto* cert = app.add_subcommand("certify", "336n spectral-gap certificate for a quartic tensor");
  std::string cert_file;
  int starts = 64;
  double inj_tol = 1e-10;
  cert->add_option("tensor", cert_file, "tensor JSON file")->required();
  cert->add_option("--starts", starts, "gradient-ascent starts for the injective lower bound");
  cert->add_option("--tol", inj_tol, "ascent stopping tolerance");

  // dobrushin
  auto* dob = app.add_subcommand("dobrushin", "influence and derivative matrices with the additive bound");
  std::string dob_file;
  dob->add_option("potential", dob_file, "tensor or potential JSON file")->required();

  // decompose
  auto* dec = app.add_subcommand("decompose", "sample components of the eight-vector decomposition");
  std::string dec_file, phi_spec = "magnetization";
  int samples = 100;
  til::TslParams tsl;
  double dt_abs = 0.0;
  dec->add_option("tensor", dec_file, "tensor JSON file")->required();
  dec->add_option("--samples", samples, "number of sampled components")->check(CLI::NonNegativeNumber);
  dec->add_option("--delta", tsl.delta, "smoothing scale");
  dec->add_option("--dt", tsl.dt_rel, "step size as a fraction of each stage's initial trace");
  dec->add_option("--dt-abs", dt_abs, "absolute step size (overrides --dt)");
  dec->add_option("--rank-tol", tsl.rank_tol, "relative eigenvalue floor for rank counting");
  dec->add_option("--phi", phi_spec, "test function: magnetization | coord:i | pair:i:j | random:seed");

  // cw
  auto* cw = app.add_subcommand("cw", "tensor Curie-Weiss hitting-time experiments");
  std::string n_list = "20,40,60", beta_list = "0.7";
  double deg = 4.0;
  int cw_seeds = 20;
  long long budget = 100'000'000;
  bool print_beta_star = false, sweep = false;
  cw->add_option("--n-list", n_list, "comma-separated dimensions");
  cw->add_option("--beta-list", beta_list, "comma-separated inverse temperatures");
  cw->add_option("--p", deg, "interaction degree");
  cw->add_option("--seeds", cw_seeds, "runs per (n, beta)")->check(CLI::PositiveNumber);
  cw->add_option("--budget", budget, "step budget before censoring");
  cw->add_flag("--beta-star", print_beta_star, "print beta*(p) and exit");
  cw->add_flag("--sweep", sweep, "emit per-(n, beta) medians instead of per-run rows");

  // gaussian-sweep
  auto* gs = app.add_subcommand("gaussian-sweep", "injective-norm sandwich for Gaussian quartic tensors");
  std::string gs_n = "30", norm_kind = "per-orbit";
  int gs_seeds = 20;
  gs->add_option("--n-list", gs_n, "comma-separated dimensions");
  gs->add_option("--seeds", gs_seeds, "tensors per dimension")->check(CLI::PositiveNumber);
  gs->add_option("--starts", starts, "gradient-ascent starts");
  gs->add_option("--normalization", norm_kind, "per-orbit or symmetrized")
      ->check(CLI::IsMember({"per-orbit", "symmetrized"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const bool csv = format == "csv";
  try {
    Sink sink(out_path);
    if (*gap) {
      const til::Potential p = til::potential_from_json(til::read_json_file(gap_file));
      const til::GlauberKernel K(p.table, p.n);
      const til::SpectralReport r = til::exact_spectral_gap(K);
      if (csv) {
        sink.line("gap,generator_gap,poincare,poincare_variational,convention");
        sink.line(fmt(r.gap) + "," + fmt(r.generator_gap) + "," + fmt(r.poincare_constant) + "," +
                  fmt(r.variational_poincare) + "," + til::to_string(r.convention));
      } else {
        Json j = til::to_json(r);
        j["n"] = p.n;
        sink.line(dump(j, true));
      }
    } else if (*cert) {
      const til::SymTensor4 T = til::tensor_from_json(til::read_json_file(cert_file));
      const til::Certificate c = til::tensor_gap_certificate(T, {starts, inj_tol, seed});
      sink.line(dump(til::to_json(c), true));
    } else if (*dob) {
      const til::Potential p = til::potential_from_json(til::read_json_file(dob_file));
      const til::InfluenceMatrix A = til::influence_matrix_exact(p.table, p.n);
      const til::DerivativeMatrix D = til::derivative_matrix_exact(p.table, p.n);
      auto mat = [](const til::Mat& M) {
        Json rows = Json::array();
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
          Json r = Json::array();
          for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
          rows.push_back(r);
        }
        return rows;
      };
      Json j{{"n", p.n},
             {"influence", mat(A.A)},
             {"influence_norm", A.norm()},
             {"derivative", mat(D.D)},
             {"additive_bound", til::additive_bound({D})}};
      if (A.norm() < 1.0) j["dobrushin_poincare_bound"] = 1.0 / (1.0 - A.norm());
      if (p.n <= til::kDenseKernelCap) {
        const til::SpectralReport r = til::exact_spectral_gap(til::GlauberKernel(p.table, p.n));
        j["poincare_exact"] = r.poincare_constant;
      }
      if (p.tensor) j["certificate"] = til::to_json(til::tensor_gap_certificate(*p.tensor, {starts, inj_tol, seed}));
      sink.line(dump(j, true));
    } else if (*dec) {
      const til::SymTensor4 T = til::tensor_from_json(til::read_json_file(dec_file));
      const til::Vec phi = til::parse_test_function(phi_spec, T.n());
      if (dt_abs > 0.0) tsl.dt = dt_abs;
      const til::Decomposition4 d = til::full_decomposition(T, phi, tsl, seed, samples, threads);
      int ok[5] = {0, 0, 0, 0, 0}, at_start = 0;
      std::vector<til::Vec> dens;
      std::vector<double> wts;
      for (const auto& c : d.components) {
        sink.line(til::to_json(c).dump());
        ok[0] += c.ledger.orthogonal;
        ok[1] += c.ledger.uv_norms;
        ok[2] += c.ledger.w_norms;
        ok[3] += c.ledger.M_norms;
        ok[4] += c.ledger.tau_first;
        at_start += c.stopped_at_start;
        dens.push_back(c.density);
        wts.push_back(c.weight);
      }
      const double k = std::max(1, samples);
      Json s{{"samples", samples},
             {"n", d.setup.n},
             {"inj_upper", d.setup.inj_upper},
             {"trace", d.setup.trace},
             {"shifted", d.setup.shifted},
             {"shift", d.setup.shift},
             {"ledger_pass_rate",
              {{"orthogonal", ok[0] / k},
               {"uv_norms", ok[1] / k},
               {"w_norms", ok[2] / k},
               {"M_norms", ok[3] / k},
               {"tau_first", ok[4] / k}}}};
      if (samples >= 2) {
        const til::EnsembleTv tv = til::ensemble_tv(dens, wts, d.setup.target.weights());
        s["ensemble_tv"] = tv.tv;
        s["ensemble_tv_sigma"] = tv.sigma;
      }
      if (samples > 0 && at_start == samples) s["note"] = "stopped at start";
      sink.line(Json{{"summary", s}}.dump());
    } else if (*cw) {
      if (print_beta_star) {
        sink.line(fmt(til::beta_star(deg)));
        return 0;
      }
      const auto ns = parse_list<int>(n_list, "--n-list");
      const auto betas = parse_list<double>(beta_list, "--beta-list");
      if (sweep)
        sink.line("n,beta,p,median_steps,censored,runs");
      else
        sink.line("n,beta,p,seed,hitting_steps,censored");
      std::uint64_t block = 0;
      for (double b : betas) {
        const auto rows = til::hitting_time_experiment(ns, deg, b, cw_seeds, til::split_seed(seed, block++), budget,
                                                       threads);
        if (sweep) {
          for (const auto& s : til::summarize_hitting(rows))
            sink.line(std::to_string(s.n) + "," + fmt(b) + "," + fmt(deg) + "," + fmt(s.median) + "," +
                      std::to_string(s.censored) + "," + std::to_string(s.runs));
        } else {
          for (const auto& r : rows)
            sink.line(std::to_string(r.n) + "," + fmt(r.beta) + "," + fmt(r.p) + "," + std::to_string(r.seed) + "," +
                      std::to_string(r.steps) + "," + (r.censored ? "1" : "0"));
        }
      }
    } else if (*gs) {
      const auto ns = parse_list<int>(gs_n, "--n-list");
      const auto kind = norm_kind == "symmetrized" ? til::GaussianNormalization::Symmetrized
                                                   : til::GaussianNormalization::PerOrbit;
      if (csv) sink.line("n,seed,inj_lower,inj_upper,n_inj_lower,n_inj_upper");
      std::uint64_t idx = 0;
      for (int n : ns)
        for (int k = 0; k < gs_seeds; ++k, ++idx) {
          const std::uint64_t sd = til::split_seed(seed, idx);
          til::Rng rng(sd);
          const til::SymTensor4 T = til::sample_gaussian_tensor(n, rng, 4, kind);
          const til::InjectiveNorm inj = til::injective_norm(T, {starts, inj_tol, til::split_seed(sd, 1)});
          if (csv)
            sink.line(std::to_string(n) + "," + std::to_string(sd) + "," + fmt(inj.lower) + "," + fmt(inj.upper) + "," +
                      fmt(n * inj.lower) + "," + fmt(n * inj.upper));
          else
            sink.line(Json{{"n", n},
                           {"seed", sd},
                           {"inj_lower", inj.lower},
                           {"inj_upper", inj.upper},
                           {"n_inj_lower", n * inj.lower},
                           {"n_inj_upper", n * inj.upper}}
                          .dump());
        }
    }
  } catch (const til::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const til::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
