#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arnold/energy.hpp"
#include "arnold/evolve.hpp"
#include "arnold/forms.hpp"
#include "arnold/grid.hpp"
#include "arnold/profiles.hpp"
#include "arnold/spectral.hpp"

namespace {

using namespace arnold;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kNonConvergence = 3;

/// Worker cap from ARNOLD_LAB_THREADS (>= 1); commands are currently
/// single-threaded, so the cap is honored trivially.
std::size_t thread_cap() {
  const char* env = std::getenv("ARNOLD_LAB_THREADS");
  if (!env) return 1;
  const long v = std::strtol(env, nullptr, 10);
  return v >= 1 ? std::size_t(v) : 1;
}

std::string jnum(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
  std::cout << "wrote " << path << "\n";
}

struct ProfileFlags {
  std::string name = "gaussian";
  double kappa = 2.0;
  double amplitude = 1.0;
};

Profile make_profile(const ProfileFlags& pf) {
  if (pf.name == "gaussian") return gaussian_profile(pf.amplitude);
  if (pf.name == "algebraic") return algebraic_profile(pf.kappa, pf.amplitude);
  throw std::invalid_argument("unknown profile '" + pf.name + "'");
}

void add_profile_flags(CLI::App* cmd, ProfileFlags& pf) {
  cmd->add_option("--profile", pf.name, "profile family: gaussian | algebraic")
      ->check(CLI::IsMember({"gaussian", "algebraic"}));
  cmd->add_option("--kappa", pf.kappa,
                  "decay exponent of the algebraic profile (> 1)");
  cmd->add_option("--amplitude", pf.amplitude, "profile amplitude at r = 0");
}

std::string report_csv(const SpectralReport& rep) {
  std::ostringstream os;
  os.precision(12);
  os << "r";
  for (std::size_t j = 0; j < rep.eigenfunctions.size(); ++j)
    os << ",ef" << j;
  os << "\n";
  for (std::size_t i = 0; i < rep.abscissae.size(); ++i) {
    os << rep.abscissae[i];
    for (const auto& ef : rep.eigenfunctions) os << ',' << ef[i];
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- profile --

int run_profile(const ProfileFlags& pf, std::size_t N, double rmax,
                const std::string& mapping, const std::string& out) {
  const Profile prof = make_profile(pf);
  const RadialGrid g = make_grid(N, rmax, mapping_from_string(mapping));
  std::ostringstream csv;
  csv.precision(12);
  csv << "r,omega,A,B,V,W,chi\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r[i];
    csv << r << ',' << prof.omega(r) << ',' << prof.weight_A(r) << ','
        << prof.weight_B(r) << ',' << prof.weight_V(r) << ','
        << prof.weight_W(r) << ',' << prof.chi(r) << "\n";
  }
  const HardyOrdering ord = vsign_hardy_check(prof, g);
  std::ostringstream js;
  js << "{\"profile\": \"" << pf.name << "\"";
  if (prof.kind() == ProfileKind::algebraic)
    js << ", \"kappa\": " << jnum(prof.kappa());
  js << ", \"amplitude\": " << jnum(prof.amplitude())
     << ", \"beta\": " << jnum(prof.beta())
     << ", \"mass\": " << jnum(prof.mass())
     << ", \"A_origin\": " << jnum(prof.weight_A(0.0))
     << ", \"B_origin\": " << jnum(prof.weight_B(0.0))
     << ", \"hardy_sign\": \"" << to_string(ord) << "\"}";
  write_file(out, "profile.csv", csv.str());
  write_file(out, "profile.json", js.str() + "\n");
  std::cout << js.str() << "\n";
  return kOk;
}

// ------------------------------------------------------------------ hardy --

int run_hardy(const ProfileFlags& pf, std::size_t N, double rmax,
              const std::string& out) {
  const Profile prof = make_profile(pf);
  const RadialGrid g = make_grid(N, rmax, Mapping::log_r);
  const SpectralReport rep = hardy_constant(prof, g);
  write_file(out, "hardy.json", rep.to_json() + "\n");
  write_file(out, "hardy.csv", report_csv(rep));
  std::cout << "C_H = " << rep.derived.at("C_H")
            << (rep.converged ? "" : "  [not converged]") << "\n";
  return rep.converged ? kOk : kNonConvergence;
}

// --------------------------------------------------------------- spectrum --

int run_spectrum(const std::string& op, const ProfileFlags& pf, int k,
                 double lambda, double trial_alpha, bool improved,
                 std::size_t N, double rmax, const std::string& out) {
  if (op == "rayleigh") {
    const RadialGrid g = make_grid(N, rmax, Mapping::uniform_r);
    const auto [lo, hi] = rayleigh_mu1_bounds(trial_alpha, improved, g);
    std::ostringstream js;
    js << "{\"op\": \"rayleigh\", \"trial_alpha\": " << jnum(trial_alpha)
       << ", \"improved\": " << (improved ? "true" : "false")
       << ", \"mu1_lower\": " << jnum(lo) << ", \"mu1_upper\": " << jnum(hi)
       << "}";
    write_file(out, "spectrum.json", js.str() + "\n");
    std::cout << js.str() << "\n";
    return kOk;
  }
  SpectralReport rep;
  if (op == "btilde1") {
    rep = btilde1_spectrum(make_profile(pf), make_grid(N, rmax, Mapping::log_r));
  } else if (op == "kernel") {
    rep = kernel_index(make_profile(pf), make_grid(N, rmax, Mapping::log_r),
                       lambda);
  } else if (op == "lk") {
    rep = lk_spectrum(k, make_grid(N, rmax, Mapping::uniform_r));
  } else if (op == "generalized_l0") {
    rep = generalized_L0(make_grid(N, rmax, Mapping::uniform_r));
  } else if (op == "quasimode") {
    rep = quasimode_analysis(make_grid(N, rmax, Mapping::uniform_r));
  } else {
    throw std::invalid_argument("unknown spectrum op '" + op + "'");
  }
  write_file(out, "spectrum.json", rep.to_json() + "\n");
  if (!rep.eigenfunctions.empty())
    write_file(out, "spectrum.csv", report_csv(rep));
  std::cout << rep.to_json() << "\n";
  return rep.converged ? kOk : kNonConvergence;
}

// ------------------------------------------------------------------ forms --

int run_forms(std::size_t N, double rmax, int kmax, std::uint64_t seed,
              const std::string& out) {
  const Profile prof = gaussian_profile();
  const GammaEstimate ge = gamma_estimate(prof, make_grid(N, rmax, Mapping::log_r));
  const RadialGrid gu = make_grid(N, std::min(rmax, 30.0), Mapping::uniform_r);
  const DeltaEstimate de = delta_estimate(gu);
  const PolarField sample = random_field(gu, seed, kmax, 4);
  const FormValues fv = form_values(sample, prof, ge.gamma, de.delta);
  std::ostringstream js;
  js << "{\"gamma\": {\"gamma\": " << jnum(ge.gamma)
     << ", \"c1_prime\": " << jnum(ge.c1_prime)
     << ", \"hardy\": " << jnum(ge.hardy) << ", \"radial_sector_coercive\": "
     << (ge.radial_sector_coercive ? "true" : "false") << "}"
     << ", \"delta\": {\"delta\": " << jnum(de.delta)
     << ", \"delta0\": " << jnum(de.delta0) << ", \"delta1\": "
     << jnum(de.delta1) << ", \"delta2\": " << jnum(de.delta2)
     << ", \"delta_high\": " << jnum(de.delta_high)
     << ", \"overlap0\": " << jnum(de.overlap0)
     << ", \"overlap1\": " << jnum(de.overlap1) << "}"
     << ", \"sample_seed\": " << seed << ", \"sample\": " << fv.to_json()
     << "}";
  write_file(out, "forms.json", js.str() + "\n");
  write_file(out, "forms.csv", field_to_csv(sample));
  std::cout << js.str() << "\n";
  return kOk;
}

// ----------------------------------------------------------------- energy --

int run_energy(const ProfileFlags& pf, std::size_t N, double rmax, double rmin,
               const std::string& out) {
  const Profile prof = make_profile(pf);
  const RadialGrid g = make_grid(N, rmax, Mapping::log_r, rmin);
  const Vec om = prof.omega(g.r);
  const double er = energy_radial(om, g);
  PolarField f(g);
  CVec m0(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m0[i] = om[i];
  f.set_mode(0, m0);
  const double em = energy_modes(f);
  const ConstraintProfile cp = constraint_profile(prof, 1.0);
  const double eh = energy_via_h(cp);
  const EntropyFunction ent =
      prof.kind() == ProfileKind::gaussian
          ? entropy_catalog(EntropyKind::gaussian)
          : entropy_catalog(EntropyKind::algebraic_kappa, prof.kappa());
  const FreeEnergyValue fe = free_energy(f, ent);
  const auto hyp = ent.hyp_constants(cp.M0);
  std::ostringstream js;
  js << "{\"profile\": \"" << pf.name << "\""
     << ", \"mass\": " << jnum(cp.M0) << ", \"E_radial\": " << jnum(er)
     << ", \"E_modes\": " << jnum(em) << ", \"E_via_h\": " << jnum(eh)
     << ", \"F\": " << jnum(fe.F) << ", \"S\": " << jnum(fe.S)
     << ", \"entropy_tail_bound\": " << jnum(fe.tail_bound)
     << ", \"log_hls_gap\": " << jnum(log_hls_gap(f))
     << ", \"hyp\": {\"C1\": " << jnum(hyp.C1) << ", \"C2\": " << jnum(hyp.C2)
     << ", \"C3\": " << jnum(hyp.C3) << ", \"verdict\": \""
     << to_string(hyp.verdict) << "\"}}";
  write_file(out, "energy.json", js.str() + "\n");
  std::cout << js.str() << "\n";
  return kOk;
}

// --------------------------------------------------------------- maximize --

int run_maximize(const std::string& entropy_name, double kappa, double mass,
                 std::size_t N, double rmax, std::uint64_t seed,
                 const std::string& out) {
  const EntropyFunction ent =
      entropy_name == "gaussian"
          ? entropy_catalog(EntropyKind::gaussian)
          : entropy_catalog(EntropyKind::algebraic_kappa, kappa);
  const RadialGrid g = make_grid(N, rmax, Mapping::log_r);
  const MaximizeResult res = maximize_free_energy(ent, mass, g, seed);
  write_file(out, "maximize.json", res.to_json() + "\n");
  write_file(out, "maximize.csv", res.to_csv(g));
  std::cout << res.to_json() << "\n";
  return res.converged ? kOk : kNonConvergence;
}

// ----------------------------------------------------------------- evolve --

int run_evolve(const std::string& config_path, const std::string& out) {
  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "cannot read config " << config_path << "\n";
    return kValidation;
  }
  nlohmann::json cfg;
  try {
    is >> cfg;
  } catch (const std::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return kValidation;
  }
  try {
    const double alpha = cfg.at("alpha").get<double>();
    const double T = cfg.at("T").get<double>();
    const std::size_t N = cfg.value("N", 512);
    const double rmax = cfg.value("rmax", 20.0);
    const int kmax = cfg.value("kmax", 16);
    const bool no_diffusion = cfg.value("no_diffusion", false);
    const bool no_cubic = cfg.value("no_cubic", false);
    RunParams params;
    params.T = T;
    params.stride = cfg.value("stride", 10);
    if (cfg.contains("dt")) {
      if (cfg["dt"].is_string()) {
        if (cfg["dt"].get<std::string>() != "auto")
          throw std::invalid_argument("dt must be a number or \"auto\"");
        params.dt = 0.0;
      } else {
        params.dt = cfg["dt"].get<double>();
      }
    }
    const Simulator sim(N, rmax, kmax, alpha, no_diffusion, no_cubic);

    const nlohmann::json& init = cfg.at("init");
    const std::string type = init.value("type", "mode_bump");
    PolarField seed(sim.grid());
    if (type == "mode_bump") {
      const int k = init.value("k", 2);
      const Cplx amp(init.value("re", 1.0), init.value("im", 0.0));
      CVec mode(sim.grid().size());
      for (std::size_t i = 0; i < mode.size(); ++i) {
        const double r = sim.grid().r[i];
        mode[i] = amp * r * r * std::exp(-r * r / 4.0);
      }
      seed.set_mode(k, mode);
    } else if (type == "random") {
      seed = random_field(sim.grid(), init.value("seed", std::uint64_t(1)),
                          init.value("k_band", std::min(kmax, 4)), 4);
    } else {
      throw std::invalid_argument("init.type must be mode_bump or random");
    }
    EvolState st = sim.init_state(seed, init.value("x_norm", 1e-3));

    TrajectoryLog lg = sim.run(st, params);
    std::ostringstream js;
    js << "{\"alpha\": " << jnum(alpha) << ", \"T\": " << jnum(T)
       << ", \"stride\": " << params.stride
       << ", \"samples\": " << lg.times.size()
       << ", \"fitted_mu\": " << jnum(lg.fitted_mu)
       << ", \"blew_up\": " << (lg.blew_up ? "true" : "false")
       << ", \"blowup_time\": " << jnum(lg.blowup_time)
       << ", \"final_J\": " << jnum(lg.J.back())
       << ", \"final_xnorm\": " << jnum(lg.xnorm.back()) << "}";
    write_file(out, "evolve.csv", lg.to_csv());
    write_file(out, "evolve.json", js.str() + "\n");
    std::cout << js.str() << "\n";
    return lg.blew_up ? kNonConvergence : kOk;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kValidation;
  }
}

// ----------------------------------------------------------------- verify --

struct Check {
  std::string name;
  std::function<std::pair<bool, std::string>()> fn;
};

int run_checks(const std::vector<Check>& checks) {
  (void)thread_cap();  // current implementation runs on one worker
  int failures = 0;
  for (const auto& c : checks) {
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = c.fn();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << c.name
              << (detail.empty() ? "" : "  (" + detail + ")") << "\n";
  }
  std::cout << (failures == 0 ? "all checks passed"
                              : std::to_string(failures) + " check(s) failed")
            << "\n";
  return failures == 0 ? kOk : kValidation;
}

std::vector<Check> appendix_checks() {
  std::vector<Check> cs;
  cs.push_back({"V > 0 at all nodes (gaussian)", [] {
                  const RadialGrid g = make_grid(512, 40.0, Mapping::log_r);
                  const Vec v = gaussian_profile().weight_V(g.r);
                  double mn = 1e300;
                  for (double x : v) mn = std::min(mn, x);
                  return std::make_pair(mn > 0,
                                        "min V = " + jnum(mn));
                }});
  cs.push_back({"V > 0 at all nodes (kappa = 3)", [] {
                  const RadialGrid g = make_grid(512, 40.0, Mapping::log_r);
                  const Vec v = algebraic_profile(3.0).weight_V(g.r);
                  double mn = 1e300;
                  for (double x : v) mn = std::min(mn, x);
                  return std::make_pair(mn > 0, "min V = " + jnum(mn));
                }});
  cs.push_back({"V < 0 at all nodes (kappa = 1.5)", [] {
                  const RadialGrid g = make_grid(512, 100.0, Mapping::log_r);
                  const Vec v = algebraic_profile(1.5).weight_V(g.r);
                  double mx = -1e300;
                  for (double x : v) mx = std::max(mx, x);
                  return std::make_pair(mx < 0, "max V = " + jnum(mx));
                }});
  cs.push_back({"V vanishes identically (kappa = 2)", [] {
                  const RadialGrid g = make_grid(512, 40.0, Mapping::log_r);
                  const Vec v = algebraic_profile(2.0).weight_V(g.r);
                  double mx = 0;
                  for (double x : v) mx = std::max(mx, std::abs(x));
                  return std::make_pair(mx < 1e-10, "max |V| = " + jnum(mx));
                }});
  cs.push_back({"B/A nonincreasing with range [1/2, 7/4] (gaussian)", [] {
                  const RadialGrid g = make_grid(1024, 40.0, Mapping::log_r);
                  const Profile p = gaussian_profile();
                  double prev = 1e300;
                  bool ok = true;
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    const double q =
                        p.weight_B(g.r[i]) / p.weight_A(g.r[i]);
                    if (q > prev + 1e-12 || q < 0.5 - 1e-12 ||
                        q > 1.75 + 1e-12)
                      ok = false;
                    prev = q;
                  }
                  return std::make_pair(ok, std::string());
                }});
  cs.push_back({"(B - 1)/A < 3/4 (gaussian)", [] {
                  const RadialGrid g = make_grid(1024, 40.0, Mapping::log_r);
                  const Profile p = gaussian_profile();
                  double mx = -1e300;
                  for (std::size_t i = 0; i < g.size(); ++i)
                    mx = std::max(mx, (p.weight_B(g.r[i]) - 1.0) /
                                          p.weight_A(g.r[i]));
                  return std::make_pair(mx < 0.75, "sup = " + jnum(mx));
                }});
  cs.push_back({"W > r^2/16 - 3/2 (gaussian)", [] {
                  const RadialGrid g = make_grid(1024, 40.0, Mapping::log_r);
                  const Profile p = gaussian_profile();
                  bool ok = true;
                  for (std::size_t i = 0; i < g.size(); ++i)
                    if (p.weight_W(g.r[i]) <=
                        g.r[i] * g.r[i] / 16.0 - 1.5)
                      ok = false;
                  return std::make_pair(ok, std::string());
                }});
  cs.push_back({"quasimode residual norm identity", [] {
                  const SpectralReport rep =
                      quasimode_analysis(make_grid(1024, 30.0, Mapping::uniform_r));
                  const double exact =
                      (3.0 - std::log(2.0) - 2.0 * std::log(kPi)) /
                      (16.0 * std::log(2.0));
                  const double got = rep.derived.at("norm_R_sq");
                  const double rel = std::abs(got / exact - 1.0);
                  return std::make_pair(rel < 1e-6, "rel = " + jnum(rel));
                }});
  cs.push_back({"quasimode overlap identity", [] {
                  const SpectralReport rep =
                      quasimode_analysis(make_grid(1024, 30.0, Mapping::uniform_r));
                  const double exact =
                      std::sqrt(6.0 / std::log(2.0)) / kPi;
                  const double got = rep.derived.at("overlap");
                  const double rel = std::abs(got / exact - 1.0);
                  return std::make_pair(rel < 1e-6, "rel = " + jnum(rel));
                }});
  cs.push_back({"lowest radial eigenvalue bracket", [] {
                  const SpectralReport rep =
                      quasimode_analysis(make_grid(1024, 30.0, Mapping::uniform_r));
                  const double lo = rep.derived.at("mu0_lower");
                  const double hi = rep.derived.at("mu0_upper");
                  const SpectralReport lk =
                      lk_spectrum(0, make_grid(1024, 30.0, Mapping::uniform_r));
                  const double mu0 = lk.eigenvalues.at(0);
                  return std::make_pair(lo <= mu0 && mu0 <= hi,
                                        "mu0 = " + jnum(mu0) + " in [" +
                                            jnum(lo) + ", " + jnum(hi) + "]");
                }});
  return cs;
}

std::vector<Check> spectra_checks() {
  std::vector<Check> cs;
  cs.push_back({"Hardy constant gaussian = 0.57 +- 0.01", [] {
                  const SpectralReport rep = hardy_constant(
                      gaussian_profile(), make_grid(2048, 40.0, Mapping::log_r));
                  const double c = rep.derived.at("C_H");
                  return std::make_pair(std::abs(c - 0.57) < 0.01,
                                        "C_H = " + jnum(c));
                }});
  cs.push_back({"Hardy constant kappa=2 = 1 +- 1e-3", [] {
                  const SpectralReport rep = hardy_constant(
                      algebraic_profile(2.0), make_grid(2048, 40.0, Mapping::log_r));
                  const double c = rep.derived.at("C_H");
                  return std::make_pair(std::abs(c - 1.0) < 1e-3,
                                        "C_H = " + jnum(c));
                }});
  cs.push_back({"Hardy ordering kappa=3 (< 1), kappa=1.5 (> 1)", [] {
                  const double c3 =
                      hardy_constant(algebraic_profile(3.0),
                                     make_grid(2048, 40.0, Mapping::log_r))
                          .derived.at("C_H");
                  const double c15 =
                      hardy_constant(algebraic_profile(1.5),
                                     make_grid(2048, 1e3, Mapping::log_r))
                          .derived.at("C_H");
                  return std::make_pair(c3 < 1.0 && c15 > 1.0,
                                        "C_H(3) = " + jnum(c3) +
                                            ", C_H(1.5) = " + jnum(c15));
                }});
  cs.push_back({"first-mode operator radius 1 (gaussian, kappa=3)", [] {
                  const RadialGrid g = make_grid(1024, 40.0, Mapping::log_r);
                  const double r1 = btilde1_spectrum(gaussian_profile(), g)
                                        .derived.at("spectral_radius");
                  const double r3 = btilde1_spectrum(algebraic_profile(3.0), g)
                                        .derived.at("spectral_radius");
                  return std::make_pair(
                      std::abs(r1 - 1) < 1e-3 && std::abs(r3 - 1) < 1e-3,
                      "radius = " + jnum(r1) + ", " + jnum(r3));
                }});
  cs.push_back({"radial operator eigenvalues (k=0,1,3)", [] {
                  const RadialGrid g = make_grid(1024, 30.0, Mapping::uniform_r);
                  const SpectralReport l0 = lk_spectrum(0, g);
                  const SpectralReport l1 = lk_spectrum(1, g);
                  const SpectralReport l3 = lk_spectrum(3, g);
                  const bool ok =
                      std::abs(l0.eigenvalues.at(0) + 0.722) < 5e-3 &&
                      std::abs(l0.eigenvalues.at(1) - 0.615) < 5e-3 &&
                      std::abs(l1.eigenvalues.at(0)) < 1e-4 &&
                      l3.eigenvalues.at(0) >= 0.5;
                  return std::make_pair(
                      ok, "mu0 = " + jnum(l0.eigenvalues.at(0)) +
                              ", mu1 = " + jnum(l0.eigenvalues.at(1)));
                }});
  cs.push_back({"kernel top eigenvalue / index", [] {
                  const RadialGrid g = make_grid(1024, 40.0, Mapping::log_r);
                  const SpectralReport kg =
                      kernel_index(gaussian_profile(), g);
                  const SpectralReport k2 =
                      kernel_index(algebraic_profile(2.0), g);
                  const bool ok =
                      std::abs(kg.derived.at("top") - 0.7127) < 5e-3 &&
                      k2.derived.at("index") >= 1.0;
                  return std::make_pair(ok,
                                        "top = " + jnum(kg.derived.at("top")));
                }});
  return cs;
}

std::vector<Check> energy_checks() {
  std::vector<Check> cs;
  cs.push_back({"three-way energy agreement (gaussian)", [] {
                  const RadialGrid g =
                      make_grid(16385, 1e3, Mapping::log_r, 1e-6);
                  const Profile p = gaussian_profile();
                  const double er = energy_radial(p.omega(g.r), g);
                  const double eh =
                      energy_via_h(constraint_profile(p, 1.0));
                  const double rel = std::abs(eh / er - 1.0);
                  return std::make_pair(rel < 1e-6, "rel = " + jnum(rel));
                }});
  cs.push_back({"unit-disk patch energy = pi/16", [] {
                  const RadialGrid g = make_grid(32769, 2.0, Mapping::uniform_r);
                  Vec om(g.size());
                  for (std::size_t i = 0; i < g.size(); ++i)
                    om[i] = g.r[i] <= 1.0 ? 1.0 : 0.0;
                  const double rel =
                      std::abs(energy_radial(om, g) / (kPi / 16.0) - 1.0);
                  return std::make_pair(rel < 1e-8, "rel = " + jnum(rel));
                }});
  cs.push_back({"dilation scaling identity", [] {
                  const RadialGrid g =
                      make_grid(16385, 1e3, Mapping::log_r, 1e-6);
                  const double lam = 1.7;
                  const Profile p = gaussian_profile();
                  Vec om = p.omega(g.r), oml(g.size());
                  for (std::size_t i = 0; i < g.size(); ++i)
                    oml[i] = lam * lam *
                             std::exp(-g.r[i] * g.r[i] * lam * lam / 4.0);
                  double m0 = 0;
                  for (std::size_t i = 0; i < g.size(); ++i)
                    m0 += om[i] * g.w[i];
                  m0 *= 2 * kPi;
                  const double lhs = energy_radial(oml, g);
                  const double rhs = energy_radial(om, g) +
                                     m0 * m0 / (4 * kPi) * std::log(lam);
                  const double rel = std::abs(lhs / rhs - 1.0);
                  return std::make_pair(rel < 1e-6, "rel = " + jnum(rel));
                }});
  cs.push_back({"log-HLS defect vanishes at the extremal profile", [] {
                  const RadialGrid g = make_grid(8193, 1e3, Mapping::log_r);
                  PolarField f(g);
                  CVec m(g.size());
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    const double d = 1.0 + g.r[i] * g.r[i];
                    m[i] = 1.0 / (d * d);  // M = pi
                  }
                  f.set_mode(0, m);
                  const double gap = log_hls_gap(f);
                  return std::make_pair(std::abs(gap) < 1e-4 * kPi * kPi,
                                        "gap = " + jnum(gap));
                }});
  return cs;
}

int run_verify(const std::string& suite) {
  std::vector<Check> cs;
  if (suite == "appendix") {
    cs = appendix_checks();
  } else if (suite == "spectra") {
    cs = spectra_checks();
  } else if (suite == "energy") {
    cs = energy_checks();
  } else if (suite == "all") {
    cs = appendix_checks();
    auto s = spectra_checks();
    cs.insert(cs.end(), s.begin(), s.end());
    auto e = energy_checks();
    cs.insert(cs.end(), e.begin(), e.end());
  } else {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  return run_checks(cs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "arnold_lab: weighted stability analysis of radial vortices\n"
      "(profiles, Hardy constants, operator spectra, energy functionals,\n"
      "free-energy maximization, and viscous evolution diagnostics)"};
  app.require_subcommand(1);

  // profile
  auto* cp = app.add_subcommand("profile", "tabulate a profile and its weights");
  ProfileFlags pf_profile;
  std::size_t n_profile = 512;
  double rmax_profile = 20.0;
  std::string map_profile = "uniform_r", out_profile = ".";
  add_profile_flags(cp, pf_profile);
  cp->add_option("--N", n_profile, "grid nodes");
  cp->add_option("--rmax", rmax_profile, "outer radius");
  cp->add_option("--mapping", map_profile, "uniform_r | log_r | uniform_s")
      ->check(CLI::IsMember({"uniform_r", "log_r", "uniform_s"}));
  cp->add_option("--out", out_profile, "output directory");

  // hardy
  auto* ch = app.add_subcommand("hardy", "weighted Hardy constant C_H");
  ProfileFlags pf_hardy;
  std::size_t n_hardy = 2048;
  double rmax_hardy = 40.0;
  std::string out_hardy = ".";
  add_profile_flags(ch, pf_hardy);
  ch->add_option("--N", n_hardy, "grid nodes");
  ch->add_option("--rmax", rmax_hardy, "outer radius");
  ch->add_option("--out", out_hardy, "output directory");

  // spectrum
  auto* cs = app.add_subcommand("spectrum", "operator spectra and bounds");
  ProfileFlags pf_spec;
  std::string op_spec = "btilde1", out_spec = ".";
  int k_spec = 0;
  double lambda_spec = 1.0, trial_alpha = 1.4;
  bool improved = false;
  std::size_t n_spec = 1024;
  double rmax_spec = 40.0;
  cs->add_option("--op", op_spec,
                 "btilde1 | lk | kernel | generalized_l0 | quasimode | rayleigh")
      ->required()
      ->check(CLI::IsMember({"btilde1", "lk", "kernel", "generalized_l0",
                             "quasimode", "rayleigh"}));
  add_profile_flags(cs, pf_spec);
  cs->add_option("--k", k_spec, "angular index for --op lk");
  cs->add_option("--lambda", lambda_spec, "dilation parameter for --op kernel");
  cs->add_option("--trial-alpha", trial_alpha, "Rayleigh trial parameter");
  cs->add_flag("--improved", improved, "use the improved Rayleigh trial");
  cs->add_option("--N", n_spec, "grid nodes");
  cs->add_option("--rmax", rmax_spec, "outer radius");
  cs->add_option("--out", out_spec, "output directory");

  // forms
  auto* cf = app.add_subcommand("forms",
                                "coercivity constants and sampled form values");
  std::size_t n_forms = 1024;
  double rmax_forms = 40.0;
  int kmax_forms = 4;
  std::uint64_t seed_forms = 1;
  std::string out_forms = ".";
  cf->add_option("--N", n_forms, "grid nodes");
  cf->add_option("--rmax", rmax_forms, "outer radius");
  cf->add_option("--kmax", kmax_forms, "angular band of the sample field");
  cf->add_option("--seed", seed_forms, "sample field seed");
  cf->add_option("--out", out_forms, "output directory");

  // energy
  auto* ce = app.add_subcommand("energy",
                                "interaction energy cross-checks + free energy");
  ProfileFlags pf_energy;
  std::size_t n_energy = 8193;
  double rmax_energy = 1e3, rmin_energy = 0.0;
  std::string out_energy = ".";
  add_profile_flags(ce, pf_energy);
  ce->add_option("--N", n_energy, "grid nodes");
  ce->add_option("--rmax", rmax_energy, "outer radius");
  ce->add_option("--rmin", rmin_energy, "inner radius of the log grid");
  ce->add_option("--out", out_energy, "output directory");

  // maximize
  auto* cm = app.add_subcommand("maximize",
                                "free-energy ascent over radial profiles");
  std::string ent_max = "algebraic", out_max = ".";
  double kappa_max = 2.0, mass_max = kPi;
  std::size_t n_max = 768;
  double rmax_max = 50.0;
  std::uint64_t seed_max = 0;
  cm->add_option("--entropy", ent_max, "gaussian | algebraic")
      ->check(CLI::IsMember({"gaussian", "algebraic"}));
  cm->add_option("--kappa", kappa_max, "algebraic entropy exponent");
  cm->add_option("--mass", mass_max, "constraint mass M");
  cm->add_option("--N", n_max, "grid nodes");
  cm->add_option("--rmax", rmax_max, "outer radius");
  cm->add_option("--seed", seed_max, "start-perturbation seed (0 = none)");
  cm->add_option("--out", out_max, "output directory");

  // evolve
  auto* cv = app.add_subcommand("evolve", "viscous evolution run from a config");
  std::string cfg_evolve, out_evolve = ".";
  cv->add_option("--config", cfg_evolve, "run config JSON")->required();
  cv->add_option("--out", out_evolve, "output directory");

  // verify
  auto* cy = app.add_subcommand("verify", "named property-check suites");
  std::string suite = "appendix";
  cy->add_option("--suite", suite, "appendix | spectra | energy | all")
      ->check(CLI::IsMember({"appendix", "spectra", "energy", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return code;
    return kUsage;
  }

  try {
    if (*cp)
      return run_profile(pf_profile, n_profile, rmax_profile, map_profile,
                         out_profile);
    if (*ch) return run_hardy(pf_hardy, n_hardy, rmax_hardy, out_hardy);
    if (*cs)
      return run_spectrum(op_spec, pf_spec, k_spec, lambda_spec, trial_alpha,
                          improved, n_spec, rmax_spec, out_spec);
    if (*cf)
      return run_forms(n_forms, rmax_forms, kmax_forms, seed_forms, out_forms);
    if (*ce)
      return run_energy(pf_energy, n_energy, rmax_energy, rmin_energy,
                        out_energy);
    if (*cm)
      return run_maximize(ent_max, kappa_max, mass_max, n_max, rmax_max,
                          seed_max, out_max);
    if (*cv) return run_evolve(cfg_evolve, out_evolve);
    if (*cy) return run_verify(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  }
  return kUsage;
}
