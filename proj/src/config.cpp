#include "rogpl/config.hpp"

#include <stdexcept>
#include <type_traits>

namespace rogpl {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("TrainConfig: ") + what);
}

template <typename Config, typename Visitor>
void visit_fields(Config& c, Visitor&& v) {
  v("epochs", c.epochs);
  v("warmup_epochs", c.warmup_epochs);
  v("refresh_period", c.refresh_period);
  v("lr", c.lr);
  v("phi", c.phi);
  v("lambda", c.lambda);
  v("temperature", c.temperature);
  v("alpha", c.alpha);
  v("beta", c.beta);
  v("k_nn", c.k_nn);
  v("eta", c.eta);
  v("tau", c.tau);
  v("k_clusters", c.k_clusters);
  v("hidden_dim", c.hidden_dim);
  v("latent_dim", c.latent_dim);
  v("seed", c.seed);
  v("cg_tol", c.cg_tol);
  v("cg_max_iter", c.cg_max_iter);
  v("kmeans_max_iter", c.kmeans_max_iter);
  v("normalize_latent", c.normalize_latent);
  v("row_normalize_features", c.row_normalize_features);
  v("tau_sweep", c.tau_sweep);
  v("tau_sweep_reject_rate", c.tau_sweep_reject_rate);
}

}  // namespace

nlohmann::json to_json(const TrainConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  visit_fields(cfg, [&](const char* key, const auto& field) { j[key] = field; });
  return j;
}

bool set_train_field(TrainConfig& cfg, const std::string& key, const nlohmann::json& value) {
  bool found = false;
  visit_fields(cfg, [&](const char* name, auto& field) {
    if (found || key != name) return;
    using T = std::decay_t<decltype(field)>;
    const bool ok = std::is_same_v<T, bool> ? value.is_boolean()
                    : std::is_integral_v<T> ? value.is_number_integer()
                                            : value.is_number();
    if (!ok) throw std::invalid_argument("config field '" + key + "' has the wrong type");
    field = value.get<T>();
    found = true;
  });
  return found;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  TrainConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (!set_train_field(cfg, key, value)) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

void TrainConfig::validate() const {
  require(epochs >= 1, "epochs must be at least 1");
  require(warmup_epochs >= 0 && warmup_epochs <= epochs, "warmup_epochs must lie in [0, epochs]");
  require(refresh_period >= 1, "refresh_period must be at least 1");
  require(lr > 0.0, "lr must be positive");
  require(phi > 0.0, "phi must be positive");
  require(lambda >= 0.0, "lambda must be nonnegative");
  require(temperature > 0.0, "temperature must be positive");
  require(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0, 1)");
  require(beta > 0.0, "beta must be positive");
  require(k_nn >= 1, "k_nn must be at least 1");
  require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  require(tau >= 0.0 && tau <= 1.0, "tau must lie in [0, 1]");
  require(k_clusters >= 0, "k_clusters must be nonnegative");
  require(hidden_dim >= 1 && latent_dim >= 1, "hidden_dim and latent_dim must be positive");
  require(cg_tol > 0.0 && cg_max_iter >= 1, "cg_tol and cg_max_iter must be positive");
  require(kmeans_max_iter >= 1, "kmeans_max_iter must be positive");
  require(tau_sweep_reject_rate >= 0.0 && tau_sweep_reject_rate <= 1.0,
          "tau_sweep_reject_rate must lie in [0, 1]");
}

std::string AblationFlags::name() const {
  std::string out;
  auto add = [&](bool on, const char* n) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += n;
  };
  add(no_gn, "no-gn");
  add(no_denoise, "no-denoise");
  add(no_region, "no-region");
  add(no_ldiv, "no-ldiv");
  return out.empty() ? "full" : out;
}

AblationFlags AblationFlags::parse(const std::string& name) {
  AblationFlags f;
  std::size_t start = 0;
  while (start <= name.size()) {
    const std::size_t plus = name.find('+', start);
    const std::string part =
        name.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
    if (part == "full" || part.empty()) {
    } else if (part == "no-gn") {
      f.no_gn = true;
    } else if (part == "no-denoise") {
      f.no_denoise = true;
    } else if (part == "no-region") {
      f.no_region = true;
    } else if (part == "no-ldiv") {
      f.no_ldiv = true;
    } else {
      throw std::invalid_argument("unknown ablation '" + part + "'");
    }
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return f;
}

}  // namespace rogpl
