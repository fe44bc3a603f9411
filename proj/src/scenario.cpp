#include "slicewb/scenario.hpp"

#include <fstream>
#include <set>

#include "slicewb/error.hpp"

namespace slicewb {

using nlohmann::json;

const char* to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::AdaSlicing: return "adaslicing";
    case Algorithm::Gbo: return "gbo";
    case Algorithm::Atlas: return "atlas";
    case Algorithm::ExSearch: return "exsearch";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : kAllAlgorithms) {
    if (name == to_string(a)) return a;
  }
  throw Error(ErrorKind::Validation, "unknown algorithm '" + name + "'", "algorithm");
}

namespace {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::SliceLeave: return "slice_leave";
    case EventKind::SliceJoin: return "slice_join";
    case EventKind::SlaChange: return "sla_change";
  }
  return "unknown";
}

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw Error(ErrorKind::Validation, field + ": " + message, field);
}

template <class T>
T get(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + key, "wrong type");
  }
}

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) fail(field, "must be > 0");
}

}  // namespace

Scenario default_scenario() {
  Scenario sc;
  sc.name = "default";
  sc.env.capacity_h = 12;
  sc.env.per_vrb_rate = 3.5;
  sc.env.noise_std = 0.0;
  const double frame_sizes[] = {0.5, 0.6, 0.7};
  for (int i = 0; i < 3; ++i) {
    SliceSpec s;
    s.slice_id = "s" + std::to_string(i + 1);
    s.q_throughput = 12.0;
    s.q_fps = 10.0;
    s.profile = {30.0, frame_sizes[i], 0.0};
    sc.slices.push_back(s);
  }
  return sc;
}

void validate(const Scenario& sc) {
  if (sc.slots < 1) fail("slots", "must be >= 1");
  if (sc.slices.empty()) fail("slices", "at least one slice is required");
  std::set<SliceId> ids;
  for (std::size_t i = 0; i < sc.slices.size(); ++i) {
    const auto& s = sc.slices[i];
    const std::string p = "slices[" + std::to_string(i) + "].";
    if (s.slice_id.empty()) fail(p + "id", "must not be empty");
    if (!ids.insert(s.slice_id).second) fail(p + "id", "duplicate slice id '" + s.slice_id + "'");
    require_positive(s.q_throughput, p + "q_throughput");
    require_positive(s.q_fps, p + "q_fps");
    require_positive(s.profile.frame_rate, p + "profile.frame_rate");
    require_positive(s.profile.frame_size, p + "profile.frame_size");
    if (s.profile.burstiness < 0.0) fail(p + "profile.burstiness", "must be >= 0");
  }
  if (sc.env.capacity_h < 1) fail("env.capacity_h", "must be >= 1");
  require_positive(sc.env.per_vrb_rate, "env.per_vrb_rate");
  if (sc.env.noise_std < 0.0) fail("env.noise_std", "must be >= 0");
  if (sc.cost.u_h < 0.0) fail("cost.u_h", "must be >= 0");
  if (sc.cost.u_s < 0.0) fail("cost.u_s", "must be >= 0");
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const auto& e = sc.events[i];
    const std::string p = "events[" + std::to_string(i) + "].";
    if (e.slot < 0) fail(p + "slot", "must be >= 0");
    if (!ids.contains(e.slice_id)) fail(p + "slice", "unknown slice id '" + e.slice_id + "'");
    if (i > 0 && e.slot < sc.events[i - 1].slot) fail(p + "slot", "events must be sorted by slot");
    if (e.kind == EventKind::SlaChange) {
      require_positive(e.q_throughput, p + "q_throughput");
      require_positive(e.q_fps, p + "q_fps");
    }
  }
  const auto& a = sc.params;
  require_positive(a.rho, "params.rho");
  if (a.primal_tol < 0.0) fail("params.primal_tol", "must be >= 0");
  if (a.max_iters < 1) fail("params.max_iters", "must be >= 1");
  require_positive(a.barrier_coef, "params.barrier_coef");
  if (a.violation_penalty) require_positive(*a.violation_penalty, "params.violation_penalty");
  if (!(a.w_step > 0.0 && a.w_step <= 1.0)) fail("params.w_step", "must be in (0, 1]");
  if (a.min_svrb < 0 || a.min_svrb > sc.env.capacity_h) fail("params.min_svrb", "must be in [0, H]");
  if (a.bo.buffer_capacity < 1) fail("params.buffer_capacity", "must be >= 1");
  if (!(a.bo.priority_decay > 0.0 && a.bo.priority_decay <= 1.0)) {
    fail("params.priority_decay", "must be in (0, 1]");
  }
  if (a.bo.subsample < 1) fail("params.subsample", "must be >= 1");
  if (a.bo.n_init < 1) fail("params.n_init", "must be >= 1");
  require_positive(a.bo.hedge_eta, "params.hedge_eta");
  require_positive(a.bo.lcb_kappa, "params.lcb_kappa");
  if (a.bo.nu != 0.5 && a.bo.nu != 1.5 && a.bo.nu != 2.5) fail("params.matern_nu", "must be 0.5, 1.5 or 2.5");
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) fail("$", "scenario must be a JSON object");
  Scenario sc;
  sc.slices.clear();
  sc.name = get<std::string>(doc, "name", "", "scenario");
  sc.seed = get<std::uint64_t>(doc, "seed", "", 1);
  sc.slots = get<int>(doc, "slots", "", 30);
  sc.algorithm = parse_algorithm(get<std::string>(doc, "algorithm", "", "adaslicing"));

  if (doc.contains("cost")) {
    const auto& c = doc.at("cost");
    sc.cost.u_h = get<double>(c, "u_h", "cost.", 1.0);
    sc.cost.u_s = get<double>(c, "u_s", "cost.", 1.0);
  }
  if (doc.contains("env")) {
    const auto& e = doc.at("env");
    sc.env.capacity_h = get<int>(e, "capacity_h", "env.", 12);
    sc.env.per_vrb_rate = get<double>(e, "per_vrb_rate", "env.", 2.1);
    sc.env.noise_std = get<double>(e, "noise_std", "env.", 0.03);
  }

  if (!doc.contains("slices") || !doc.at("slices").is_array()) fail("slices", "array is required");
  const auto& slices = doc.at("slices");
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const auto& js = slices[i];
    const std::string p = "slices[" + std::to_string(i) + "].";
    SliceSpec s;
    s.slice_id = get<std::string>(js, "id", p, "");
    s.q_throughput = get<double>(js, "q_throughput", p, 12.0);
    s.q_fps = get<double>(js, "q_fps", p, 10.0);
    s.active = get<bool>(js, "active", p, true);
    if (js.contains("profile")) {
      const auto& pr = js.at("profile");
      const std::string pp = p + "profile.";
      s.profile.frame_rate = get<double>(pr, "frame_rate", pp, 30.0);
      s.profile.frame_size = get<double>(pr, "frame_size", pp, 0.5);
      s.profile.burstiness = get<double>(pr, "burstiness", pp, 0.0);
    }
    sc.slices.push_back(std::move(s));
  }

  if (doc.contains("events")) {
    const auto& events = doc.at("events");
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& je = events[i];
      const std::string p = "events[" + std::to_string(i) + "].";
      DynamicsEvent e;
      e.slot = get<int>(je, "slot", p, 0);
      e.slice_id = get<std::string>(je, "slice", p, "");
      const auto kind = get<std::string>(je, "kind", p, "");
      if (kind == "slice_leave") e.kind = EventKind::SliceLeave;
      else if (kind == "slice_join") e.kind = EventKind::SliceJoin;
      else if (kind == "sla_change") e.kind = EventKind::SlaChange;
      else fail(p + "kind", "must be slice_leave, slice_join or sla_change");
      e.q_throughput = get<double>(je, "q_throughput", p, 0.0);
      e.q_fps = get<double>(je, "q_fps", p, 0.0);
      sc.events.push_back(std::move(e));
    }
  }

  if (doc.contains("params")) {
    const auto& jp = doc.at("params");
    const std::string p = "params.";
    auto& a = sc.params;
    a.rho = get<double>(jp, "rho", p, a.rho);
    a.primal_tol = get<double>(jp, "primal_tol", p, a.primal_tol);
    a.max_iters = get<int>(jp, "max_iters", p, a.max_iters);
    a.dual_init = get<double>(jp, "dual_init", p, a.dual_init);
    const auto probe = get<std::string>(jp, "probe", p, "live");
    if (probe == "live") a.probe = ProbePolicy::Live;
    else if (probe == "surrogate") a.probe = ProbePolicy::Surrogate;
    else fail(p + "probe", "must be live or surrogate");
    a.barrier_coef = get<double>(jp, "barrier_coef", p, a.barrier_coef);
    if (jp.contains("violation_penalty")) a.violation_penalty = get<double>(jp, "violation_penalty", p, 0.0);
    a.w_step = get<double>(jp, "w_step", p, a.w_step);
    a.min_svrb = get<int>(jp, "min_svrb", p, a.min_svrb);
    a.oracle_cap = get<std::uint64_t>(jp, "oracle_cap", p, a.oracle_cap);
    a.bo.buffer_capacity = get<std::size_t>(jp, "buffer_capacity", p, a.bo.buffer_capacity);
    a.bo.priority_decay = get<double>(jp, "priority_decay", p, a.bo.priority_decay);
    a.bo.subsample = get<std::size_t>(jp, "subsample", p, a.bo.subsample);
    a.bo.n_init = get<int>(jp, "n_init", p, a.bo.n_init);
    a.bo.refit_every = get<int>(jp, "refit_every", p, a.bo.refit_every);
    a.bo.restarts = get<int>(jp, "restarts", p, a.bo.restarts);
    a.bo.nu = get<double>(jp, "matern_nu", p, a.bo.nu);
    a.bo.noise_var = get<double>(jp, "noise_var", p, a.bo.noise_var);
    a.bo.hedge_eta = get<double>(jp, "hedge_eta", p, a.bo.hedge_eta);
    a.bo.lcb_kappa = get<double>(jp, "lcb_kappa", p, a.bo.lcb_kappa);
    const auto prior = get<std::string>(jp, "gp_prior", p, a.bo.centering == gp::Centering::Min ? "min" : "mean");
    if (prior == "min") a.bo.centering = gp::Centering::Min;
    else if (prior == "mean") a.bo.centering = gp::Centering::Mean;
    else fail(p + "gp_prior", "must be min or mean");
  }

  validate(sc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Validation, std::string("malformed JSON: ") + e.what(), "$");
  }
  return parse_scenario(doc);
}

json to_json(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  doc["seed"] = sc.seed;
  doc["slots"] = sc.slots;
  doc["algorithm"] = to_string(sc.algorithm);
  doc["cost"] = {{"u_h", sc.cost.u_h}, {"u_s", sc.cost.u_s}};
  doc["env"] = {{"capacity_h", sc.env.capacity_h},
                {"per_vrb_rate", sc.env.per_vrb_rate},
                {"noise_std", sc.env.noise_std}};
  doc["slices"] = json::array();
  for (const auto& s : sc.slices) {
    doc["slices"].push_back({{"id", s.slice_id},
                             {"q_throughput", s.q_throughput},
                             {"q_fps", s.q_fps},
                             {"active", s.active},
                             {"profile",
                              {{"frame_rate", s.profile.frame_rate},
                               {"frame_size", s.profile.frame_size},
                               {"burstiness", s.profile.burstiness}}}});
  }
  doc["events"] = json::array();
  for (const auto& e : sc.events) {
    json je{{"slot", e.slot}, {"kind", to_string(e.kind)}, {"slice", e.slice_id}};
    if (e.kind == EventKind::SlaChange) {
      je["q_throughput"] = e.q_throughput;
      je["q_fps"] = e.q_fps;
    }
    doc["events"].push_back(std::move(je));
  }
  const auto& a = sc.params;
  doc["params"] = {{"rho", a.rho},
                   {"primal_tol", a.primal_tol},
                   {"max_iters", a.max_iters},
                   {"dual_init", a.dual_init},
                   {"probe", a.probe == ProbePolicy::Live ? "live" : "surrogate"},
                   {"barrier_coef", a.barrier_coef},
                   {"w_step", a.w_step},
                   {"min_svrb", a.min_svrb},
                   {"oracle_cap", a.oracle_cap},
                   {"buffer_capacity", a.bo.buffer_capacity},
                   {"priority_decay", a.bo.priority_decay},
                   {"subsample", a.bo.subsample},
                   {"n_init", a.bo.n_init},
                   {"refit_every", a.bo.refit_every},
                   {"restarts", a.bo.restarts},
                   {"matern_nu", a.bo.nu},
                   {"noise_var", a.bo.noise_var},
                   {"hedge_eta", a.bo.hedge_eta},
                   {"lcb_kappa", a.bo.lcb_kappa},
                   {"gp_prior", a.bo.centering == gp::Centering::Min ? "min" : "mean"}};
  if (a.violation_penalty) doc["params"]["violation_penalty"] = *a.violation_penalty;
  return doc;
}

}  // namespace slicewb
