#include "commands.hpp"

#include <cmath>
#include <iostream>

#include "artifacts.hpp"
#include "landscape/certify.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"
#include "landscape/infinity.hpp"
#include "landscape/pathfinder.hpp"
#include "landscape/serialize.hpp"

namespace landscape::cli {

namespace {

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

Json to_json(const BDMatrices& bd) {
  return Json{{"layer", bd.layer},     {"source", bd.source},         {"include_bias", bd.include_bias},
              {"B", to_json(bd.B)},    {"D", to_json(bd.D)},          {"b_eigenvalues", to_json(bd.b_eigenvalues)},
              {"d_norm", bd.d_norm},   {"groups", bd.groups.size()}};
}

Json to_json(const EmbeddingVerdict& v) {
  return Json{{"tag", to_string(v.tag)},   {"lambda", v.lambda},       {"b_eigenvalues", to_json(v.b_eigenvalues)},
              {"d_norm", v.d_norm},        {"tol_eig", v.tolerances.eig}, {"tol_d", v.tolerances.d},
              {"reason", v.reason}};
}

Json probe_summary(const ProbeReport& p) {
  return Json{{"directions", p.directions},
              {"radii", p.radii.size()},
              {"seed", p.seed},
              {"base_loss", p.base_loss},
              {"global_min_delta", std::isfinite(p.global_min_delta) ? Json(p.global_min_delta) : Json("inf")},
              {"argmin_direction", p.argmin_direction},
              {"argmin_radius", p.argmin_radius >= 0 ? Json(p.radii[static_cast<std::size_t>(p.argmin_radius)]) : Json()},
              {"no_descent_found", probe_finds_no_descent(p)}};
}

void write_probe_csv(ArtifactWriter& out, const std::string& name, const ProbeReport& p) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < p.radii.size(); ++j) rows.push_back({p.radii[j], p.radius_min_delta[j], p.radius_max_delta[j]});
  out.csv(name, {"radius", "min_delta", "max_delta"}, rows);
}

Json certificate_json(const CriticalPointCertificate& c) {
  Json j{{"kind", to_string(c.kind)}, {"grad_norm", c.grad_norm}, {"tol_eig", c.tol_eig},
         {"spectrum", to_json(c.spectrum)}};
  if (c.probe) j["probe"] = probe_summary(*c.probe);
  return j;
}

std::string unwrap(const std::string& text, const char* key) {
  try {
    const Json doc = Json::parse(text);
    if (doc.contains(key)) return doc[key].dump();
    return text;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_input(const std::filesystem::path& file) {
  try {
    return read_text_file(file);
  } catch (const std::exception&) {
    throw IoError("cannot read '" + file.string() + "'");
  }
}

Network load_network(const std::filesystem::path& file) { return network_from_json(unwrap(read_input(file), "network")); }

Dataset load_dataset(const std::filesystem::path& file) { return dataset_from_json(unwrap(read_input(file), "dataset")); }

Network make_teacher(const ExperimentConfig& cfg) {
  const RegionConfig& r = cfg.region;
  return init_random(r.teacher_dims, r.activation, r.teacher_scale, r.teacher_seed);
}

Dataset make_dataset(const ExperimentConfig& cfg) {
  if (cfg.data_file) return load_dataset(*cfg.data_file);
  const RegionConfig& r = cfg.region;
  return generate_teacher_dataset(make_teacher(cfg), r.samples, r.sampler, r.data_seed);
}

// First converged student that passes the pipeline's checks is not needed
// here; `train` reports whatever the configured init seed gives.
TrainResult train_student(const ExperimentConfig& cfg, const Dataset& data) {
  const RegionConfig& r = cfg.region;
  const Network init = init_random(r.student_dims, r.activation, r.init_scale, r.init_seed);
  return train_to_critical(init, data, r.train);
}

Network starting_network(const ExperimentConfig& cfg, const Dataset& data) {
  if (cfg.network_file) return load_network(*cfg.network_file);
  return train_student(cfg, data).net;
}

}  // namespace

int cmd_region(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg.out_dir, cfg.hash);
  RegionConfig rc = cfg.region;
  if (cfg.data_file) rc.dataset = load_dataset(*cfg.data_file);
  NonAttractingEvidence ev;
  try {
    ev = region_demo(rc);
  } catch (const PreconditionFailed& e) {
    out.json("region.json", Json{{"status", "PreconditionFailed"}, {"reason", e.what()}});
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  }

  const bool min_ok = probe_finds_no_descent(ev.min_probe);
  const bool walk_ok = ev.walk_max_deviation <= 1e-12 * (1.0 + ev.region_loss);
  const bool saddle_ok = ev.saddle_verdict.tag == EmbeddingVerdictTag::Saddle && ev.escape_curvature < 0.0;
  const bool escape_ok = ev.escape_loss < ev.region_loss - 1e-6;
  const bool complete = min_ok && walk_ok && saddle_ok && escape_ok;

  Json steps = Json::array();
  for (const EmbeddingStep& s : ev.steps) {
    steps.push_back(Json{{"layer", s.plan.layer}, {"source", s.plan.source}, {"lambda", s.plan.lambda},
                         {"b_eigenvalues", to_json(s.bd.b_eigenvalues)}, {"d_norm", s.bd.d_norm},
                         {"verdict", to_string(s.verdict.tag)}});
  }
  Json alternate = Json::array();
  for (const EmbeddingStep& s : ev.alternate_bias) {
    alternate.push_back(Json{{"layer", s.plan.layer}, {"bd", to_json(s.bd)}, {"verdict", to_json(s.verdict)}});
  }
  Json body{
      {"status", complete ? "complete" : "incomplete"},
      {"b_include_bias", rc.b_include_bias},
      {"embed_order", to_string(rc.order)},
      {"source_policy", to_string(rc.policy)},
      {"opposite_bias_convention", alternate},
      {"student", Json{{"dims", ev.student.dims()},
                       {"init_seed", ev.init_seed_used},
                       {"attempts", ev.attempts},
                       {"train_status", to_string(ev.train_report.status)},
                       {"loss", ev.train_report.final_loss},
                       {"grad_norm", ev.train_report.final_grad_norm},
                       {"iters", ev.train_report.iters},
                       {"certificate", certificate_json(ev.student_certificate)}}},
      {"embedding_steps", steps},
      {"region", Json{{"dims", ev.region_point.dims()}, {"loss", ev.region_loss}, {"probe", probe_summary(ev.min_probe)},
                      {"no_descent_found", min_ok}}},
      {"walk", Json{{"layer", ev.walk_plan.layer}, {"source", ev.walk_plan.source},
                    {"lambda_from", ev.walk_lambdas.front()}, {"lambda_to", ev.walk_lambdas.back()},
                    {"max_deviation", ev.walk_max_deviation}, {"constant", walk_ok}}},
      {"saddle", Json{{"bd", to_json(ev.saddle_bd)}, {"verdict", to_json(ev.saddle_verdict)},
                      {"probe", probe_summary(ev.saddle_probe)}}},
      {"escape", Json{{"curvature", ev.escape_curvature}, {"line_search_step", ev.line_search.best_step},
                      {"line_search_loss", ev.line_search.best_loss},
                      {"line_search_reduction", ev.region_loss - ev.line_search.best_loss},
                      {"descent_iters", ev.descent.empty() ? 0 : ev.descent.back().iter},
                      {"final_loss", ev.escape_loss}, {"reduction", ev.region_loss - ev.escape_loss}}},
  };
  out.json("region.json", body);
  out.json_document("teacher.json", "network", network_to_json(ev.teacher));
  out.json_document("dataset.json", "dataset", dataset_to_json(ev.data));
  out.json_document("student.json", "network", network_to_json(ev.student));
  out.json_document("region_point.json", "network", network_to_json(ev.region_point));
  out.json_document("saddle_point.json", "network", network_to_json(ev.saddle_point));
  write_probe_csv(out, "probe_min.csv", ev.min_probe);
  write_probe_csv(out, "probe_saddle.csv", ev.saddle_probe);

  std::vector<std::vector<double>> walk;
  for (std::size_t k = 0; k < ev.walk_lambdas.size(); ++k) {
    walk.push_back({static_cast<double>(k), ev.walk_lambdas[k], ev.walk_losses[k], ev.walk_losses[k] - ev.region_loss});
  }
  out.csv("walk.csv", {"step", "lambda", "loss", "deviation"}, walk);

  std::vector<std::vector<double>> escape;
  for (std::size_t k = 0; k < ev.line_search.steps.size(); ++k) {
    escape.push_back({0.0, ev.line_search.steps[k], ev.line_search.losses[k]});
  }
  for (const TraceRow& r : ev.descent) escape.push_back({1.0, static_cast<double>(r.iter), r.loss});
  out.csv("escape.csv", {"phase", "x", "loss"}, escape);

  std::cout << "region loss " << format_real(ev.region_loss) << ", escape loss " << format_real(ev.escape_loss)
            << (complete ? ": evidence complete\n" : ": evidence incomplete\n");
  return complete ? kExitOk : kExitFailed;
}

int cmd_path(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg.out_dir, cfg.hash);
  Network start;
  Dataset data;
  if (cfg.network_file) {
    start = load_network(*cfg.network_file);
    data = make_dataset(cfg);
  } else if (!cfg.path_dims.empty()) {
    data = make_dataset(cfg);
    start = init_random(cfg.path_dims, cfg.region.activation, cfg.region.init_scale, cfg.region.init_seed);
  } else {
    RegionConfig rc = cfg.region;
    if (cfg.data_file) rc.dataset = load_dataset(*cfg.data_file);
    try {
      const NonAttractingEvidence ev = region_demo(rc);
      start = ev.region_point;
      data = ev.data;
    } catch (const PreconditionFailed& e) {
      out.json("path.json", Json{{"status", "PreconditionFailed"}, {"reason", e.what()}});
      std::cerr << "precondition failed: " << e.what() << "\n";
      return kExitPrecondition;
    }
  }

  DescentPath path;
  try {
    path = monotone_descent_to_global(start, data, cfg.path_steps, cfg.path_epsilon, cfg.perturb_seed);
  } catch (const RankError& e) {
    out.json("path.json", Json{{"status", "NotEligible"}, {"reason", e.what()}});
    std::cerr << "not eligible: " << e.what() << "\n";
    return kExitPrecondition;
  }

  std::vector<std::vector<double>> rows;
  const double l0 = path.losses.front();
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const double t = path.times[k];
    rows.push_back({t, path.losses[k], (1.0 - t) * (1.0 - t) * l0});
  }
  out.csv("path.csv", {"t", "loss", "target_loss"}, rows);

  Json snapshots = Json::array();
  const std::size_t stride = static_cast<std::size_t>(std::max(1, cfg.snapshot_stride));
  for (std::size_t k = 0; k < path.times.size(); k += stride) {
    snapshots.push_back(Json{{"t", path.times[k]}, {"params", to_json(path.params[k])}});
  }
  if ((path.times.size() - 1) % stride != 0) {
    snapshots.push_back(Json{{"t", path.times.back()}, {"params", to_json(path.params.back())}});
  }
  out.json("path.json",
           Json{{"status", path.certified ? "certified" : "failed"},
                {"dims", start.dims()},
                {"wide_layer", path.wide_layer},
                {"steps", static_cast<int>(path.times.size()) - 1},
                {"initial_loss", l0},
                {"final_loss", path.final_loss},
                {"max_increase", path.max_increase},
                {"slack", path.slack},
                {"violations", path.violations},
                {"max_output_error", path.max_output_error},
                {"min_weight_rank_ratio", path.min_weight_rank_ratio},
                {"snapshots", snapshots}});
  std::cout << "path from " << format_real(l0) << " to " << format_real(path.final_loss) << ", "
            << path.violations << " monotonicity violation(s)\n";
  return path.certified ? kExitOk : kExitFailed;
}

int cmd_infinity(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg.out_dir, cfg.hash);
  const Dataset data = make_dataset(cfg);
  const Network base = init_random(cfg.infinity_dims, cfg.region.activation, cfg.infinity_scale, cfg.infinity_seed);
  InfinityFamily family;
  try {
    family = build_infinity_family(base, data, cfg.infinity_flipped);
  } catch (const DegenerateData& e) {
    out.json("infinity.json", Json{{"status", "DegenerateData"}, {"reason", e.what()}});
    std::cerr << "degenerate data: " << e.what() << "\n";
    return kExitPrecondition;
  }
  const InfinityReport rep = verify_infinity_minimum(family, data, default_p_grid(), cfg.ball_samples, cfg.ball_seed);

  Json curve = Json::array();
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < rep.p_grid.size(); ++k) {
    curve.push_back(Json::array({rep.p_grid[k], rep.margin[k]}));
    rows.push_back({rep.p_grid[k], rep.margin[k]});
  }
  Json body{{"Lc", rep.lc},
            {"c", family.fit.c},
            {"flipped", family.flipped},
            {"v", to_json(family.v)},
            {"phi", to_json(family.phis)},
            {"probe_coordinate", family.probe.coordinate},
            {"probe_magnitude", family.probe.magnitude},
            {"margin_curve", curve},
            {"positive_small_p", rep.positive_small_p},
            {"monotone_tail", rep.monotone_tail},
            {"limit_gap", rep.limit_gap},
            {"pass", rep.pass}};
  if (cfg.network_file) {
    const double ref = loss(load_network(*cfg.network_file), data);
    body["reference_loss"] = ref;
    body["suboptimal"] = ref < rep.lc;
  }
  out.json("infinity.json", body);
  out.csv("margin.csv", {"p", "min_delta"}, rows);
  std::cout << "L_c " << format_real(rep.lc) << (rep.pass ? ": PASS\n" : ": FAIL\n");
  return rep.pass ? kExitOk : kExitFailed;
}

int cmd_train(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg.out_dir, cfg.hash);
  const Dataset data = make_dataset(cfg);
  const TrainResult tr = train_student(cfg, data);
  std::vector<std::vector<double>> rows;
  for (const TraceRow& r : tr.report.trace) rows.push_back({static_cast<double>(r.iter), r.loss, r.grad_norm});
  out.csv("train_trace.csv", {"iter", "loss", "grad_norm"}, rows);
  out.json_document("student.json", "network", network_to_json(tr.net));
  out.json_document("dataset.json", "dataset", dataset_to_json(data));
  Json body{{"status", to_string(tr.report.status)}, {"loss", tr.report.final_loss},
            {"grad_norm", tr.report.final_grad_norm}, {"iters", tr.report.iters},
            {"newton_steps", tr.report.newton_steps}};
  if (tr.report.status == TrainStatus::Converged && tr.net.param_count() <= kDenseHessianLimit) {
    body["certificate"] = certificate_json(classify_critical_point(tr.net, data));
  }
  out.json("train.json", body);
  std::cout << "train " << to_string(tr.report.status) << ", loss " << format_real(tr.report.final_loss) << "\n";
  return tr.report.status == TrainStatus::Converged ? kExitOk : kExitFailed;
}

int cmd_probe(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg.out_dir, cfg.hash);
  const Dataset data = make_dataset(cfg);
  const Network net = starting_network(cfg, data);
  const RegionConfig& r = cfg.region;
  const ProbeReport p = probe_random_directions(net, data, r.probe_directions, r.radii, r.probe_seed);
  write_probe_csv(out, "probe.csv", p);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < p.direction_min_delta.size(); ++k) rows.push_back({static_cast<double>(k), p.direction_min_delta[k]});
  out.csv("probe_directions.csv", {"direction", "min_delta"}, rows);
  out.json("probe.json", probe_summary(p));
  std::cout << "min delta " << format_real(p.global_min_delta) << "\n";
  return kExitOk;
}

int cmd_embed(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg.out_dir, cfg.hash);
  const Dataset data = make_dataset(cfg);
  Network net = starting_network(cfg, data);
  const RegionConfig& r = cfg.region;
  const double before = loss(net, data);
  const std::vector<EmbeddingStep> steps = embed_to_target(net, data, r.target_dims, r.policy, r.lambda, r.b_include_bias, r.order);
  Json arr = Json::array();
  for (const EmbeddingStep& s : steps) {
    arr.push_back(Json{{"layer", s.plan.layer}, {"source", s.plan.source}, {"lambda", s.plan.lambda},
                       {"bd", to_json(s.bd)}, {"verdict", to_json(s.verdict)}});
  }
  out.json("embed.json", Json{{"loss_before", before}, {"loss_after", loss(net, data)}, {"steps", arr}});
  out.json_document("embedded.json", "network", network_to_json(net));
  std::cout << steps.size() << " embedding step(s)\n";
  return kExitOk;
}

}  // namespace landscape::cli
