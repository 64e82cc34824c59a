#include "crm/serialize.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "crm/error.hpp"

namespace crm {

using Json = nlohmann::ordered_json;

namespace {

Json spec_to_json(const InstanceSpec& s) {
  Json j;
  j["n"] = s.n;
  j["p"] = s.operators;
  j["seed"] = s.seed;
  j["gamma"] = s.gamma;
  j["density"] = s.effective_density();
  j["r_range"] = s.r_range;
  j["eta"] = s.eta;
  j["admm"] = {{"tolerance", s.admm.tolerance},
               {"max_iterations", s.admm.max_iterations},
               {"penalty", s.admm.penalty}};
  return j;
}

InstanceSpec spec_from_json(const Json& j) {
  InstanceSpec s;
  s.n = j.at("n").get<Index>();
  s.operators = j.at("p").get<Index>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.gamma = j.at("gamma").get<double>();
  s.density = j.at("density").get<double>();
  s.r_range = j.at("r_range").get<std::vector<int>>();
  s.eta = j.at("eta").get<double>();
  if (j.contains("admm")) {
    const auto& a = j.at("admm");
    s.admm.tolerance = a.at("tolerance").get<double>();
    s.admm.max_iterations = a.at("max_iterations").get<long>();
    s.admm.penalty = a.at("penalty").get<double>();
  }
  return s;
}

Json ellipsoid_to_json(const Ellipsoid& e) {
  const Index n = e.dimension();
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) rows.push_back(e.A()(i, j));
  }
  Json j;
  j["A"] = std::move(rows);
  j["b"] = std::vector<double>(e.b().data(), e.b().data() + n);
  j["alpha"] = e.alpha();
  return j;
}

Ellipsoid ellipsoid_from_json(const Json& j, Index n) {
  const auto rows = j.at("A").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  if (static_cast<Index>(rows.size()) != n * n || static_cast<Index>(b.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "ellipsoid data does not match n");
  }
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) A(i, k) = rows[static_cast<std::size_t>(i * n + k)];
  }
  return Ellipsoid(std::move(A), Eigen::Map<const Vector>(b.data(), n), j.at("alpha").get<double>());
}

}  // namespace

std::string instance_to_json(const FppInstance& instance) {
  Json root;
  root["spec"] = spec_to_json(instance.spec);
  Json ops = Json::array();
  for (const auto& op : instance.operators) {
    const auto* combo = op.as<CombinationOp>();
    if (!combo) throw Error(ErrorKind::InvalidArgument, "instance operators must be convex combinations");
    Json entry;
    entry["weights"] = combo->weights;
    Json sets = Json::array();
    for (const auto& term : combo->terms) {
      const auto* e = term.as<EllipsoidProjector>();
      if (!e) throw Error(ErrorKind::InvalidArgument, "instance terms must be ellipsoid projections");
      sets.push_back(ellipsoid_to_json(e->set));
    }
    entry["ellipsoids"] = std::move(sets);
    ops.push_back(std::move(entry));
  }
  root["operators"] = std::move(ops);
  return root.dump(1) + "\n";
}

FppInstance instance_from_json(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("instance JSON: ") + e.what());
  }
  try {
    FppInstance instance{spec_from_json(root.at("spec")), {}};
    instance.spec.validate();
    for (const auto& entry : root.at("operators")) {
      auto weights = entry.at("weights").get<std::vector<double>>();
      std::vector<Operator> terms;
      for (const auto& e : entry.at("ellipsoids")) {
        terms.push_back(Operator::ellipsoid(ellipsoid_from_json(e, instance.spec.n),
                                            EllipsoidMethod::Admm, instance.spec.admm));
      }
      instance.operators.push_back(Operator::convex_combination(std::move(weights), std::move(terms)));
    }
    if (static_cast<Index>(instance.operators.size()) != instance.spec.operators) {
      throw Error(ErrorKind::InvalidArgument, "operator count does not match spec.p");
    }
    return instance;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("instance JSON: ") + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace crm
