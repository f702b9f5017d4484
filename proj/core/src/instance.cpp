#include "lstarf/instance.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "lstarf/error.hpp"
#include "lstarf/matrix_market.hpp"
#include "lstarf/random.hpp"

namespace lstarf::measure {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(NoiseKind k) {
  return k == NoiseKind::None ? "none" : "gaussian-rescaled";
}

NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "none") return NoiseKind::None;
  if (s == "gaussian-rescaled") return NoiseKind::GaussianRescaled;
  throw ArgumentError("unknown noise kind '" + std::string(s) + "'");
}

ProblemInstance make_instance(const LinearOperator& op, const DenseMatrix& x_true,
                              NoiseKind noise_kind, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0)) throw ArgumentError("make_instance: epsilon must be nonnegative");
  Vector b = op.apply(x_true);
  Vector s(b.size(), 0.0);
  if (noise_kind == NoiseKind::None) {
    epsilon = 0.0;
  } else if (epsilon > 0.0) {
    Rng rng(seed, "instance/noise");
    double nrm = 0.0;
    while (nrm == 0.0) {
      s = gaussian_vector(b.size(), rng);
      nrm = norm2(s);
    }
    for (double& x : s) x *= epsilon / nrm;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += s[i];
  }
  return ProblemInstance{op, std::move(b), x_true, epsilon, std::move(s), noise_kind, seed};
}

ProblemInstance make_instance(const LinearOperator& op, Vector b, double epsilon) {
  if (!(epsilon >= 0.0)) throw ArgumentError("make_instance: epsilon must be nonnegative");
  if (b.size() != op.l()) throw ArgumentError("make_instance: b must have length l");
  return ProblemInstance{op, std::move(b), std::nullopt, epsilon, std::nullopt, NoiseKind::None, 0};
}

double residual_norm(const LinearOperator& op, const DenseMatrix& x, std::span<const double> b) {
  Vector r = op.apply(x);
  if (r.size() != b.size()) throw ArgumentError("residual_norm: b must have length l");
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r);
}

void save_instance(const ProblemInstance& inst, const std::string& json_path) {
  const fs::path jp(json_path);
  const fs::path dir = jp.parent_path();
  const std::string stem = jp.stem().string();
  const std::string op_json = stem + ".op.json";
  const std::string op_mtx = stem + ".op.mtx";
  save_operator(inst.op, (dir / op_json).string(), (dir / op_mtx).string());
  json j = {{"operator", op_json},
            {"b", inst.b},
            {"epsilon", inst.epsilon},
            {"noise_kind", std::string(to_string(inst.noise_kind))},
            {"seed", inst.seed}};
  if (inst.x_true) {
    const std::string xt = stem + ".xtrue.mtx";
    write_matrix_market((dir / xt).string(), *inst.x_true);
    j["x_true"] = xt;
  } else {
    j["x_true"] = nullptr;
  }
  j["s"] = inst.noise ? json(*inst.noise) : json(nullptr);
  std::ofstream os(json_path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + json_path + "' for writing");
  os << j.dump(2) << '\n';
}

ProblemInstance load_instance(const std::string& json_path) {
  std::ifstream is(json_path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + json_path + "' for reading");
  const fs::path dir = fs::path(json_path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return (q.is_relative() ? dir / q : q).string();
  };
  try {
    const json j = json::parse(is);
    LinearOperator op = load_operator(resolve(j.at("operator").get<std::string>()));
    Vector b = j.at("b").get<Vector>();
    if (b.size() != op.l()) throw IoError("instance '" + json_path + "': b has wrong length");
    ProblemInstance inst{std::move(op), std::move(b), std::nullopt, j.at("epsilon").get<double>(),
                         std::nullopt, parse_noise_kind(j.value("noise_kind", std::string("none"))),
                         j.value("seed", std::uint64_t{0})};
    if (!(inst.epsilon >= 0.0)) throw IoError("instance '" + json_path + "': negative epsilon");
    if (j.contains("x_true") && !j.at("x_true").is_null()) {
      inst.x_true = read_matrix_market(resolve(j.at("x_true").get<std::string>()));
    }
    if (j.contains("s") && !j.at("s").is_null()) inst.noise = j.at("s").get<Vector>();
    return inst;
  } catch (const json::exception& e) {
    throw IoError("instance '" + json_path + "': " + e.what());
  }
}

}  // namespace lstarf::measure
