#include "lipext/io.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

namespace lipext::io {

namespace {

[[noreturn]] void malformed(const std::string& message) {
  throw Error(ErrorCode::MalformedDocument, message);
}

void require_object(const Json& doc, const std::string& what) {
  if (!doc.is_object()) malformed(what + " must be a JSON object");
}

void check_keys(const Json& doc, const std::string& what,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  require_object(doc, what);
  for (const char* key : required) {
    if (!doc.contains(key)) malformed(what + " is missing \"" + key + "\"");
  }
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) malformed(what + " has unknown field \"" + key + "\"");
  }
}

void check_version(const Json& doc) {
  const Json& v = doc.at("format_version");
  if (!v.is_number_integer() || v.get<long long>() != kFormatVersion) {
    malformed("unsupported format_version");
  }
}

void check_kind(const Json& doc, const char* expected) {
  if (!doc.contains("kind")) return;
  if (!doc.at("kind").is_string() || doc.at("kind").get<std::string>() != expected) {
    malformed(std::string("expected a document of kind \"") + expected + "\"");
  }
}

double read_number(const Json& value, const std::string& what) {
  if (!value.is_number()) malformed(what + " must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) malformed(what + " must be finite");
  return x;
}

int read_int(const Json& value, const std::string& what) {
  if (!value.is_number_integer()) malformed(what + " must be an integer");
  const auto x = value.get<long long>();
  if (x < 0 || x > std::numeric_limits<int>::max()) malformed(what + " is out of range");
  return static_cast<int>(x);
}

Vector read_vector(const Json& value, const std::string& what) {
  if (!value.is_array()) malformed(what + " must be an array");
  Vector v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = read_number(value[i], what);
  }
  return v;
}

Matrix read_matrix(const Json& value, const std::string& what) {
  if (!value.is_array() || value.empty()) malformed(what + " must be a nonempty array");
  const std::size_t rows = value.size();
  if (!value[0].is_array()) malformed(what + " must be an array of arrays");
  const std::size_t cols = value[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = read_vector(value[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) malformed(what + " is ragged");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json instance_to_json(const Instance& instance) {
  Json doc = {
      {"format_version", kFormatVersion},
      {"kind", "instance"},
      {"space", {{"n", instance.space.n()}, {"dist", matrix_json(instance.space.matrix())}}},
      {"norm", {{"dim", instance.norm.dim()}, {"p", instance.norm.p()}}},
      {"point", matrix_json(instance.point.values())},
  };
  if (instance.lipschitz_bound != 1.0) doc["L"] = instance.lipschitz_bound;
  return doc;
}

Instance instance_from_json(const Json& doc) {
  check_keys(doc, "instance", {"format_version", "space", "norm", "point"},
             {"kind", "L"});
  check_version(doc);
  check_kind(doc, "instance");

  const Json& space_doc = doc.at("space");
  check_keys(space_doc, "space", {"n", "dist"}, {});
  const int n = read_int(space_doc.at("n"), "space.n");
  const Matrix dist = read_matrix(space_doc.at("dist"), "space.dist");
  if (dist.rows() != n + 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "space.dist must have n+1 = " + std::to_string(n + 1) + " rows");
  }
  FiniteMetricSpace space = validate_metric(dist);

  const Json& norm_doc = doc.at("norm");
  check_keys(norm_doc, "norm", {"dim", "p"}, {});
  NormSpec norm(read_int(norm_doc.at("dim"), "norm.dim"),
                read_number(norm_doc.at("p"), "norm.p"));

  const Matrix values = read_matrix(doc.at("point"), "point");
  if (values.rows() != n + 1 || values.cols() != norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "point must be (n+1) x dim");
  }
  LipschitzPoint point(values);

  double bound = 1.0;
  if (doc.contains("L")) {
    bound = read_number(doc.at("L"), "L");
    if (!(bound > 0.0)) malformed("L must be positive");
  }
  return Instance{std::move(space), norm, std::move(point), bound};
}

Json membership_to_json(const Instance& instance, const ToleranceConfig& tol) {
  const PairValue worst =
      lipschitz_constant_with_pair(instance.point, instance.space, instance.norm);
  return {
      {"format_version", kFormatVersion},
      {"kind", "membership"},
      {"member", is_member(instance.point, instance.space, instance.norm,
                           instance.lipschitz_bound, tol)},
      {"L", instance.lipschitz_bound},
      {"lipschitz_constant", worst.value},
      {"worst_pair", {worst.i, worst.j}},
  };
}

Json certificate_to_json(const ExtremalityCertificate& cert) {
  Json doc = {{"format_version", kFormatVersion}, {"kind", "certificate"}};
  if (const auto* ext = std::get_if<Extreme>(&cert)) {
    doc["status"] = "extreme";
    Json parent = Json::array();
    for (int p : ext->parent) parent.push_back(p < 0 ? Json(nullptr) : Json(p));
    doc["parent"] = std::move(parent);
  } else {
    const SlackCut& cut = std::get<NotExtreme>(cert).cut;
    doc["status"] = "not_extreme";
    doc["S"] = cut.nodes;
    doc["epsilon"] = cut.epsilon;
    doc["binding_pair"] = {cut.binding.first, cut.binding.second};
  }
  return doc;
}

Json report_to_json(const VerificationReport& report) {
  Json atoms = Json::array();
  for (const AtomReport& a : report.atoms) {
    Json entry = {{"shape_ok", a.shape_ok},     {"member", a.member},
                  {"extreme", a.extreme},       {"t_bound_ok", a.t_bound_ok},
                  {"consistent", a.consistent}, {"passed", a.passed()}};
    entry["oracle_extreme"] =
        a.oracle_extreme ? Json(*a.oracle_extreme) : Json(nullptr);
    atoms.push_back(std::move(entry));
  }
  return {
      {"passed", report.passed()},
      {"k", report.k},
      {"count_ok", report.count_ok},
      {"weights_nonnegative", report.weights_nonnegative},
      {"weight_sum_deviation", finite_or_null(report.weight_sum_deviation)},
      {"weight_sum_ok", report.weight_sum_ok},
      {"reconstruction_error", finite_or_null(report.reconstruction_error)},
      {"reconstruction_ok", report.reconstruction_ok},
      {"direction_ok", report.direction_ok},
      {"atoms", std::move(atoms)},
  };
}

Json decomposition_to_json(const Decomposition& dec, double reconstruction_error,
                           bool verified,
                           const std::optional<VerificationReport>& report) {
  Json atoms = Json::array();
  for (const WeightedAtom& wa : dec.atoms) {
    atoms.push_back({{"weight", wa.weight},
                     {"t", vector_json(wa.atom.t)},
                     {"point", matrix_json(wa.atom.point.values())}});
  }
  Json doc = {
      {"format_version", kFormatVersion},
      {"kind", "decomposition"},
      {"k", dec.k()},
      {"direction", vector_json(dec.direction)},
      {"atoms", std::move(atoms)},
      {"reconstruction_error", finite_or_null(reconstruction_error)},
      {"verified", verified},
  };
  if (report) doc["report"] = report_to_json(*report);
  return doc;
}

Decomposition decomposition_from_json(const Json& doc, const Instance& instance) {
  check_keys(doc, "decomposition", {"format_version", "direction", "atoms"},
             {"kind", "k", "reconstruction_error", "verified", "report"});
  check_version(doc);
  check_kind(doc, "decomposition");

  Decomposition dec;
  dec.direction = read_vector(doc.at("direction"), "direction");
  if (dec.direction.size() != instance.norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "direction does not match the instance dimension");
  }
  const Json& atoms = doc.at("atoms");
  if (!atoms.is_array()) malformed("atoms must be an array");
  for (const Json& entry : atoms) {
    check_keys(entry, "atom", {"weight", "t", "point"}, {});
    TVector t = read_vector(entry.at("t"), "atom.t");
    Matrix values = read_matrix(entry.at("point"), "atom.point");
    if (t.size() != instance.space.size() ||
        values.rows() != instance.space.size() ||
        values.cols() != instance.norm.dim()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "atom shape does not match the instance");
    }
    dec.atoms.push_back({read_number(entry.at("weight"), "atom.weight"),
                         Atom{std::move(t), LipschitzPoint(std::move(values)),
                              std::nullopt}});
  }
  if (doc.contains("k") &&
      read_int(doc.at("k"), "k") != static_cast<int>(dec.atoms.size())) {
    malformed("k does not match the number of atoms");
  }
  return dec;
}

Json error_to_json(const Error& error) {
  return {
      {"format_version", kFormatVersion},
      {"kind", "error"},
      {"error", std::string(to_string(error.code()))},
      {"indices", error.indices()},
      {"message", error.what()},
  };
}

double reconstruction_error(const LipschitzPoint& y, const Decomposition& dec) {
  Matrix combination = Matrix::Zero(y.values().rows(), y.values().cols());
  for (const WeightedAtom& wa : dec.atoms) combination += wa.weight * wa.atom.point.values();
  return (combination - y.values()).cwiseAbs().maxCoeff();
}

}  // namespace lipext::io
