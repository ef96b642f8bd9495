#include "lqp/instance_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lqp/error.hpp"

namespace lqp {

namespace {

using json = nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw Error(ErrorCode::InputError, source_ + ": field '" + field + "': " + msg);
  }

  const json& member(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "/" + key, "missing required field");
    return *it;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  Vector vector(const json& v, Eigen::Index len, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    if (static_cast<Eigen::Index>(v.size()) != len) {
      fail(path, "expected length " + std::to_string(len) + ", got " + std::to_string(v.size()));
    }
    Vector out(len);
    for (Eigen::Index i = 0; i < len; ++i) out(i) = number(v[i], path + "/" + std::to_string(i));
    return out;
  }

  Matrix matrix(const json& v, Eigen::Index rows, Eigen::Index cols, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of rows");
    if (static_cast<Eigen::Index>(v.size()) != rows) {
      fail(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
    }
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      out.row(i) = vector(v[i], cols, path + "/" + std::to_string(i)).transpose();
    }
    return out;
  }

  void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown field");
    }
  }

  template <typename F>
  auto guarded(const std::string& path, F&& f) const {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InputError) throw;
      fail(path, e.what());
    }
  }

 private:
  std::string source_;
};

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

Matrix InstanceFile::base_C() const { return hypothesis.C0 ? *hypothesis.C0 : hypothesis.C; }

InstanceFile parse_instance(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InputError,
                source + ":" + std::to_string(line_of_offset(text, e.byte)) + ": syntax error: " + e.what());
  }
  const Reader rd(source);
  if (!doc.is_object()) rd.fail("/", "expected a JSON object");
  rd.only_keys(doc, {"schema_version", "n", "reduced", "raw", "hypothesis", "prior"}, "");

  InstanceFile inst;
  const json& ver = rd.member(doc, "schema_version", "");
  if (!ver.is_string()) rd.fail("/schema_version", "expected a string");
  inst.schema_version = ver.get<std::string>();
  if (inst.schema_version != "1") rd.fail("/schema_version", "unsupported version '" + inst.schema_version + "'");

  inst.n = rd.integer(rd.member(doc, "n", ""), "/n");
  const int n = inst.n;
  if (n < 1) rd.fail("/n", "must be positive");

  const bool has_reduced = doc.contains("reduced");
  const bool has_raw = doc.contains("raw");
  if (has_reduced == has_raw) rd.fail("/", "exactly one of 'reduced' or 'raw' is required");

  if (has_reduced) {
    const json& red = doc["reduced"];
    if (!red.is_object()) rd.fail("/reduced", "expected an object");
    rd.only_keys(red, {"Q", "l", "r"}, "/reduced");
    inst.qf.n = n;
    inst.qf.Q = rd.matrix(rd.member(red, "Q", "/reduced"), 2 * n, 2 * n, "/reduced/Q");
    inst.qf.l = red.contains("l") ? rd.vector(red["l"], 2 * n, "/reduced/l") : Vector::Zero(2 * n);
    inst.qf.r = red.contains("r") ? rd.number(red["r"], "/reduced/r") : 0.0;
    inst.qf.Q = symmetrize(inst.qf.Q);
    const EigenDecomposition ed = eig_sym(inst.qf.Q);
    if (ed.eigenvalues.minCoeff() < -1e-9 * (1.0 + ed.eigenvalues.cwiseAbs().maxCoeff())) {
      rd.fail("/reduced/Q", "not positive semidefinite");
    }
    if (inst.qf.r < -1e-12) rd.fail("/reduced/r", "must be nonnegative");
  } else {
    const json& raw = doc["raw"];
    if (!raw.is_object()) rd.fail("/raw", "expected an object");
    rd.only_keys(raw, {"k", "M", "p", "q", "B", "b"}, "/raw");
    RawGame g;
    g.n = n;
    g.k = rd.integer(rd.member(raw, "k", "/raw"), "/raw/k");
    if (g.k < 1) rd.fail("/raw/k", "must be positive");
    g.M = rd.matrix(rd.member(raw, "M", "/raw"), n + g.k, n + g.k, "/raw/M");
    g.p = raw.contains("p") ? rd.vector(raw["p"], n + g.k, "/raw/p") : Vector::Zero(n + g.k);
    g.q = raw.contains("q") ? rd.number(raw["q"], "/raw/q") : 0.0;
    g.B = rd.matrix(rd.member(raw, "B", "/raw"), g.k, n, "/raw/B");
    g.b = raw.contains("b") ? rd.vector(raw["b"], g.k, "/raw/b") : Vector::Zero(g.k);
    inst.qf = rd.guarded("/raw", [&] { return decompose_nonneg(g); });
    inst.raw = g;
  }

  const json& hyp = rd.member(doc, "hypothesis", "");
  if (!hyp.is_object() || hyp.size() != 1) {
    rd.fail("/hypothesis", "expected an object with exactly one hypothesis form");
  }
  const std::string kind = hyp.begin().key();
  const json& body = hyp.begin().value();
  const std::string hp = "/hypothesis/" + kind;
  inst.hypothesis_kind = kind;
  if (kind == "matrix") {
    inst.hypothesis = EllipsoidalHypothesis::from_matrix(rd.matrix(body, n, n, hp));
  } else if (kind == "scaled_identity") {
    const double eps = rd.number(body, hp);
    if (eps < 0.0) rd.fail(hp, "must be nonnegative");
    inst.hypothesis = EllipsoidalHypothesis::scaled(Matrix::Identity(n, n), eps);
  } else if (kind == "wasserstein") {
    rd.only_keys(body, {"epsilon"}, hp);
    const double eps = rd.number(rd.member(body, "epsilon", hp), hp + "/epsilon");
    inst.hypothesis = rd.guarded(hp, [&] { return hypothesis_wasserstein(eps, n); });
  } else if (kind == "costly_update") {
    rd.only_keys(body, {"R", "epsilon"}, hp);
    const Matrix R = rd.matrix(rd.member(body, "R", hp), 2 * n, 2 * n, hp + "/R");
    const double eps = rd.number(rd.member(body, "epsilon", hp), hp + "/epsilon");
    inst.hypothesis = rd.guarded(hp, [&] { return hypothesis_costly_update(R, eps); });
  } else if (kind == "mismatched_prior") {
    rd.only_keys(body, {"epsilon", "trace_sigma_bound"}, hp);
    const double eps = rd.number(rd.member(body, "epsilon", hp), hp + "/epsilon");
    const double bound = body.contains("trace_sigma_bound")
                             ? rd.number(body["trace_sigma_bound"], hp + "/trace_sigma_bound")
                             : static_cast<double>(n);
    inst.hypothesis = rd.guarded(hp, [&] { return hypothesis_mismatched_prior(eps, bound, n); });
  } else if (kind == "affine_distortion") {
    rd.only_keys(body, {"chi", "epsilon"}, hp);
    const double chi = rd.number(rd.member(body, "chi", hp), hp + "/chi");
    const double eps = rd.number(rd.member(body, "epsilon", hp), hp + "/epsilon");
    inst.hypothesis = rd.guarded(hp, [&] { return hypothesis_affine_distortion(chi, eps, n); });
  } else {
    rd.fail("/hypothesis/" + kind, "unknown hypothesis form");
  }

  inst.prior = {PriorFamily::Gaussian, n};
  if (doc.contains("prior")) {
    const json& pr = doc["prior"];
    if (!pr.is_object()) rd.fail("/prior", "expected an object");
    rd.only_keys(pr, {"family", "n"}, "/prior");
    if (pr.contains("family")) {
      if (!pr["family"].is_string()) rd.fail("/prior/family", "expected a string");
      const std::string fam = pr["family"].get<std::string>();
      if (fam == "gaussian") {
        inst.prior.family = PriorFamily::Gaussian;
      } else if (fam == "sphere") {
        inst.prior.family = PriorFamily::Sphere;
      } else {
        rd.fail("/prior/family", "expected 'gaussian' or 'sphere'");
      }
    }
    if (pr.contains("n")) {
      inst.prior.n = rd.integer(pr["n"], "/prior/n");
      if (inst.prior.n != n) rd.fail("/prior/n", "must equal the instance dimension");
    }
  }
  return inst;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InputError, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), path);
}

}  // namespace lqp
