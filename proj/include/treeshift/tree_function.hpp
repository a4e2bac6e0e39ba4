#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>

#include <json.hpp>

#include "treeshift/scalar.hpp"
#include "treeshift/tree_view.hpp"

namespace treeshift {

enum class FamilyKind {
  indicator,         // chi_v
  level,             // g(v) = |v|
  harmonic_level,    // g(v) = sum_{k=1..|v|} 1/k
  g1,                // 1, 2, 1, 0, ... by level
  g2,                // bump of height 3 around Chi(u*)
  g3,                // signed bump separating u* from its siblings
  h_extremal,        // h_n: the extremal function attaining |B^n|
  eigen,             // f_lambda(v) = (lambda/gamma)^{|v|}
  resolvent,         // f(v) = -1/lambda^{|v|+1}, solves (S-lambda)f = chi_root
  backward_level,    // B applied to level: gamma(v)(|v|+1)
  backward_harmonic  // B applied to harmonic_level: gamma(v) H_{|v|+1}
};

struct Family {
  FamilyKind kind;
  VertexId vertex;  // indicator vertex, or the u* of g2/g3/h
  int n = 0;        // order of h_n
  Scalar lambda;
  Integer gamma = 0;  // order of the homogeneous tree, for eigen
};

/// A complex- or rational-valued function on the vertices of a tree. Finitely
/// supported functions are explicit maps; the named families evaluate in
/// O(level). Values are immutable; all operations are pure.
class TreeFunction {
 public:
  using Support = std::map<VertexId, Scalar>;

  TreeFunction() : rep_(Support{}) {}

  static TreeFunction zero() { return TreeFunction(); }

  static TreeFunction finite(Support values) {
    Support cleaned;
    for (auto& [v, s] : values)
      if (!s.is_zero()) cleaned.emplace(v, s);
    TreeFunction f;
    f.rep_ = std::move(cleaned);
    return f;
  }

  static TreeFunction indicator(const VertexId& v) {
    return finite({{v, Scalar(1)}});
  }

  static TreeFunction level() { return from_family({FamilyKind::level, {}, 0, {}, 0}); }
  static TreeFunction harmonic_level() {
    return from_family({FamilyKind::harmonic_level, {}, 0, {}, 0});
  }
  static TreeFunction g1() { return from_family({FamilyKind::g1, {}, 0, {}, 0}); }
  static TreeFunction g2(const VertexId& u_star) {
    if (u_star.is_root()) throw ContractError("g2 requires u* != root");
    return from_family({FamilyKind::g2, u_star, 0, {}, 0});
  }
  static TreeFunction g3(const VertexId& u_star) {
    if (u_star.level() != 1) throw ContractError("g3 requires |u*| = 1");
    return from_family({FamilyKind::g3, u_star, 0, {}, 0});
  }
  static TreeFunction h_extremal(int n, const VertexId& u_star) {
    if (n < 1) throw ContractError("h_n requires n >= 1");
    if (u_star.level() != 1) throw ContractError("h_n requires u* to be a child of the root");
    return from_family({FamilyKind::h_extremal, u_star, n, {}, 0});
  }
  static TreeFunction eigen(const Scalar& lambda, const Integer& gamma) {
    if (gamma < 1) throw ContractError("eigenfunction family requires gamma >= 1");
    return from_family({FamilyKind::eigen, {}, 0, lambda, gamma});
  }
  static TreeFunction resolvent(const Scalar& lambda) {
    if (lambda.is_zero()) throw ContractError("resolvent family requires lambda != 0");
    return from_family({FamilyKind::resolvent, {}, 0, lambda, 0});
  }
  static TreeFunction backward_level() {
    return from_family({FamilyKind::backward_level, {}, 0, {}, 0});
  }
  static TreeFunction backward_harmonic() {
    return from_family({FamilyKind::backward_harmonic, {}, 0, {}, 0});
  }

  /// Path-sum inverse of the derivative map: f(v) = sum of g over the path
  /// from the root to v. Eventually constant along every branch.
  static TreeFunction antiderivative_of(Support g) {
    TreeFunction f;
    f.rep_ = Antiderivative{std::move(g)};
    return f;
  }

  /// Lazy n-fold forward shift of an arbitrary function.
  static TreeFunction forward_of(TreeFunction inner, int n) {
    if (n < 1) throw ContractError("forward shift power must be >= 1");
    TreeFunction f;
    f.rep_ = Forward{std::make_shared<TreeFunction>(std::move(inner)), n};
    return f;
  }

  /// Lazy derivative of an arbitrary function.
  static TreeFunction derivative_view(TreeFunction inner) {
    TreeFunction f;
    f.rep_ = DerivativeView{std::make_shared<TreeFunction>(std::move(inner))};
    return f;
  }

  // --- structure queries ---

  bool is_finite_support() const { return std::holds_alternative<Support>(rep_); }
  const Support& support() const {
    if (!is_finite_support()) throw ContractError("function is not finitely supported");
    return std::get<Support>(rep_);
  }
  bool is_family() const { return std::holds_alternative<Family>(rep_); }
  const Family& family() const {
    if (!is_family()) throw ContractError("function is not a closed-form family");
    return std::get<Family>(rep_);
  }
  bool is_antiderivative() const { return std::holds_alternative<Antiderivative>(rep_); }
  const Support& antiderivative_base() const {
    return std::get<Antiderivative>(rep_).g;
  }
  bool is_forward() const { return std::holds_alternative<Forward>(rep_); }
  const TreeFunction& forward_inner() const { return *std::get<Forward>(rep_).inner; }
  int forward_power() const { return std::get<Forward>(rep_).n; }
  bool is_derivative_view() const { return std::holds_alternative<DerivativeView>(rep_); }
  const TreeFunction& derivative_inner() const {
    return *std::get<DerivativeView>(rep_).inner;
  }

  const Scalar& scale() const { return scale_; }

  TreeFunction scaled(const Scalar& c) const {
    if (is_finite_support()) {
      Support out;
      for (const auto& [v, s] : support()) {
        Scalar scaledv = c * s;
        if (!scaledv.is_zero()) out.emplace(v, scaledv);
      }
      return finite(std::move(out));
    }
    TreeFunction f = *this;
    f.scale_ = c * scale_;
    return f;
  }

  int support_depth() const {
    const Support& s = support();
    int depth = 0;
    for (const auto& [v, value] : s) {
      (void)value;
      depth = std::max(depth, v.level());
    }
    return depth;
  }

  Magnitude max_abs() const {
    Magnitude m(Rational(0));
    for (const auto& [v, s] : support()) {
      (void)v;
      m = max(m, s.abs());
    }
    return m;
  }

  bool all_exact() const {
    for (const auto& [v, s] : support()) {
      (void)v;
      if (!s.exact()) return false;
    }
    return true;
  }

  // --- evaluation ---

  Scalar eval(const TreeView& tree, const VertexId& v) const {
    return scale_ * raw_eval(tree, v);
  }

  /// f'(v) = f(v) - f(par v), with f'(root) = f(root).
  Scalar derivative_at(const TreeView& tree, const VertexId& v) const {
    if (v.is_root()) return eval(tree, v);
    return eval(tree, v) - eval(tree, v.parent());
  }

  // --- finite-support algebra ---

  friend TreeFunction operator+(const TreeFunction& a, const TreeFunction& b) {
    Support out = a.support();
    for (const auto& [v, s] : b.support()) {
      auto it = out.find(v);
      if (it == out.end())
        out.emplace(v, s);
      else
        it->second = it->second + s;
    }
    return finite(std::move(out));
  }
  friend TreeFunction operator-(const TreeFunction& a, const TreeFunction& b) {
    return a + b.scaled(Scalar(-1));
  }

  /// Explicit finite-support form of band-limited families. Enumerates the
  /// tree down to the family's last band, so the cost is the size of that
  /// region.
  TreeFunction materialized(const TreeView& tree) const {
    if (is_finite_support()) return *this;
    int depth;
    if (is_family()) {
      const Family& fam = family();
      switch (fam.kind) {
        case FamilyKind::indicator:
          depth = fam.vertex.level();
          break;
        case FamilyKind::g1:
          depth = 2;
          break;
        case FamilyKind::g2:
          depth = fam.vertex.level() + 3;
          break;
        case FamilyKind::g3:
          depth = 2;
          break;
        case FamilyKind::h_extremal:
          depth = 2 * fam.n + 3;
          break;
        default:
          throw ContractError("family has infinite support and cannot be materialized");
      }
    } else {
      throw ContractError("function cannot be materialized to finite support");
    }
    tree.check_depth(depth);  // a truncated band would silently corrupt values
    Support out;
    tree.for_each_vertex(depth, [&](const VertexId& v) {
      Scalar s = eval(tree, v);
      if (!s.is_zero()) out.emplace(v, s);
    });
    return finite(std::move(out));
  }

  // --- serialization ---

  static TreeFunction from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
      throw SpecError("function literal must be an object with a 'kind'");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite") {
      for (const auto& f : j.items())
        if (f.key() != "kind" && f.key() != "values")
          throw SpecError("unknown field in function literal: '" + f.key() + "'");
      if (!j.contains("values") || !j.at("values").is_object())
        throw SpecError("finite function literal requires an object 'values'");
      Support values;
      for (const auto& item : j.at("values").items()) {
        VertexId v = VertexId::parse(item.key());
        values.emplace(v, scalar_from_json(item.value()));
      }
      return finite(std::move(values));
    }
    if (kind == "family") {
      for (const auto& f : j.items())
        if (f.key() != "kind" && f.key() != "name" && f.key() != "params")
          throw SpecError("unknown field in function literal: '" + f.key() + "'");
      if (!j.contains("name") || !j.at("name").is_string())
        throw SpecError("family literal requires a string 'name'");
      nlohmann::json params = j.value("params", nlohmann::json::object());
      if (!params.is_object()) throw SpecError("family 'params' must be an object");
      try {
        return family_from_json(j.at("name").get<std::string>(), params);
      } catch (const ContractError& e) {
        throw SpecError(std::string("bad family literal: ") + e.what());
      }
    }
    throw SpecError("unknown function literal kind: '" + kind + "'");
  }

  static TreeFunction from_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SpecError("function literal is not valid JSON");
    return from_json(j);
  }

  nlohmann::json to_json() const {
    if (is_finite_support()) {
      nlohmann::json values = nlohmann::json::object();
      for (const auto& [v, s] : support()) values[v.str()] = scalar_to_json(s);
      return {{"kind", "finite"}, {"values", values}};
    }
    if (is_family() && scale_.equals(Scalar(1))) {
      const Family& fam = family();
      nlohmann::json params = nlohmann::json::object();
      switch (fam.kind) {
        case FamilyKind::indicator:
          params["vertex"] = fam.vertex.str();
          return family_json("indicator", params);
        case FamilyKind::level:
          return family_json("level", params);
        case FamilyKind::harmonic_level:
          return family_json("harmonic_level", params);
        case FamilyKind::g1:
          return family_json("g1", params);
        case FamilyKind::g2:
          params["vertex"] = fam.vertex.str();
          return family_json("g2", params);
        case FamilyKind::g3:
          params["vertex"] = fam.vertex.str();
          return family_json("g3", params);
        case FamilyKind::h_extremal:
          params["n"] = fam.n;
          params["vertex"] = fam.vertex.str();
          return family_json("h", params);
        case FamilyKind::eigen:
          params["lambda"] = fam.lambda.str();
          params["gamma"] = static_cast<std::int64_t>(fam.gamma);
          return family_json("eigen", params);
        case FamilyKind::resolvent:
          params["lambda"] = fam.lambda.str();
          return family_json("resolvent", params);
        default:
          break;
      }
    }
    throw ContractError("function has no literal serialization");
  }

  std::string describe() const {
    if (is_finite_support())
      return "finite(" + std::to_string(support().size()) + ")";
    if (is_antiderivative()) return "antiderivative";
    if (is_forward()) return "S^" + std::to_string(forward_power()) + " of " +
                             forward_inner().describe();
    if (is_derivative_view()) return "derivative of " + derivative_inner().describe();
    const Family& fam = family();
    switch (fam.kind) {
      case FamilyKind::indicator: return "chi_{" + fam.vertex.str() + "}";
      case FamilyKind::level: return "level";
      case FamilyKind::harmonic_level: return "harmonic_level";
      case FamilyKind::g1: return "g1";
      case FamilyKind::g2: return "g2(" + fam.vertex.str() + ")";
      case FamilyKind::g3: return "g3(" + fam.vertex.str() + ")";
      case FamilyKind::h_extremal:
        return "h_" + std::to_string(fam.n) + "(" + fam.vertex.str() + ")";
      case FamilyKind::eigen: return "eigen(" + fam.lambda.str() + ")";
      case FamilyKind::resolvent: return "resolvent(" + fam.lambda.str() + ")";
      case FamilyKind::backward_level: return "B(level)";
      case FamilyKind::backward_harmonic: return "B(harmonic_level)";
    }
    return "?";
  }

  static Scalar scalar_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
      auto r = parse_rational(j.get<std::string>());
      if (!r) throw SpecError("bad rational literal: '" + j.get<std::string>() + "'");
      return Scalar(*r);
    }
    if (j.is_number_integer()) return Scalar(Rational(j.get<std::int64_t>()));
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return Scalar(Complex(j[0].get<double>(), j[1].get<double>()));
    throw SpecError("scalar literal must be \"p/q\", an integer, or [re, im]");
  }

  static nlohmann::json scalar_to_json(const Scalar& s) {
    if (s.exact()) return rational_to_string(s.rational());
    Complex z = s.complex_value();
    return nlohmann::json::array({z.real(), z.imag()});
  }

 private:
  struct Antiderivative {
    Support g;
  };
  struct Forward {
    std::shared_ptr<const TreeFunction> inner;
    int n;
  };
  struct DerivativeView {
    std::shared_ptr<const TreeFunction> inner;
  };

  static TreeFunction from_family(Family fam) {
    TreeFunction f;
    f.rep_ = std::move(fam);
    return f;
  }

  static nlohmann::json family_json(const std::string& name, const nlohmann::json& params) {
    return {{"kind", "family"}, {"name", name}, {"params", params}};
  }

  static TreeFunction family_from_json(const std::string& name, const nlohmann::json& params) {
    auto known = [&](std::initializer_list<const char*> keys) {
      for (const auto& item : params.items()) {
        bool ok = false;
        for (const char* k : keys)
          if (item.key() == k) ok = true;
        if (!ok) throw SpecError("unknown family parameter: '" + item.key() + "'");
      }
    };
    auto vertex_param = [&]() {
      if (!params.contains("vertex") || !params.at("vertex").is_string())
        throw SpecError("family requires a string 'vertex'");
      return VertexId::parse(params.at("vertex").get<std::string>());
    };
    if (name == "indicator") {
      known({"vertex"});
      return indicator(vertex_param());
    }
    if (name == "level") {
      known({});
      return level();
    }
    if (name == "harmonic_level") {
      known({});
      return harmonic_level();
    }
    if (name == "g1") {
      known({});
      return g1();
    }
    if (name == "g2") {
      known({"vertex"});
      return g2(vertex_param());
    }
    if (name == "g3") {
      known({"vertex"});
      return g3(vertex_param());
    }
    if (name == "h") {
      known({"n", "vertex"});
      if (!params.contains("n") || !params.at("n").is_number_unsigned())
        throw SpecError("family 'h' requires a nonnegative integer 'n'");
      return h_extremal(params.at("n").get<int>(), vertex_param());
    }
    if (name == "eigen") {
      known({"lambda", "gamma"});
      if (!params.contains("lambda") || !params.at("lambda").is_string())
        throw SpecError("family 'eigen' requires a string 'lambda'");
      if (!params.contains("gamma") || !params.at("gamma").is_number_unsigned())
        throw SpecError("family 'eigen' requires a nonnegative integer 'gamma'");
      return eigen(parse_scalar(params.at("lambda").get<std::string>()),
                   Integer(params.at("gamma").get<std::uint64_t>()));
    }
    if (name == "resolvent") {
      known({"lambda"});
      if (!params.contains("lambda") || !params.at("lambda").is_string())
        throw SpecError("family 'resolvent' requires a string 'lambda'");
      return resolvent(parse_scalar(params.at("lambda").get<std::string>()));
    }
    throw SpecError("unknown family name: '" + name + "'");
  }

  Scalar raw_eval(const TreeView& tree, const VertexId& v) const {
    if (is_finite_support()) {
      auto it = support().find(v);
      return it == support().end() ? Scalar(0) : it->second;
    }
    if (is_antiderivative()) {
      const Support& g = antiderivative_base();
      Scalar total(0);
      for (int k = 0; k <= v.level(); ++k) {
        auto it = g.find(v.ancestor_at(k));
        if (it != g.end()) total = total + it->second;
      }
      return total;
    }
    if (is_forward()) {
      const Forward& fw = std::get<Forward>(rep_);
      if (v.level() < fw.n) return Scalar(0);
      return fw.inner->eval(tree, v.ancestor_at(v.level() - fw.n));
    }
    if (is_derivative_view()) {
      return std::get<DerivativeView>(rep_).inner->derivative_at(tree, v);
    }
    const Family& fam = family();
    int L = v.level();
    switch (fam.kind) {
      case FamilyKind::indicator:
        return v == fam.vertex ? Scalar(1) : Scalar(0);
      case FamilyKind::level:
        return Scalar(Rational(L));
      case FamilyKind::harmonic_level:
        return Scalar(harmonic_number(L));
      case FamilyKind::g1:
        if (L == 0) return Scalar(1);
        if (L == 1) return Scalar(2);
        if (L == 2) return Scalar(1);
        return Scalar(0);
      case FamilyKind::g2: {
        const VertexId& u = fam.vertex;
        if (v == u.parent()) return Scalar(1);
        if (!u.is_ancestor_or_self_of(v)) return Scalar(0);
        int k = L - u.level();
        if (k == 0) return Scalar(2);
        if (k == 1) return Scalar(3);
        if (k == 2) return Scalar(2);
        if (k == 3) return Scalar(1);
        return Scalar(0);
      }
      case FamilyKind::g3: {
        const VertexId& u = fam.vertex;
        if (L == 0) return Scalar(-1);
        if (v == u) return Scalar(0);
        if (L == 1) return Scalar(-2);
        if (L == 2) return v.parent() == u ? Scalar(1) : Scalar(-1);
        return Scalar(0);
      }
      case FamilyKind::h_extremal: {
        if (L == 0) return Scalar(1);
        int n = fam.n;
        if (fam.vertex.is_ancestor_or_self_of(v)) {
          if (L <= n + 1) return Scalar(Rational(L + 1));
          if (L <= 2 * n + 3) return Scalar(Rational(2 * n + 3 - L));
          return Scalar(0);
        }
        if (L <= n) return Scalar(Rational(1 - L));
        if (L <= 2 * n - 1) return Scalar(Rational(L - (2 * n - 1)));
        return Scalar(0);
      }
      case FamilyKind::eigen:
        return (fam.lambda / Scalar(Rational(fam.gamma))).pow(L);
      case FamilyKind::resolvent:
        return -(Scalar(1) / fam.lambda).pow(L + 1);
      case FamilyKind::backward_level:
        return Scalar(Rational(tree.degree(v)) * Rational(L + 1));
      case FamilyKind::backward_harmonic:
        return Scalar(Rational(tree.degree(v)) * harmonic_number(L + 1));
    }
    throw ContractError("unreachable family kind");
  }

  std::variant<Support, Family, Antiderivative, Forward, DerivativeView> rep_;
  Scalar scale_{1};
};

}  // namespace treeshift
