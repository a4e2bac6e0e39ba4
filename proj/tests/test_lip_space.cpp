#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace treeshift;
using namespace treeshift::testing;

TEST_CASE("derivative of basic functions") {
  TreeView tree(homogeneous_spec(2));

  SECTION("indicator of the root") {
    TreeFunction d = derivative(tree, TreeFunction::indicator(VertexId::root()));
    CHECK(d.eval(tree, VertexId::root()).equals(Scalar(1)));
    CHECK(d.eval(tree, VertexId::parse("0")).equals(Scalar(-1)));
    CHECK(d.eval(tree, VertexId::parse("1")).equals(Scalar(-1)));
    CHECK(d.eval(tree, VertexId::parse("0.1")).equals(Scalar(0)));
  }

  SECTION("level function telescopes to one") {
    TreeFunction d = derivative(tree, TreeFunction::level());
    CHECK(d.eval(tree, VertexId::root()).equals(Scalar(0)));
    tree.for_each_vertex(4, [&](const VertexId& v) {
      if (!v.is_root()) CHECK(d.eval(tree, v).equals(Scalar(1)));
    });
  }

  SECTION("h_2 has unit bands") {
    TreeFunction h = TreeFunction::h_extremal(2, VertexId::parse("0"));
    tree.for_each_vertex(8, [&](const VertexId& v) {
      Magnitude m = h.derivative_at(tree, v).abs();
      CHECK((m.is_zero() || m == Magnitude(Rational(1))));
    });
    NormReport r = lip_norm(tree, h);
    CHECK(r.value.finite() == Magnitude(Rational(1)));
    CHECK(r.exactness == Exactness::exact);
    CHECK(brute_sup_derivative(tree, h, 8) == Magnitude(Rational(1)));
  }
}

TEST_CASE("antiderivative inverts the derivative") {
  TreeView tree(homogeneous_spec(2));

  SECTION("indicator of the root integrates to the constant one") {
    TreeFunction f = antiderivative(tree, TreeFunction::indicator(VertexId::root()));
    tree.for_each_vertex(4, [&](const VertexId& v) { CHECK(f.eval(tree, v).equals(Scalar(1))); });
  }

  SECTION("round trip through a level-one indicator") {
    TreeFunction f = TreeFunction::indicator(VertexId::parse("1"));
    TreeFunction back = antiderivative(tree, derivative(tree, f));
    CHECK(pointwise_equal(tree, f, back, 4));
  }

  SECTION("integrating the constant-one derivative gives the level function") {
    TreeFunction g = derivative(tree, TreeFunction::level());
    TreeFunction f = antiderivative(tree, g);
    CHECK(pointwise_equal(tree, f, TreeFunction::level(), 5));
  }

  SECTION("bijection on seeded finite supports") {
    SeededRng rng(7);
    for (int i = 0; i < 40; ++i) {
      TreeFunction f = random_finite_support(rng, tree, 6, 4);
      CHECK(pointwise_equal(tree, antiderivative(tree, derivative(tree, f)), f, 6));
      TreeFunction g = random_finite_support(rng, tree, 6, 4);
      TreeFunction d = derivative(tree, antiderivative(tree, g));
      CHECK(pointwise_equal(tree, d, g, 6));
    }
  }
}

TEST_CASE("Lipschitz norms of the named families") {
  SECTION("g1 has norm one") {
    TreeView tree(homogeneous_spec(3));
    NormReport r = lip_norm(tree, TreeFunction::g1());
    CHECK(r.value.finite() == Magnitude(Rational(1)));
    CHECK(r.exactness == Exactness::exact);
    CHECK(brute_sup_derivative(tree, TreeFunction::g1(), 4) == Magnitude(Rational(1)));
  }

  SECTION("eigenfunction outside the closed disk is not Lipschitz") {
    TreeView tree(homogeneous_spec(2));
    NormReport r = lip_norm(tree, TreeFunction::eigen(Scalar(Rational(3)), 2));
    CHECK(r.value.infinite());
    // its derivative modulus grows geometrically
    TreeFunction f = TreeFunction::eigen(Scalar(Rational(3)), 2);
    Magnitude shallow = brute_sup_derivative(tree, f, 4);
    Magnitude deep = brute_sup_derivative(tree, f, 8);
    CHECK(shallow < deep);
  }

  SECTION("g3 on a binary root with a ternary favourite child") {
    TreeView tree(level1_spec({3, 2}));
    TreeFunction g3 = TreeFunction::g3(VertexId::parse("0"));
    NormReport r = lip_norm(tree, g3);
    CHECK(r.value.finite() == Magnitude(Rational(1)));
    CHECK(r.exactness == Exactness::exact);
    CHECK(brute_sup_derivative(tree, g3, 5) == Magnitude(Rational(1)));
  }

  SECTION("norm-one families stay norm one across trees and parameters") {
    std::vector<TreeSpec> specs{homogeneous_spec(1), homogeneous_spec(2), mixed_spec(),
                                level1_spec({2, 3})};
    for (const auto& spec : specs) {
      TreeView tree(spec);
      // keep the brute-force enumeration near 10^5 vertices per check
      Integer budget = 1;
      int depth_cap = 0;
      while (depth_cap < 20 && budget < 100000) {
        ++depth_cap;
        budget += tree.gamma_n(VertexId::root(), depth_cap);
      }
      for (int n = 1; n <= 8 && 2 * n + 4 <= depth_cap; ++n) {
        for (const auto& u_star : tree.children(VertexId::root())) {
          TreeFunction h = TreeFunction::h_extremal(n, u_star);
          CHECK(lip_norm(tree, h).value.finite() == Magnitude(Rational(1)));
          CHECK(brute_sup_derivative(tree, h, 2 * n + 4) == Magnitude(Rational(1)));
        }
      }
      CHECK(lip_norm(tree, TreeFunction::g1()).value.finite() == Magnitude(Rational(1)));
      for (const auto& u : tree.children(VertexId::root())) {
        CHECK(lip_norm(tree, TreeFunction::g2(u)).value.finite() == Magnitude(Rational(1)));
        CHECK(brute_sup_derivative(tree, TreeFunction::g2(u), 6) == Magnitude(Rational(1)));
        CHECK(lip_norm(tree, TreeFunction::g3(u)).value.finite() == Magnitude(Rational(1)));
        CHECK(brute_sup_derivative(tree, TreeFunction::g3(u), 6) == Magnitude(Rational(1)));
      }
    }
  }

  SECTION("scaling by zero kills an unbounded family") {
    TreeView tree(homogeneous_spec(2));
    TreeFunction z = TreeFunction::eigen(Scalar(Rational(3)), 2).scaled(Scalar(0));
    NormReport r = lip_norm(tree, z);
    REQUIRE_FALSE(r.value.infinite());
    CHECK(r.value.finite().is_zero());
  }

  SECTION("materialization refuses to truncate a band silently") {
    TreeView tree(homogeneous_spec(2), 5);
    CHECK_THROWS_AS(TreeFunction::h_extremal(4, VertexId::parse("0")).materialized(tree),
                    DepthCapError);
  }

  SECTION("truncated scans report lower bounds") {
    TreeView tree(homogeneous_spec(2));
    SeededRng rng(3);
    TreeFunction f = random_finite_support(rng, tree, 5, 5);
    NormReport full = lip_norm(tree, f);
    CHECK(full.exactness == Exactness::exact);
    NormReport shallow = lip_norm(tree, f, 1);
    CHECK(shallow.exactness == Exactness::lower_bound);
    CHECK_FALSE(full.value < shallow.value);
  }
}

TEST_CASE("lip_norm agrees with the supremum of the derivative") {
  TreeView tree(homogeneous_spec(2));
  std::vector<TreeFunction> functions{
      TreeFunction::level(),
      TreeFunction::harmonic_level(),
      TreeFunction::g1(),
      TreeFunction::g2(VertexId::parse("1")),
      TreeFunction::g3(VertexId::parse("1")),
      TreeFunction::h_extremal(3, VertexId::parse("0")),
      TreeFunction::eigen(Scalar(Rational(1)), 2),
      TreeFunction::eigen(Scalar(Rational(-2)), 2)};
  for (const auto& f : functions) {
    NormReport r = lip_norm(tree, f);
    REQUIRE_FALSE(r.value.infinite());
    CHECK(brute_sup_derivative(tree, f, 10) == r.value.finite());
  }
}

TEST_CASE("little Lipschitz membership") {
  TreeView tree(homogeneous_spec(2));
  SECTION("finite supports always belong") {
    SeededRng rng(11);
    for (int i = 0; i < 10; ++i) {
      TreeFunction f = random_finite_support(rng, tree, 5, 4);
      CHECK(in_little_lipschitz(tree, f) == LittleLipschitz::yes);
    }
  }
  SECTION("boundary eigenfunctions split by lambda") {
    TreeFunction minus = TreeFunction::eigen(Scalar(Rational(-2)), 2);
    CHECK(in_little_lipschitz(tree, minus) == LittleLipschitz::no);
    tree.for_each_vertex(5, [&](const VertexId& v) {
      if (!v.is_root()) CHECK(minus.derivative_at(tree, v).abs() == Magnitude(Rational(2)));
    });
    CHECK(in_little_lipschitz(tree, TreeFunction::eigen(Scalar(Rational(2)), 2)) ==
          LittleLipschitz::yes);
    CHECK(in_little_lipschitz(tree, TreeFunction::eigen(Scalar(Rational(1)), 2)) ==
          LittleLipschitz::yes);
  }
  SECTION("level function stays out, harmonic level gets in") {
    CHECK(in_little_lipschitz(tree, TreeFunction::level()) == LittleLipschitz::no);
    CHECK(in_little_lipschitz(tree, TreeFunction::harmonic_level()) == LittleLipschitz::yes);
  }
  SECTION("derived views without symbolic structure stay undecided") {
    CHECK(in_little_lipschitz(tree, TreeFunction::derivative_view(TreeFunction::level())) ==
          LittleLipschitz::undecided_at_depth);
  }
}

TEST_CASE("growth lemma bound") {
  SECTION("level function and root indicator") {
    TreeView tree(homogeneous_spec(2));
    CHECK(growth_check(tree, TreeFunction::level(), 8));
    CHECK(growth_check(tree, TreeFunction::indicator(VertexId::root()), 6));
  }
  SECTION("holds on seeded finite supports on a ternary tree") {
    TreeView tree(homogeneous_spec(3));
    SeededRng rng(2026);
    bool all = true;
    for (int i = 0; i < 500; ++i) {
      TreeFunction f = random_finite_support(rng, tree, 6, 5);
      if (!growth_check(tree, f, 8)) all = false;
    }
    CHECK(all);
  }
  SECTION("holds for the closed-form families") {
    TreeView tree(homogeneous_spec(2));
    for (const auto& f :
         {TreeFunction::level(), TreeFunction::harmonic_level(), TreeFunction::g1(),
          TreeFunction::h_extremal(2, VertexId::parse("0")),
          TreeFunction::eigen(Scalar(Rational(1)), 2)}) {
      CHECK(growth_check(tree, f, 10));
    }
  }
}

TEST_CASE("membership in the vanish-on-leaf-ancestors subspace") {
  SECTION("leafless trees accept everything") {
    TreeView tree(homogeneous_spec(2));
    CHECK(m_membership(tree, TreeFunction::level()));
    CHECK(m_membership(tree, TreeFunction::indicator(VertexId::parse("0.1"))));
  }
  SECTION("an indicator of a leaf is rejected") {
    TreeView tree(leafy_spec());
    CHECK_FALSE(m_membership(tree, TreeFunction::indicator(VertexId::parse("0"))));
    CHECK_FALSE(m_membership(tree, TreeFunction::indicator(VertexId::root())));
  }
  SECTION("support away from every leaf chain is accepted") {
    TreeView tree(leafy_spec());
    CHECK(m_membership(tree, TreeFunction::indicator(VertexId::parse("1.0"))));
  }
}
