// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "finslab/finslab.hpp"
#include "oracles.hpp"

using namespace finslab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

MetricField sphere(int n, const KillingField* W = nullptr) {
  const Chart c = Chart::centered_at(Vector::Unit(n + 1, n));
  return W ? randers_sphere(c, *W) : round_metric(c);
}

KillingField fkm_wind(const CliffordSystem& sys) {
  return killing_from_json(Json{{"clifford_combo", true}, {"norm", 0.5}, {"seed", 3}}, sys.dim(), &sys);
}

// 1. constant flag curvature
void flag_curvature_constancy(Outcome& o) {
  double worst = 0.0;
  for (int n : {2, 3})
    for (double lam : {0.2, 0.5, 0.8}) {
      std::vector<KillingField> winds{standard_wind(n, lam)};
      if (n == 3) winds.push_back(block_killing(0, {lam / 2, lam}, {1, 1}));
      for (const KillingField& W : winds) {
        const auto r = check_flag_curvature(sphere(n, &W), 200, 17, 1e-4);
        worst = std::max(worst, r.max_deviation);
        o.require(r.pass, "n=" + std::to_string(n) + " lambda=" + std::to_string(lam));
      }
    }
  double round_worst = 0.0;
  for (int n : {2, 3}) {
    const auto r = check_flag_curvature(sphere(n), 200, 18, 1e-5);
    round_worst = std::max(round_worst, r.max_deviation);
    o.require(r.pass, "round control n=" + std::to_string(n));
  }
  o.note << "max |K-1| randers " << worst << ", round " << round_worst;
}

// 2. navigation identities
void navigation_identities(Outcome& o) {
  Rng rng(21);
  double trip = 0.0, lemma = 0.0, special = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + i % 3;
    Matrix A(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) A(r, c) = 0.3 * rng.normal();
    const Matrix h = A * A.transpose() + Matrix::Identity(n, n);
    NormEvaluator F = NormEvaluator::quadratic(h);
    if (i % 2 == 1) {
      Vector b = rng.normal_vector(n);
      b *= rng.uniform(0.0, 0.7) / std::sqrt(b.dot(h.ldlt().solve(b)));
      F = NormEvaluator::randers(h, b);
    }
    Vector v = rng.normal_vector(n);
    v *= rng.uniform(0.05, 0.8) / std::max(F(v), F(Vector(-v)));
    const NavigationDatum d(F, v);
    const NormEvaluator Ft = navigated_norm(d);

    const Vector y = rng.normal_vector(n);
    const double Fy = F(y);
    trip = std::max(trip, std::abs(Ft(Vector(y + Fy * v)) - Fy) / Fy);

    const auto s = navigation_lemma_sample(d, Ft, rng.normal_vector(n), rng.normal_vector(n));
    lemma = std::max({lemma, s.identity_deviation, s.corollary_deviation});

    // <v, y>_y = 0: for a quadratic base g_y = h, so project v out of y in h
    const Vector y0 = rng.normal_vector(n);
    const NavigationDatum dq(NormEvaluator::quadratic(h), v / std::max(1.0, NormEvaluator::quadratic(h)(v) / 0.8));
    const Vector yp = y0 - (y0.dot(h * dq.wind) / dq.wind.dot(h * dq.wind)) * dq.wind;
    const auto sq = navigation_lemma_sample(dq, navigated_norm(dq), yp, rng.normal_vector(n));
    special = std::max(special, std::abs(sq.lhs_uu - sq.rhs_uu));
  }
  o.require(trip < 1e-10, "round trip");
  o.require(lemma < 1e-8, "lemma residual");
  o.require(special < 1e-10, "orthogonal case");
  o.note << "round trip " << trip << ", lemma " << lemma << ", orthogonal case " << special << " (1000 samples)";
}

// 3. Clifford audit grid
int expected_centralizer(int m, int k1, int k2) {
  auto so = [](int k) { return k * (k - 1) / 2; };
  auto sp = [](int k) { return k * (2 * k + 1); };
  switch (m % 8) {
    case 1: case 7: return so(k1);
    case 2: case 6: return k1 * k1;
    case 3: case 5: return sp(k1);
    case 0: return so(k1) + so(k2);
    default: return sp(k1) + sp(k2);
  }
}

void clifford_grid(Outcome& o) {
  int systems = 0;
  double closure = 0.0;
  auto audit = [&](const CliffordSystem& s) {
    const auto r = check_clifford_audit(s, 1e-10);
    const auto a = audit_clifford(s);
    ++systems;
    closure = std::max(closure, a.closure_residual);
    const int k1 = s.is_split() ? s.k1 : s.k, k2 = s.is_split() ? s.k2 : 0;
    const std::string tag = "m=" + std::to_string(s.m) + " k=" + std::to_string(k1) + "," + std::to_string(k2);
    o.require(r.pass, tag);
    o.require(a.anticommutation == 0.0, tag + " anticommutation");
    o.require(a.centralizer_dim == expected_centralizer(s.m, k1, k2), tag + " centralizer");
    o.require(a.spin_dim == s.m * (s.m + 1) / 2, tag + " spin lift");
  };
  for (int m = 1; m <= 9; ++m) {
    const int d = clifford_delta(m);
    for (int k = 1; 2 * k * d <= 64; ++k) audit(build_clifford(m, k));
    if (m % 4 == 0)
      for (int k1 = 1; 2 * (k1 + 1) * d <= 64; ++k1)
        for (int k2 = 1; k2 <= k1 && 2 * (k1 + k2) * d <= 64; ++k2) audit(build_clifford(m, k1, k2));
  }
  o.note << systems << " systems, max closure residual " << closure;
}

// 4. OT-FKM isoparametricity
void otfkm_isoparametric(Outcome& o) {
  const std::vector<double> levels{-0.8, -0.3, 0.0, 0.3, 0.8};
  double grad_spread = 0.0, lap_spread = 0.0;
  for (int k : {3, 4}) {
    const CliffordSystem sys = build_clifford(1, k);
    const SphereFunction f = SphereFunction::otfkm(sys);
    const int n = sys.dim() - 1;
    const KillingField W = fkm_wind(sys);
    const MetricField round = sphere(n), randers = sphere(n, &W);
    const std::string tag = "S^" + std::to_string(n);
    for (const MetricField* m : {&round, &randers}) {
      const bool fin = m == &randers;
      for (const SphereFunction& g : fin ? std::vector<SphereFunction>{f, f.negated()} : std::vector<SphereFunction>{f}) {
        const auto t = check_transnormal(*m, g, levels, 50, 41, 1e-6);
        grad_spread = std::max(grad_spread, t.max_deviation);
        o.require(t.pass, tag + (fin ? " randers" : " round") + " transnormal" + (g.sign() < 0 ? " -f" : ""));
      }
      const auto l = check_isoparametric(*m, f, levels, 50, 42, 1e-3, fin);
      lap_spread = std::max(lap_spread, l.max_deviation);
      o.require(l.pass, tag + (fin ? " randers" : " round") + " laplacian");
    }
  }
  o.note << "max F(grad f) spread " << grad_spread << ", max laplacian spread " << lap_spread;
}

// 5. tangency of spin lift and centralizer
void tangency_eligibility(Outcome& o) {
  double worst = 0.0, control = 1e300;
  int fields = 0;
  for (const CliffordSystem& sys : {build_clifford(1, 3), build_clifford(1, 4), build_clifford(2, 2),
                                    build_clifford(3, 2), build_clifford(4, 1, 1)}) {
    const SphereFunction f = SphereFunction::otfkm(sys);
    for (const SkewBasis& B : {spin_lift(sys), centralizer(sys)})
      for (const Matrix& X : B.elements) {
        const KillingField W(X * (0.5 / killing_norm(X)));
        const auto r = check_tangency(f, W, 500, 51 + fields, 1e-8);
        worst = std::max(worst, r.max_deviation);
        ++fields;
        o.require(r.pass, "m=" + std::to_string(sys.m) + " element " + std::to_string(fields));
      }
    Rng rng(52 + static_cast<std::uint64_t>(sys.l));
    const Matrix R = rng.skew_matrix(sys.dim());
    const auto c = check_tangency(f, KillingField(R * (0.5 / killing_norm(R))), 500, 53, 1e-8);
    control = std::min(control, c.max_deviation);
    o.require(c.max_deviation > 1e-2, "random skew control m=" + std::to_string(sys.m));
  }
  o.note << fields << " generators, max residual " << worst << "; random-W control min " << control;
}

// 6. principal curvature counts
void principal_curvatures(Outcome& o) {
  const CliffordSystem s5 = build_clifford(1, 3);
  const SphereFunction f5 = SphereFunction::otfkm(s5);
  for (double c : {-0.5, 0.3}) {
    const auto s = principal_curvature_spectrum(sphere(5), f5, c, 20, 61);
    o.require(s.g == 4 && s.stable, "round S^5 level " + std::to_string(c));
  }
  std::ostringstream seen;
  auto homogeneous = [&](const std::string& tag, const MetricField& m, const SphereFunction& f, double c) {
    const auto s = principal_curvature_spectrum(m, f, c, 10, 62);
    o.require((s.g == 1 || s.g == 2 || s.g == 4) && s.stable, tag);
    seen << ' ' << tag << ":g=" << s.g;
  };
  for (int n : {2, 4, 6}) {
    const KillingField W = standard_wind(n, 0.6);
    homogeneous("height S^" + std::to_string(n), sphere(n, &W), SphereFunction::height(Vector::Unit(n + 1, 0)), 0.4);
  }
  const KillingField W3 = block_killing(0, {0.3, 0.6}, {1, 1});
  homogeneous("two-block S^3", sphere(3, &W3), SphereFunction::two_block(2, 2), 0.2);
  const KillingField W4 = block_killing(3, {0.5}, {1});
  homogeneous("two-block S^4", sphere(4, &W4), SphereFunction::two_block(3, 2), 0.2);
  for (int k : {3, 4}) {
    const CliffordSystem sys = build_clifford(1, k);
    const int n = sys.dim() - 1;
    const KillingField W = standard_wind(n, 0.5);
    homogeneous("otfkm S^" + std::to_string(n), sphere(n, &W), SphereFunction::otfkm(sys), 0.3);
  }
  o.note << "round S^5: g=4 stable;" << seen.str();
}

// 7. geodesic field
void geodesic_field(Outcome& o) {
  const CliffordSystem sys = build_clifford(1, 3);
  const KillingField W = fkm_wind(sys);
  const auto r = check_geodesic_field(sphere(5, &W), SphereFunction::otfkm(sys), {-0.3, 0.3}, 4, 1.0, 400, 71, 1e-5);
  o.require(r.pass, "ODE residual");
  o.note << "max residual " << r.max_deviation << " over " << r.n_samples << " probes ("
         << r.details["skipped_near_focal"].get<std::size_t>() << " skipped near focal sets)";
}

// 8. killing norm against brute force
void killing_norm_agreement(Outcome& o) {
  Rng rng(81);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int N = 2 + t % 7;
    const Matrix A = rng.skew_matrix(N);
    const double gap = std::abs(killing_norm(A) - oracle::max_stretch(A, 100000, 82 + t));
    worst = std::max(worst, gap);
  }
  o.require(worst < 1e-3, "agreement");
  o.note << "20 matrices, dims 2..8, max gap " << worst;
}

// 9. negative controls
void negative_controls(Outcome& o) {
  const CliffordSystem sys = build_clifford(1, 3);
  const SphereFunction f = SphereFunction::otfkm(sys);
  Rng rng(91);
  const Matrix R = rng.skew_matrix(6);
  const KillingField bad(R * (0.5 / killing_norm(R)));
  const auto t = check_transnormal(sphere(5, &bad), f, {0.3}, 30, 92, 1e-6);
  o.require(!t.pass && t.max_deviation > 1e-6, "non-tangent W passed transnormality");

  int rejected = 0;
  for (int i = 0; i < 20; ++i) {
    try {
      find_clifford_point(sys, rng.unit_vector(6));
    } catch (const NotOnFocalSet&) {
      ++rejected;
    }
  }
  o.require(rejected == 20, "find_clifford_point accepted an off-focal point");

  int raised = 0;
  for (double lam : {1.0, 1.3}) {
    try {
      const KillingField W = standard_wind(3, 0.5).scaled(lam / 0.5);
      randers_sphere(Chart::centered_at(Vector::Unit(4, 3)), W);
    } catch (const WindTooStrong&) {
      ++raised;
    }
    try {
      NavigationDatum(NormEvaluator::euclidean(2), Vector::Unit(2, 0) * lam);
    } catch (const WindTooStrong&) {
      ++raised;
    }
  }
  o.require(raised == 4, "WindTooStrong not raised");
  o.note << "transnormal spread " << t.max_deviation << " vs tol 1e-6; " << rejected << "/20 off-focal points rejected; "
         << raised << "/4 strong winds rejected";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"flag-curvature constancy", flag_curvature_constancy},
      {"navigation identities", navigation_identities},
      {"clifford audit grid", clifford_grid},
      {"OT-FKM isoparametricity", otfkm_isoparametric},
      {"tangency eligibility", tangency_eligibility},
      {"principal curvature counts", principal_curvatures},
      {"geodesic field", geodesic_field},
      {"killing_norm agreement", killing_norm_agreement},
      {"negative controls", negative_controls},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("AC%zu %s  %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.note.str().c_str(),
                secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
