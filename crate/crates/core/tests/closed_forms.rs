use degcov::moments::{
    covariance_exact, dfk_exact, dfk_poisson, expected_index, expected_product, SeriesControl,
};
use degcov::oracle::{oracle_dfk, oracle_expectation, oracle_moments, total_mass, EnumerationBudget};
use degcov::{topo_index, ModelParams, VertexFunction};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn enumeration_reproduces_every_closed_form() {
    for f in VertexFunction::builtins() {
        for n in 2..=6 {
            for p in [0.2, 0.5, 0.8] {
                let params = ModelParams::from_p(n, p).unwrap();
                let budget = EnumerationBudget::new(n, p).unwrap();
                let m = oracle_moments(&budget, &f);
                assert!(rel(m.e_tx, expected_index(&f, &params).unwrap()) < 1e-9);
                assert!(rel(m.e_txt1, expected_product(&f, &params).unwrap()) < 1e-9);
                assert!(rel(m.cov, covariance_exact(&f, &params).unwrap()) < 1e-9);
                for k in 1..n {
                    let o = oracle_dfk(&budget, &f, k).unwrap();
                    let c = dfk_exact(&f, &params, k).unwrap();
                    assert!(rel(o, c) < 1e-9, "{f} n={n} p={p} k={k}: {o} vs {c}");
                }
            }
        }
    }
}

#[test]
fn product_expectation_by_direct_statistic() {
    let f = VertexFunction::randic();
    let budget = EnumerationBudget::new(5, 0.3).unwrap();
    let direct = oracle_expectation(&budget, |g| {
        let t = topo_index(g, &f);
        t.value * t.edge_count as f64
    });
    let params = ModelParams::from_p(5, 0.3).unwrap();
    assert!(rel(direct, expected_product(&f, &params).unwrap()) < 1e-12);
}

#[test]
fn seven_vertices_is_the_largest_budget() {
    let budget = EnumerationBudget::new(7, 0.4).unwrap();
    assert_eq!(budget.graph_count(), 1 << 21);
    assert!((total_mass(&budget) - 1.0).abs() < 1e-12);
    let params = ModelParams::from_p(7, 0.4).unwrap();
    let m = oracle_moments(&budget, &VertexFunction::Identity);
    assert!(rel(m.cov, covariance_exact(&VertexFunction::Identity, &params).unwrap()) < 1e-9);
}

#[test]
fn finite_n_gap_shrinks_like_one_over_n() {
    let ctl = SeriesControl::default();
    for f in VertexFunction::builtins() {
        let limit = dfk_poisson(&f, 2.0, 1, &ctl).unwrap();
        let gaps: Vec<f64> = [100, 1000, 10_000]
            .iter()
            .map(|&n| {
                let params = ModelParams::from_alpha(n, 2.0).unwrap();
                (dfk_exact(&f, &params, 1).unwrap() - limit).abs()
            })
            .collect();
        if f == VertexFunction::one() {
            assert!(gaps.iter().all(|g| *g < 1e-12));
            continue;
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{f}: {gaps:?}");
        // identity: exactly 2 alpha / n
        if f == VertexFunction::Identity {
            for (g, n) in gaps.iter().zip([100.0, 1000.0, 10_000.0]) {
                assert!((g - 4.0 / n).abs() < 1e-12);
            }
        }
    }
}
