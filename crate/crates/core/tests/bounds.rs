//! Closed forms against dense numeric scans.

use std::f64::consts::PI;

use partial_search::bounds::*;
use partial_search::SearchSpace;

fn space(n: u32, m: u32) -> SearchSpace {
    SearchSpace::new(n, m).unwrap()
}

fn k_at(alpha: f64, s: &SearchSpace) -> u64 {
    (alpha * (s.database_size() as f64).sqrt()).round() as u64 + 1
}

#[test]
fn gap_to_first_order_bound_scales_like_gamma_squared() {
    let mut points = Vec::new();
    for n in [16, 20, 24, 28] {
        let s = space(n, n / 2);
        let k = k_at(PI / 8.0, &s);
        let numeric = grk_best_split(&s, k).unwrap().pr;
        let gap = (numeric - pr_max_bound(&s, k).unwrap()).abs();
        points.push((s.angles::<f64>().gamma.ln(), gap.ln()));
    }
    let mean = |f: fn(&(f64, f64)) -> f64| points.iter().map(f).sum::<f64>() / points.len() as f64;
    let (mx, my) = (mean(|p| p.0), mean(|p| p.1));
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() <= 0.3, "slope {slope}");
}

#[test]
fn first_order_advantage_over_full_search() {
    let s = space(28, 14);
    let c = BoundConstants::get();
    let gamma = s.angles::<f64>().gamma;
    for alpha in [PI / 12.0, PI / 8.0] {
        let k = k_at(alpha, &s);
        let a = (k - 1) as f64 / (s.database_size() as f64).sqrt();
        let numeric = grk_best_split(&s, k).unwrap().pr;
        let advantage = numeric - (2.0 * a).sin().powi(2);
        let predicted = c.epsilon * gamma * (4.0 * a).sin();
        assert!((advantage - predicted).abs() <= 0.25 * predicted.abs());
    }
}

#[test]
fn large_block_optimum_uses_a_sixth_of_the_block_rotation() {
    let s = space(30, 20);
    let expected = (PI * 1024.0 / 6.0).round() as u64;
    for k in [4000, 8000, 12868, 20000] {
        assert_eq!(grk_best_split(&s, k).unwrap().k2, expected);
    }
}

#[test]
fn probability_sweep_tracks_the_bound() {
    let s = space(30, 10);
    let gamma = s.angles::<f64>().gamma;
    let eps = BoundConstants::get().epsilon;
    let rows = figure3_sweep(&s, 2000..=2010).unwrap();
    for row in rows {
        assert!(row.numeric >= row.numeric_at_analytic_k2);
        // the first-order term is resolved to a tenth of its size
        assert!((row.numeric - row.bound).abs() <= 0.1 * eps * gamma);
    }
}

#[test]
fn expectation_sweep_branches() {
    for n in [12, 16] {
        let rows = figure4_sweep(n).unwrap();
        for row in &rows {
            let s = space(n, row.m);
            if row.m <= n / 2 {
                assert!(row.numeric.e_min <= grk_unit_reference(&s));
                assert!(row.numeric.k_tot > 1);
            } else {
                assert_eq!(row.numeric.k_tot, 1);
            }
        }
        let last = rows.last().unwrap();
        assert!((last.numeric.e_min - last.bound.few_blocks).abs() <= 0.05 * last.bound.few_blocks);
    }
}

#[test]
fn crossover_offset_predicts_the_switch() {
    let c = BoundConstants::get();
    for n in [16u32, 20] {
        let rows = figure4_sweep(n).unwrap();
        let switch = rows.iter().find(|r| r.numeric.k_tot == 1).unwrap().m as f64;
        let predicted = n as f64 / 2.0 + c.crossover_offset;
        assert!(switch - 1.0 <= predicted && predicted <= switch);
    }
}

#[test]
fn grover_scan_agrees_up_to_large_databases() {
    for n in [10, 20, 30] {
        let cont = grover_kmin(n).unwrap();
        let (k, e) = grover_integer_minimum(n).unwrap();
        assert!((cont.k_min - k as f64).abs() <= 1.0);
        assert!(e >= cont.e_min - 1e-9);
    }
}
