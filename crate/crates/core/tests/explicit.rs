use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use mesozeta::explicit::{explicit_formula_discrepancy, prime_side, zero_side, PairingFunction};
use mesozeta::specialfn::{omega, von_mangoldt, EvaluationPrecision};
use mesozeta::zeros::{find_zeros, ZeroTable};

fn zeros() -> &'static ZeroTable {
    static TABLE: OnceLock<ZeroTable> = OnceLock::new();
    TABLE.get_or_init(|| find_zeros(0.0, 1000.0, &EvaluationPrecision::default()).unwrap())
}

fn bumps() -> Vec<PairingFunction> {
    ["mollified(-3,3,1)", "bump(0,4)", "bump(1,2.5)", "mollified(-4,1,1.5) + 0.5*bump(2,1.5)", "mollified(-2,3.5,0.75)"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

/// Direct midpoint sums for both sides, sharing nothing with the library
/// beyond g itself and Ω.
fn oracle(g: &PairingFunction, table: &ZeroTable, cutoff: f64) -> (f64, f64) {
    let (lo, hi) = g.support();
    let cells = 40_000;
    let h = (hi - lo) / cells as f64;
    let xs: Vec<(f64, f64)> = (0..cells)
        .map(|i| {
            let x = lo + (i as f64 + 0.5) * h;
            (x, g.value(x) * h)
        })
        .collect();
    let cos_sum = |r: f64| 2.0 * xs.iter().map(|&(x, w)| w * (r * x).cos()).sum::<f64>();
    let zero_sum: f64 = table.ordinates().iter().filter(|&&g| g < cutoff).map(|&g| cos_sum(g)).sum();
    let steps = (cutoff * 20.0) as usize;
    let d = cutoff / steps as f64;
    let arch: f64 = (0..steps)
        .map(|i| {
            let xi = (i as f64 + 0.5) * d;
            cos_sum(xi) * omega(xi) / (2.0 * PI) * d
        })
        .sum();
    let sym = |x: f64| g.value(x) + g.value(-x);
    let r = lo.abs().max(hi.abs());
    let fine = 400_000;
    let dx = 2.0 * r / fine as f64;
    let continuous: f64 = (0..fine)
        .map(|i| {
            let x = -r + (i as f64 + 0.5) * dx;
            sym(x) * (0.5 * x).exp() * dx
        })
        .sum();
    let primes: f64 = (2..=(r.exp() as u64)).map(|n| sym((n as f64).ln()) * von_mangoldt(n) / (n as f64).sqrt()).sum();
    (zero_sum - arch, continuous - primes)
}

#[test]
fn both_sides_match_an_independent_oracle() {
    let g: PairingFunction = "mollified(-3,3,1)".parse().unwrap();
    let table = zeros();
    let (z, p) = oracle(&g, table, 1000.0);
    let zs = zero_side(&g, table, 1000.0).unwrap().value;
    let ps = prime_side(&g).unwrap().value;
    assert!((zs - z).abs() < 1e-5, "{zs} vs {z}");
    assert!((ps - p).abs() < 1e-6, "{ps} vs {p}");
}

#[test]
fn formula_balances_for_five_bumps() {
    let table = zeros();
    for g in bumps() {
        let start = Instant::now();
        let r = explicit_formula_discrepancy(&g, table, 1000.0).unwrap();
        eprintln!(
            "{g}: zero {} prime {} discrepancy {:e} budget {:e} ({:?})",
            r.zero_side,
            r.prime_side,
            r.discrepancy,
            r.error_budget,
            start.elapsed()
        );
        assert!(r.certified);
        assert!(r.discrepancy <= r.error_budget.max(1e-4), "{g}: {}", r.discrepancy);
    }
}

#[test]
fn discrepancy_shrinks_as_the_cutoff_doubles() {
    let table = zeros();
    let g: PairingFunction = "mollified(-3,3,1)".parse().unwrap();
    let d: Vec<(f64, f64)> = [250.0, 500.0, 1000.0]
        .iter()
        .map(|&v| {
            let r = explicit_formula_discrepancy(&g, table, v).unwrap();
            (r.discrepancy, r.error_budget)
        })
        .collect();
    eprintln!("{d:?}");
    for w in d.windows(2) {
        assert!(w[1].0 <= w[0].0 + w[1].1, "{d:?}");
    }
}

#[test]
fn narrow_bump_stabilises() {
    let table = zeros();
    let g = PairingFunction::mollified(-0.5, 0.5, 0.25).unwrap();
    let a = zero_side(&g, table, 500.0).unwrap().value;
    let b = zero_side(&g, table, 1000.0).unwrap().value;
    assert!((a - b).abs() <= 1e-4, "{a} vs {b}");
}

#[test]
fn sides_are_linear() {
    let table = zeros();
    let g1: PairingFunction = "bump(0.5,1)".parse().unwrap();
    let g2: PairingFunction = "mollified(-1,2,0.5)".parse().unwrap();
    let sum = g1.plus(&g2.scaled(-1.5));
    let z = |g: &PairingFunction| zero_side(g, table, 600.0).unwrap().value;
    let p = |g: &PairingFunction| prime_side(g).unwrap().value;
    assert!((z(&sum) - (z(&g1) - 1.5 * z(&g2))).abs() < 1e-9);
    assert!((p(&sum) - (p(&g1) - 1.5 * p(&g2))).abs() < 1e-12);
    assert!((z(&g1.reflected()) - z(&g1)).abs() < 1e-9);
}
