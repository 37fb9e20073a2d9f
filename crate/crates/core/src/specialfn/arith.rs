//! Prime-power arithmetic: Λ(n) and ψ(x).

/// Λ(n): log p when n = p^k, otherwise 0.
pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let p = smallest_prime_factor(n);
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// Λ(0..=limit) from a sieve; entry 0 and 1 are zero.
pub fn von_mangoldt_table(limit: usize) -> Vec<f64> {
    let mut table = vec![0.0; limit + 1];
    let mut composite = vec![false; limit + 1];
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        let mut q = p * p;
        while q <= limit {
            composite[q] = true;
            q += p;
        }
        let lp = (p as f64).ln();
        let mut pk = p;
        loop {
            table[pk] = lp;
            match pk.checked_mul(p) {
                Some(next) if next <= limit => pk = next,
                _ => break,
            }
        }
    }
    table
}

/// ψ(x) = Σ_{n ≤ x} Λ(n), summed in increasing n.
pub fn chebyshev_psi(x: f64) -> f64 {
    if !(x >= 2.0) {
        return 0.0;
    }
    let limit = x.floor() as usize;
    von_mangoldt_table(limit).iter().sum()
}
