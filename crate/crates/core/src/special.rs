//! Associated Laguerre polynomials and the factorial ratio used by the
//! Laguerre-Gaussian normalisation.

/// Associated Laguerre polynomial `L_p^α(x)`.
///
/// Degrees 0 and 1 use the closed forms `1` and `α + 1 - x`; higher degrees
/// run the upward three-term recurrence
/// `(k+1) L_{k+1} = (2k + 1 + α - x) L_k - (k + α) L_{k-1}`,
/// which is stable in the forward direction for `x ≥ 0`.
///
/// Negative degree or order is not representable; the unsigned argument
/// types carry that domain restriction.
pub fn assoc_laguerre(p: u32, alpha: u32, x: f64) -> f64 {
    let a = f64::from(alpha);
    match p {
        0 => 1.0,
        1 => a + 1.0 - x,
        _ => {
            let mut prev = 1.0;
            let mut cur = a + 1.0 - x;
            for k in 1..p {
                let kf = f64::from(k);
                let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `d/dx L_p^α(x) = -L_{p-1}^{α+1}(x)`, zero for `p = 0`.
pub fn assoc_laguerre_derivative(p: u32, alpha: u32, x: f64) -> f64 {
    if p == 0 {
        0.0
    } else {
        -assoc_laguerre(p - 1, alpha + 1, x)
    }
}

/// `ln( p! / (p+m)! ) = -Σ_{k=p+1}^{p+m} ln k`.
pub fn ln_factorial_ratio(p: u32, m: u32) -> f64 {
    (p + 1..=p + m).map(|k| -f64::from(k).ln()).sum()
}

/// `C_{m,p} = sqrt(p! / (p+m)!)`. Evaluated as a direct product up to
/// `m = 20` and in log space beyond.
pub fn lg_norm_coefficient(m: u32, p: u32) -> f64 {
    if m <= 20 {
        let denom: f64 = (p + 1..=p + m).map(f64::from).product();
        (1.0 / denom).sqrt()
    } else {
        (0.5 * ln_factorial_ratio(p, m)).exp()
    }
}
