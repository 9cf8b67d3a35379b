//! Partial-trace ratio diagnostics, counterexample diagonals and block-size
//! growth classification. Every verdict here is a finite-prefix heuristic;
//! the curves are always returned alongside it.

use serde::{Deserialize, Serialize};

use crate::blockmat::{block_norms, BlockSizes, BlockTridiagonal, NormKind};
use crate::error::{invalid, Error, Result};
use crate::seqcalc::{format_f64, stabilizes, RealSeq};

/// `r_n = (d_1 + ... + d_{s_n}) / k_n` for every level of `sizes`.
pub fn ratio_curve(d: &RealSeq, sizes: &BlockSizes) -> Result<RealSeq> {
    let need = sizes.dim();
    if d.len() < need {
        return invalid(format!("need {need} terms of d, got {}", d.len()));
    }
    let mut acc = 0.0;
    let mut j = 0;
    let mut out = Vec::with_capacity(sizes.levels());
    for n in 1..=sizes.levels() {
        while j < sizes.s(n) {
            acc += d.values()[j];
            j += 1;
        }
        out.push(acc / sizes.k(n) as f64);
    }
    RealSeq::new(out)
}

/// Two-column CSV `n,value`.
pub fn curve_csv(curve: &RealSeq) -> String {
    let mut s = String::from("n,value\n");
    for (i, v) in curve.values().iter().enumerate() {
        s.push_str(&format!("{},{}\n", i + 1, format_f64(*v)));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionVerdict {
    pub curve: RealSeq,
    /// Heuristic: the last-half maximum is within 5% of the overall maximum and
    /// the last-half minimum stays above half of it.
    pub positive_limsup_estimate: bool,
}

/// Ratio curve for arithmetic sizes `k_n = n` over `m` levels.
pub fn anderson_obstruction_check(d: &RealSeq, m: usize) -> Result<ObstructionVerdict> {
    if m < 2 {
        return invalid("need at least 2 levels");
    }
    let curve = ratio_curve(d, &BlockSizes::arithmetic(m))?;
    let v = curve.values();
    let overall = v.iter().copied().fold(0.0, f64::max);
    let tail = &v[m / 2..];
    let tail_max = tail.iter().copied().fold(0.0, f64::max);
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let positive_limsup_estimate = overall > 0.0 && tail_max >= 0.95 * overall && tail_min >= 0.5 * overall;
    Ok(ObstructionVerdict { curve, positive_limsup_estimate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub l: usize,
    /// Level `n_l` with `s_{n_l} / k_{n_l} > l`.
    pub n: usize,
    pub ratio: f64,
    /// `ln(l + 1)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub d: RealSeq,
    pub certified: Vec<Certified>,
}

/// Nonincreasing `d_j = ln(l+1)/l` on `s_{n_{l−1}} < j ≤ s_{n_l}`, where `n_l`
/// is the first level after `n_{l−1}` with `s_n / k_n > l`. Stops once
/// `s_{n_l}` would exceed `budget`.
pub fn counterexample_sequence(sizes: &BlockSizes, budget: usize) -> Result<Counterexample> {
    let mut values: Vec<f64> = Vec::new();
    let mut picks: Vec<(usize, usize)> = Vec::new();
    let mut prev = 0usize;
    let mut l = 1usize;
    let mut n = 1usize;
    while n <= sizes.levels() && sizes.s(n) <= budget {
        if n > prev && sizes.s(n) as f64 / sizes.k(n) as f64 > l as f64 {
            let v = ((l + 1) as f64).ln() / l as f64;
            values.resize(sizes.s(n), v);
            picks.push((l, n));
            prev = n;
            l += 1;
        }
        n += 1;
    }
    if picks.len() < 3 {
        return Err(Error::NotApplicable(format!(
            "only {} index levels found within budget {budget}; block sizes grow too fast",
            picks.len()
        )));
    }
    let d = RealSeq::new_monotone(values)?;
    let curve = ratio_curve(&d, &sizes.prefix(prev))?;
    let certified = picks
        .into_iter()
        .map(|(l, n)| Certified { l, n, ratio: curve.term(n), bound: ((l + 1) as f64).ln() })
        .collect();
    Ok(Counterexample { d, certified })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `k_n / s_n` per level.
    pub ratios: Vec<f64>,
    /// Minimum of `k_n / s_n` over the last half.
    pub liminf_est: f64,
    pub rho: Option<f64>,
    pub omega_exponential: bool,
    /// `s_{n+1} > ρ s_n` re-checked on the last half.
    pub certificate_ok: bool,
}

/// Labels sizes as at least exponential when the tail of `k_n / s_n` neither
/// vanishes nor keeps decaying. The last-quarter minimum must reach 99% of
/// the third-quarter minimum.
pub fn growth_classify(sizes: &BlockSizes) -> Result<GrowthReport> {
    let m = sizes.levels();
    if m < 10 {
        return invalid("need at least 10 levels");
    }
    let ratios: Vec<f64> = (1..=m).map(|n| sizes.k(n) as f64 / sizes.s(n) as f64).collect();
    let min_of = |r: &[f64]| r.iter().copied().fold(f64::INFINITY, f64::min);
    let liminf_est = min_of(&ratios[m / 2..]);
    let third = min_of(&ratios[m / 2..3 * m / 4]);
    let last = min_of(&ratios[3 * m / 4..]);
    let omega_exponential = liminf_est > 0.0 && last >= 0.99 * third;
    let rho = omega_exponential.then(|| 1.0 + liminf_est / 2.0);
    let certificate_ok = match rho {
        Some(r) => (m / 2..m).all(|n| n == 0 || sizes.s(n + 1) as f64 > r * sizes.s(n) as f64),
        None => false,
    };
    Ok(GrowthReport { ratios, liminf_est, rho, omega_exponential, certificate_ok })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagOmega {
    /// `s_n (‖A_n‖ + ‖B_n‖)` per off-diagonal level.
    pub curve: Vec<f64>,
    #[serde(rename = "bounded_M")]
    pub bounded_m: f64,
    /// Heuristic: the curve's running maximum stabilizes.
    pub bounded_estimate: bool,
    /// `a_j ≤ M / j` for the flattened sequence `a` holding `‖A_n‖` `k_n` times.
    pub bound_holds: bool,
}

pub fn diag_omega_check(bt: &BlockTridiagonal, slack: f64) -> Result<DiagOmega> {
    bt.validate()?;
    if !bt.centrals_are_zero() {
        return invalid("central blocks must vanish");
    }
    let norms = block_norms(bt, NormKind::Operator)?;
    let (a, b) = (norms.uppers.values(), norms.lowers.values());
    let nonincreasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    if !nonincreasing(a) || !nonincreasing(b) {
        return Err(Error::Precondition("block norms must be nonincreasing".into()));
    }
    let sizes = &bt.sizes;
    let curve: Vec<f64> = (1..=a.len()).map(|n| sizes.s(n) as f64 * (a[n - 1] + b[n - 1])).collect();
    let bounded_m = curve.iter().copied().fold(0.0, f64::max);
    let mut j = 0usize;
    let mut bound_holds = true;
    for (n, an) in a.iter().enumerate() {
        for _ in 0..sizes.k(n + 1) {
            j += 1;
            if *an > bounded_m / j as f64 * (1.0 + 1e-12) {
                bound_holds = false;
            }
        }
    }
    Ok(DiagOmega { bounded_estimate: stabilizes(&curve, slack), curve, bounded_m, bound_holds })
}
