use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{blocks_from_weights, AmWeights, CommutatorWitness, Provenance};
use crate::blockmat::BlockSizes;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsRule {
    /// `ε_k = (1 − 1/(k+1)) / 2`.
    Default,
    /// `ε_1, ε_2, ...`; needs at least `levels` entries.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DRule {
    Midpoint,
    SeededUniform { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T7Config {
    pub eps: EpsRule,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub growth: f64,
    pub alpha1: f64,
    pub d_rule: DRule,
    pub levels: usize,
}

impl Default for T7Config {
    fn default() -> Self {
        T7Config { eps: EpsRule::Default, l: 0.5, growth: 0.75, alpha1: 1.0, d_rule: DRule::Midpoint, levels: 25 }
    }
}

pub const MAX_REDRAWS: usize = 16;

impl T7Config {
    /// `ε_0, ..., ε_levels` with `ε_0 = 0`.
    pub fn eps_values(&self) -> Result<Vec<f64>> {
        let m = self.levels;
        let mut e = vec![0.0];
        match &self.eps {
            EpsRule::Default => e.extend((1..=m).map(|k| 0.5 * (1.0 - 1.0 / (k as f64 + 1.0)))),
            EpsRule::Explicit(v) => {
                if v.len() < m {
                    return Err(Error::Config(format!("need {m} values of eps, got {}", v.len())));
                }
                e.extend_from_slice(&v[..m]);
            }
        }
        Ok(e)
    }

    pub fn validate(&self) -> Result<Vec<f64>> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.levels < 2 {
            return cfg("levels must be at least 2".into());
        }
        if !(self.l < 1.0) {
            return cfg(format!("L = {} must be < 1", self.l));
        }
        if !(self.growth > self.l && self.growth < 1.0) {
            return cfg(format!("M = {} must satisfy L < M < 1", self.growth));
        }
        if !(self.alpha1 > 0.0) || !self.alpha1.is_finite() {
            return cfg("alpha1 must be positive".into());
        }
        let e = self.eps_values()?;
        if let Some((k, v)) = e.iter().enumerate().skip(1).find(|(_, v)| !(**v > 0.0 && **v <= self.l)) {
            return cfg(format!("eps_{k} = {v} is outside (0, L]"));
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T7Output {
    pub witness: CommutatorWitness,
    pub eps: Vec<f64>,
    pub alpha: Vec<f64>,
    pub d: Vec<f64>,
    /// `d_kn[n-1][k-1] = d_{k,n}`.
    pub d_kn: Vec<Vec<f64>>,
    pub all_positive: bool,
    pub distinct_entries: bool,
    pub eps_distinct: bool,
    pub redraws: usize,
    /// `d_n(1+ε_{k−1}/n)/(1+ε_k/(n+2)) < d_{n+1} ≤ α_{n+1}` for all `k ≤ n+1`.
    pub interval_ok: bool,
    /// Max of `|a_{k,n}x_{k,n+1} − x_{k,n}a_{k+1,n+1}|` and `|b_{k,n+1}y_{k,n} − y_{k+1,n+1}b_{k,n}|`.
    pub offdiag_identity_max: f64,
}

fn lower_bound(d_n: f64, n: usize, eps: &[f64]) -> f64 {
    let nf = n as f64;
    (1..=n + 1)
        .map(|k| d_n * (1.0 + eps[k - 1] / nf) / (1.0 + eps[k] / (nf + 2.0)))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn level_entries(d: &[f64], eps: &[f64], n1: usize) -> Vec<f64> {
    if n1 == 1 {
        return vec![d[0] * (1.0 + eps[1] / 2.0)];
    }
    let n = n1 - 1;
    let (nf, dn, dn1) = (n as f64, d[n - 1], d[n]);
    (1..=n1)
        .map(|k| (dn1 - dn) / (nf + 1.0) + eps[k] * dn1 / ((nf + 1.0) * (nf + 2.0)) - eps[k - 1] * dn / (nf * (nf + 1.0)))
        .collect()
}

fn collides(sorted: &[f64], v: f64, tol: f64) -> bool {
    let i = sorted.partition_point(|x| *x < v);
    (i < sorted.len() && (sorted[i] - v).abs() <= tol) || (i > 0 && (v - sorted[i - 1]).abs() <= tol)
}

fn insert_level(sorted: &mut Vec<f64>, level: &[f64], tol: f64) -> bool {
    let mut local = level.to_vec();
    local.sort_by(f64::total_cmp);
    if local.windows(2).any(|w| w[1] - w[0] <= tol) || local.iter().any(|v| collides(sorted, *v, tol)) {
        return false;
    }
    sorted.extend(local);
    sorted.sort_by(f64::total_cmp);
    true
}

pub fn t7_weights(d: &[f64], eps: &[f64], levels: usize) -> AmWeights {
    let mut w = AmWeights { a: vec![], x: vec![], b: vec![], y: vec![] };
    for n in 1..levels {
        let (nf, s) = (n as f64, d[n - 1].sqrt());
        w.a.push((1..=n).map(|k| s * ((n + 1 - k) as f64).sqrt() / nf).collect());
        w.x.push((1..=n).map(|k| s * (k as f64 + eps[k]).sqrt() / nf).collect());
        w.b.push((1..=n).map(|k| s * (k as f64 + eps[k]).sqrt() / (nf + 1.0)).collect());
        w.y.push((1..=n).map(|k| s * ((n + 1 - k) as f64).sqrt() / (nf + 1.0)).collect());
    }
    w
}

fn offdiag_identity_max(w: &AmWeights) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 1..w.levels() {
        for k in 0..n {
            let up = w.a[n - 1][k] * w.x[n][k] - w.x[n - 1][k] * w.a[n][k + 1];
            let lo = w.b[n][k] * w.y[n - 1][k] - w.y[n][k + 1] * w.b[n - 1][k];
            worst = worst.max(up.abs()).max(lo.abs());
        }
    }
    worst
}

/// Strictly positive diagonal commutator: draws `d_n` inside the admissible
/// interval, then sets the weights and the diagonal entries `d_{k,n}`.
pub fn t7_generate(cfg: &T7Config) -> Result<T7Output> {
    let eps = cfg.validate()?;
    let m = cfg.levels;
    let tol = 1e-12;
    let mut rng = match cfg.d_rule {
        DRule::SeededUniform { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        DRule::Midpoint => None,
    };
    let mut alpha = vec![cfg.alpha1];
    for n in 1..m {
        alpha.push((1.0 + cfg.growth / n as f64) * alpha[n - 1]);
    }
    let mut sorted_eps = eps[1..].to_vec();
    sorted_eps.sort_by(f64::total_cmp);
    let eps_distinct = sorted_eps.windows(2).all(|w| w[1] - w[0] > tol);
    let enforce = rng.is_some() && eps_distinct;

    let mut d: Vec<f64> = Vec::with_capacity(m);
    let mut d_kn: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut seen: Vec<f64> = Vec::new();
    let mut redraws = 0;
    for n1 in 1..=m {
        let (lo, hi) = if n1 == 1 { (0.0, alpha[0]) } else { (lower_bound(d[n1 - 2], n1 - 1, &eps), alpha[n1 - 1]) };
        if !(lo < hi) {
            return Err(Error::Config(format!("empty interval for d_{n1}: ({lo}, {hi}]")));
        }
        let mut attempt = 0;
        loop {
            let v = match rng.as_mut() {
                Some(r) => lo + (hi - lo) * (1.0 - r.gen::<f64>()),
                None => 0.5 * (lo + hi),
            };
            d.push(v);
            let level = level_entries(&d, &eps, n1);
            if !enforce || insert_level(&mut seen, &level, tol) {
                d_kn.push(level);
                break;
            }
            d.pop();
            attempt += 1;
            redraws += 1;
            if attempt > MAX_REDRAWS {
                return Err(Error::Config(format!("d_{n1}: no distinct draw after {MAX_REDRAWS} redraws")));
            }
        }
    }

    let all_positive = d_kn.iter().flatten().all(|v| *v > 0.0);
    let mut flat: Vec<f64> = d_kn.iter().flatten().copied().collect();
    flat.sort_by(f64::total_cmp);
    let distinct_entries = flat.windows(2).all(|w| w[1] - w[0] > tol);
    let interval_ok = (1..m).all(|n| lower_bound(d[n - 1], n, &eps) < d[n] && d[n] <= alpha[n]);

    let sizes = BlockSizes::arithmetic(m);
    let weights = t7_weights(&d, &eps, m);
    let offdiag = offdiag_identity_max(&weights);
    let (c, z) = blocks_from_weights(&weights, &sizes)?;
    let config = serde_json::to_value(cfg)?;
    let seed = match cfg.d_rule {
        DRule::SeededUniform { seed } => Some(seed),
        DRule::Midpoint => None,
    };
    let witness = CommutatorWitness {
        provenance: Provenance { generator: "t7".into(), config, seed },
        sizes,
        c,
        z,
        d_blocks: d_kn.clone(),
    };
    Ok(T7Output {
        witness,
        eps,
        alpha,
        d,
        d_kn,
        all_positive,
        distinct_entries,
        eps_distinct,
        redraws,
        interval_ok,
        offdiag_identity_max: offdiag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_is_positive() {
        let out = t7_generate(&T7Config::default()).unwrap();
        assert_eq!(out.d_kn.iter().map(Vec::len).sum::<usize>(), 325);
        assert!(out.all_positive);
        assert!(out.interval_ok);
        assert!(out.witness.residuals().unwrap().max_residual < 1e-12);
    }

    #[test]
    fn first_target_formula() {
        let out = t7_generate(&T7Config::default()).unwrap();
        let expect = out.d[0] * (1.0 + out.eps[1] / 2.0);
        assert!((out.d_kn[0][0] - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_constants() {
        let bad_l = T7Config { l: 1.2, ..T7Config::default() };
        assert!(matches!(t7_generate(&bad_l), Err(Error::Config(_))));
        let bad_m = T7Config { growth: 0.4, ..T7Config::default() };
        assert!(matches!(t7_generate(&bad_m), Err(Error::Config(_))));
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = T7Config { d_rule: DRule::SeededUniform { seed: 7 }, ..T7Config::default() };
        let a = t7_generate(&cfg).unwrap();
        let b = t7_generate(&cfg).unwrap();
        assert_eq!(a.d, b.d);
        assert!(a.distinct_entries);
    }
}
