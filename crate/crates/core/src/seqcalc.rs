//! Calculus on finite prefixes of nonnegative sequences.
//!
//! Everything here is 1-based in the mathematical sense and 0-based in
//! storage: `values[0]` is the first term.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSeq {
    values: Vec<f64>,
    monotone: bool,
}

impl RealSeq {
    pub fn new(values: Vec<f64>) -> Result<RealSeq> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return invalid(format!("term {} is {v}, expected a finite nonnegative value", i + 1));
        }
        Ok(RealSeq { values, monotone: false })
    }

    /// Constructs a sequence and sets the monotone flag, checking the order.
    pub fn new_monotone(values: Vec<f64>) -> Result<RealSeq> {
        let mut s = RealSeq::new(values)?;
        if !is_nonincreasing(&s.values) {
            return invalid("values are not nonincreasing");
        }
        s.monotone = true;
        Ok(s)
    }

    /// Terms `f(1), ..., f(len)`.
    pub fn from_fn(len: usize, f: impl Fn(usize) -> f64) -> Result<RealSeq> {
        RealSeq::new((1..=len).map(f).collect())
    }

    pub fn empty() -> RealSeq {
        RealSeq { values: Vec::new(), monotone: true }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Term `n` in 1-based indexing.
    pub fn term(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn prefix(&self, len: usize) -> RealSeq {
        RealSeq {
            values: self.values[..len.min(self.len())].to_vec(),
            monotone: self.monotone,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["value"])?;
        for v in &self.values {
            w.write_record([format_f64(*v)])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?)
            .expect("csv output is utf-8"))
    }

    /// Reads a single-column CSV. A `value` header is optional.
    /// One value per row. With several columns the `value` column, or the last one, is read.
    /// A first row that does not parse is taken as a header.
    pub fn from_csv(text: &str) -> Result<RealSeq> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut values = Vec::new();
        let mut column: Option<usize> = None;
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.iter().all(|c| c.is_empty()) {
                continue;
            }
            if i == 0 && rec.iter().any(|c| c.parse::<f64>().is_err()) {
                column = rec.iter().position(|c| c.eq_ignore_ascii_case("value")).or(Some(rec.len() - 1));
                continue;
            }
            let col = column.unwrap_or(rec.len() - 1);
            let cell = rec.get(col).unwrap_or("");
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: not a number: {cell:?}", i + 1)))?;
            values.push(v);
        }
        RealSeq::new(values)
    }
}

pub(crate) fn format_f64(v: f64) -> String {
    format!("{v:e}")
}

fn is_nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

/// Nonincreasing rearrangement. Zeros are kept so lengths never change.
pub fn monotonize(s: &RealSeq) -> RealSeq {
    let mut values = s.values.clone();
    values.sort_by(|a, b| b.total_cmp(a));
    RealSeq { values, monotone: true }
}

/// `D_k`: every term repeated `k` times.
pub fn ampliate(s: &RealSeq, k: usize) -> Result<RealSeq> {
    if k == 0 {
        return invalid("ampliation factor must be at least 1");
    }
    let values = s
        .values
        .iter()
        .flat_map(|v| std::iter::repeat_n(*v, k))
        .collect();
    Ok(RealSeq { values, monotone: s.monotone })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pointwise {
    Product,
    Sum,
    Min,
    Max,
    Sqrt,
    Scale(f64),
}

impl Pointwise {
    pub fn is_binary(self) -> bool {
        matches!(self, Pointwise::Product | Pointwise::Sum | Pointwise::Min | Pointwise::Max)
    }
}

pub fn pointwise(op: Pointwise, s: &RealSeq, t: Option<&RealSeq>) -> Result<RealSeq> {
    if op.is_binary() {
        let t = match t {
            Some(t) => t,
            None => return invalid(format!("{op:?} needs two sequences")),
        };
        if s.len() != t.len() {
            return invalid(format!("length mismatch: {} vs {}", s.len(), t.len()));
        }
        let f: fn(f64, f64) -> f64 = match op {
            Pointwise::Product => |a, b| a * b,
            Pointwise::Sum => |a, b| a + b,
            Pointwise::Min => f64::min,
            Pointwise::Max => f64::max,
            _ => unreachable!(),
        };
        let values = s.values.iter().zip(&t.values).map(|(a, b)| f(*a, *b)).collect();
        return RealSeq::new(values);
    }
    match op {
        Pointwise::Sqrt => RealSeq::new(s.values.iter().map(|v| v.sqrt()).collect()),
        Pointwise::Scale(c) => {
            if !(c.is_finite() && c >= 0.0) {
                return invalid("scale factor must be finite and nonnegative");
            }
            let mut out = RealSeq::new(s.values.iter().map(|v| c * v).collect())?;
            out.monotone = s.monotone;
            Ok(out)
        }
        _ => unreachable!(),
    }
}

/// Internal direct sum: interleave then monotonize. The shorter input is padded with zeros.
pub fn direct_sum(s: &RealSeq, t: &RealSeq) -> RealSeq {
    let n = s.len().max(t.len());
    let mut values = Vec::with_capacity(2 * n);
    for i in 0..n {
        values.push(s.values.get(i).copied().unwrap_or(0.0));
        values.push(t.values.get(i).copied().unwrap_or(0.0));
    }
    monotonize(&RealSeq { values, monotone: false })
}

pub fn partial_sums(s: &RealSeq) -> RealSeq {
    let mut acc = 0.0;
    let values = s
        .values
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    RealSeq { values, monotone: false }
}

/// True when the running maximum over the last half of `curve` exceeds the
/// first-half maximum by less than the relative `slack`.
pub fn stabilizes(curve: &[f64], slack: f64) -> bool {
    if curve.iter().any(|v| !v.is_finite()) {
        return false;
    }
    if curve.len() < 2 {
        return true;
    }
    let half = curve.len() / 2;
    let first = curve[..half].iter().copied().fold(0.0, f64::max);
    let last = curve[half..].iter().copied().fold(0.0, f64::max);
    if first == 0.0 {
        return last == 0.0;
    }
    last < first * (1.0 + slack)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domination {
    pub found: bool,
    pub k: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    /// Ratio curve `s_n / D_k(t)_n` for the reported `k`, or for `k_max` when nothing was found.
    pub curve: Vec<f64>,
}

/// Finite-prefix proxy for `s_n <= M * D_k(t)_n`. A heuristic, not a proof of ideal membership.
pub fn dominated_by(s: &RealSeq, t: &RealSeq, k_max: usize, slack: f64) -> Result<Domination> {
    if !s.monotone || !t.monotone {
        return invalid("dominated_by needs monotone inputs");
    }
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let mut last_curve = Vec::new();
    for k in 1..=k_max {
        let len = s.len().min(k * t.len());
        let curve: Vec<f64> = (0..len)
            .map(|i| {
                let num = s.values[i];
                let den = t.values[i / k];
                if num == 0.0 {
                    0.0
                } else if den == 0.0 {
                    f64::INFINITY
                } else {
                    num / den
                }
            })
            .collect();
        if stabilizes(&curve, slack) {
            let m = curve.iter().copied().fold(0.0, f64::max);
            return Ok(Domination { found: true, k: Some(k), m: Some(m), curve });
        }
        last_curve = curve;
    }
    Ok(Domination { found: false, k: None, m: None, curve: last_curve })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfwwReport {
    pub ratio_curve: Vec<f64>,
    pub bounded_estimate: bool,
}

/// Cesàro test `(|λ_1| + ... + |λ_n|) / (n μ_n)`.
pub fn dfww_test(lambda_abs: &RealSeq, mu: &RealSeq, slack: f64) -> Result<DfwwReport> {
    if !mu.monotone && !is_nonincreasing(&mu.values) {
        return invalid("mu must be nonincreasing");
    }
    if let Some(i) = mu.values.iter().position(|v| *v == 0.0) {
        return invalid(format!("mu vanishes at term {}", i + 1));
    }
    let len = lambda_abs.len().min(mu.len());
    let mut acc = 0.0;
    let ratio_curve: Vec<f64> = (0..len)
        .map(|i| {
            acc += lambda_abs.values[i];
            acc / ((i + 1) as f64 * mu.values[i])
        })
        .collect();
    let bounded_estimate = stabilizes(&ratio_curve, slack);
    Ok(DfwwReport { ratio_curve, bounded_estimate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub value: f64,
    pub count: u64,
}

/// Run-length encoded sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RunLength {
    pub runs: Vec<Run>,
}

impl RunLength {
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|r| r.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Term `m`, 1-based.
    pub fn term(&self, m: u64) -> Option<f64> {
        let mut seen = 0u64;
        for r in &self.runs {
            if m <= seen + r.count {
                return (m > seen).then_some(r.value);
            }
            seen += r.count;
        }
        None
    }

    pub fn decode_prefix(&self, len: usize) -> RealSeq {
        let mut values = Vec::with_capacity(len);
        'outer: for r in &self.runs {
            for _ in 0..r.count {
                if values.len() == len {
                    break 'outer;
                }
                values.push(r.value);
            }
        }
        RealSeq { values, monotone: false }
    }

    /// Sum of the first `runs` runs, computed per run as `count * value`.
    pub fn sum_through_run(&self, runs: usize) -> f64 {
        self.runs[..runs].iter().map(|r| r.count as f64 * r.value).sum()
    }

    pub fn pointwise_min(&self, other: &RunLength) -> RunLength {
        let mut out: Vec<Run> = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (mut left_a, mut left_b) = (
            self.runs.first().map_or(0, |r| r.count),
            other.runs.first().map_or(0, |r| r.count),
        );
        while i < self.runs.len() && j < other.runs.len() {
            let take = left_a.min(left_b);
            let value = self.runs[i].value.min(other.runs[j].value);
            match out.last_mut() {
                Some(last) if last.value == value => last.count += take,
                _ => out.push(Run { value, count: take }),
            }
            left_a -= take;
            left_b -= take;
            if left_a == 0 {
                i += 1;
                left_a = self.runs.get(i).map_or(0, |r| r.count);
            }
            if left_b == 0 {
                j += 1;
                left_b = other.runs.get(j).map_or(0, |r| r.count);
            }
        }
        RunLength { runs: out }
    }
}

/// Two nonsummable sequences with summable minimum, laid out on the blocks
/// `(s_{k-1}, s_k]` of length `2^{n_k}`, `n_k = k(k+1)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionWitness {
    pub blocks: usize,
    /// `n_k` for `k = 1..=blocks`.
    pub n: Vec<u32>,
    /// `s_k` for `k = 0..=blocks`.
    pub s: Vec<u64>,
    /// One run per block.
    pub c: RunLength,
    pub z: RunLength,
}

impl IntersectionWitness {
    pub fn c_and_z(&self) -> RunLength {
        self.c.pointwise_min(&self.z)
    }
}

pub const INTERSECTION_MAX_BLOCKS: usize = 10;

/// Builds the witness through block `blocks` (at most 10, so that `s_k` fits in 64 bits).
pub fn intersection_witness(blocks: usize) -> Result<IntersectionWitness> {
    if blocks == 0 || blocks > INTERSECTION_MAX_BLOCKS {
        return invalid(format!("blocks must lie in 1..={INTERSECTION_MAX_BLOCKS}"));
    }
    let nk = |k: usize| (k * (k + 1) / 2) as u32;
    let pow = |e: u32| 2f64.powi(-(e as i32) + 1);
    let n: Vec<u32> = (1..=blocks).map(nk).collect();
    let mut s = vec![0u64];
    for k in 1..=blocks {
        s.push(s[k - 1] + (1u64 << nk(k)));
    }
    let mut c = Vec::with_capacity(blocks);
    let mut z = Vec::with_capacity(blocks);
    for k in 1..=blocks {
        let count = 1u64 << nk(k);
        c.push(Run { value: pow(nk(2 * k.div_ceil(2))), count });
        let zv = if k == 1 { 1.0 } else { pow(nk(2 * (k / 2) + 1)) };
        z.push(Run { value: zv, count });
    }
    Ok(IntersectionWitness {
        blocks,
        n,
        s,
        c: RunLength { runs: c },
        z: RunLength { runs: z },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> RealSeq {
        RealSeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn monotonize_sorts() {
        assert_eq!(monotonize(&seq(&[0.5, 1.0, 0.25])).values(), &[1.0, 0.5, 0.25]);
        assert!(monotonize(&RealSeq::empty()).is_empty());
    }

    #[test]
    fn monotonize_enumerated_c() {
        let mut v = Vec::new();
        for n in 1..=4usize {
            for k in 1..=n {
                v.push((n - k + 1) as f64 / (n * n) as f64);
            }
        }
        let m = monotonize(&seq(&v));
        let expect = [1.0, 0.5, 1.0 / 3.0, 0.25, 0.25, 2.0 / 9.0];
        for (a, b) in m.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn ampliate_examples() {
        let s = seq(&[1.0, 0.5, 1.0 / 3.0]);
        assert_eq!(ampliate(&s, 1).unwrap(), s);
        assert_eq!(
            ampliate(&s, 2).unwrap().values(),
            &[1.0, 1.0, 0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0]
        );
        assert!(ampliate(&s, 0).is_err());
    }

    #[test]
    fn pointwise_examples() {
        let m = pointwise(Pointwise::Min, &seq(&[1.0, 0.5]), Some(&seq(&[0.7, 0.7]))).unwrap();
        assert_eq!(m.values(), &[0.7, 0.5]);
        let r = pointwise(Pointwise::Sqrt, &seq(&[4.0, 1.0, 0.25]), None).unwrap();
        assert_eq!(r.values(), &[2.0, 1.0, 0.5]);
        assert!(pointwise(Pointwise::Sum, &seq(&[1.0]), Some(&seq(&[1.0, 2.0]))).is_err());
        assert!(pointwise(Pointwise::Product, &seq(&[1.0]), None).is_err());
    }

    #[test]
    fn direct_sum_examples() {
        let r = direct_sum(&seq(&[1.0, 1.0 / 3.0]), &seq(&[0.5, 0.25]));
        assert_eq!(r.values(), &[1.0, 0.5, 1.0 / 3.0, 0.25]);
        let z = direct_sum(&seq(&[0.2, 0.9]), &seq(&[0.0, 0.0]));
        assert_eq!(z.values(), &[0.9, 0.2, 0.0, 0.0]);
    }

    #[test]
    fn partial_sums_examples() {
        assert_eq!(partial_sums(&seq(&[1.0, 1.0, 1.0])).values(), &[1.0, 2.0, 3.0]);
        assert!(partial_sums(&RealSeq::empty()).is_empty());
    }

    #[test]
    fn dominated_examples() {
        let t = RealSeq::new_monotone((1..=50).map(|n| 1.0 / n as f64).collect()).unwrap();
        let d = dominated_by(&t, &t, 4, 0.01).unwrap();
        assert_eq!((d.found, d.k, d.m), (true, Some(1), Some(1.0)));

        let s = RealSeq::new_monotone((1..=500).map(|n| 1.0 / (n as f64).sqrt()).collect()).unwrap();
        let t = RealSeq::new_monotone((1..=500).map(|n| 1.0 / n as f64).collect()).unwrap();
        assert!(!dominated_by(&s, &t, 8, 0.01).unwrap().found);

        let s = RealSeq::new_monotone((1..=40).map(|n| 2f64.powi(-((n + 1) / 2))).collect())
            .unwrap();
        let t = RealSeq::new_monotone((1..=40).map(|n| 2f64.powi(-n)).collect()).unwrap();
        let d = dominated_by(&s, &t, 4, 0.01).unwrap();
        assert_eq!((d.found, d.k, d.m), (true, Some(2), Some(1.0)));

        assert!(dominated_by(&seq(&[0.1, 0.2]), &t, 2, 0.01).is_err());
    }

    #[test]
    fn dfww_examples() {
        let h = RealSeq::new_monotone((1..=400).map(|n| 1.0 / n as f64).collect()).unwrap();
        let r = dfww_test(&h, &h, 0.01).unwrap();
        let hn: f64 = (1..=400).map(|n| 1.0 / n as f64).sum();
        assert!((r.ratio_curve[399] - hn).abs() < 1e-12);
        assert!(!r.bounded_estimate);

        let l = RealSeq::new((1..=400).map(|n| 1.0 / (n * n) as f64).collect()).unwrap();
        let r = dfww_test(&l, &h, 0.01).unwrap();
        assert!(r.bounded_estimate);
        assert!(r.ratio_curve.iter().all(|v| *v <= std::f64::consts::PI.powi(2) / 6.0));

        let g = RealSeq::new_monotone((1..=40).map(|n| 2f64.powi(-n)).collect()).unwrap();
        assert!(!dfww_test(&g, &g, 0.01).unwrap().bounded_estimate);
        assert!(dfww_test(&g, &seq(&[1.0, 0.0]), 0.01).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = seq(&[1.0, 0.5, 0.125]);
        let text = s.to_csv().unwrap();
        assert!(text.starts_with("value\n"));
        assert_eq!(RealSeq::from_csv(&text).unwrap(), s);
    }

    #[test]
    fn run_length_min_and_lookup() {
        let a = RunLength { runs: vec![Run { value: 1.0, count: 3 }, Run { value: 0.5, count: 2 }] };
        let b = RunLength { runs: vec![Run { value: 0.7, count: 4 }, Run { value: 0.6, count: 1 }] };
        let m = a.pointwise_min(&b);
        assert_eq!(m.decode_prefix(10).values(), &[0.7, 0.7, 0.7, 0.5, 0.5]);
        assert_eq!(a.term(4), Some(0.5));
        assert_eq!(a.term(6), None);
        assert_eq!(a.term(0), None);
    }

    #[test]
    fn intersection_block_values() {
        let w = intersection_witness(6).unwrap();
        assert_eq!(w.s[1], 2);
        assert_eq!(w.s[2], 2 + 8);
        let cz = w.c_and_z();
        let mut acc = 0.0;
        for k in 1..=6 {
            acc += cz.runs[k - 1].count as f64 * cz.runs[k - 1].value;
            assert_eq!(acc, 1.0 - 2f64.powi(-(k as i32)));
        }
        assert!(intersection_witness(11).is_err());
    }
}
