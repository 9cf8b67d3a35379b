use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Strictly increasing index maps `r_0, ..., r_m` whose ranges partition an
/// initial segment of the positive integers. Slot 0 feeds spanning vectors,
/// slot `k ≥ 1` feeds `T_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum SupportProfile {
    /// `r_0(n) = (m+1)(n−1) + 1`, `r_k(n) = r_0(n) + k`; lengths `(m+1)n`.
    Classic { slots: usize },
    /// `r_0 = 1, 9, 27, 81, ...`, `r_1(n) = 3^j + n − 3^{j−1}` with `j = ⌈log_3 n⌉`, `r_2` the rest.
    T3aa,
    /// `r_0(n) = 2^{n+1} − n − 2`, `r_1`, `r_2` filling each gap two at a time.
    Symmetric,
    /// `r_0 = {1}`, `r_1(n) = 2n`, `r_2(n) = 2n + 1`.
    Cyclic,
    /// Finite prefixes, one per slot.
    Explicit { r: Vec<Vec<usize>> },
}

fn pow3(j: u32) -> usize {
    3usize.pow(j)
}

/// Smallest `j` with `3^j ≥ n`.
fn ceil_log3(n: usize) -> u32 {
    let mut j = 0;
    while pow3(j) < n {
        j += 1;
    }
    j
}

fn sym_r0(n: usize) -> usize {
    (1usize << (n + 1)) - n - 2
}

impl SupportProfile {
    pub fn classic_one_op() -> SupportProfile {
        SupportProfile::Classic { slots: 2 }
    }

    pub fn name(&self) -> String {
        match self {
            SupportProfile::Classic { slots } => format!("classic-{slots}"),
            SupportProfile::T3aa => "t3aa".into(),
            SupportProfile::Symmetric => "symmetric".into(),
            SupportProfile::Cyclic => "cyclic".into(),
            SupportProfile::Explicit { .. } => "explicit".into(),
        }
    }

    /// Number of operator slots `m`.
    pub fn slots(&self) -> usize {
        match self {
            SupportProfile::Classic { slots } => *slots,
            SupportProfile::T3aa | SupportProfile::Symmetric | SupportProfile::Cyclic => 2,
            SupportProfile::Explicit { r } => r.len().saturating_sub(1),
        }
    }

    /// `r_k(n)` for `n ≥ 1`, or `None` where the map is undefined.
    pub fn r(&self, k: usize, n: usize) -> Option<usize> {
        if n == 0 || k > self.slots() {
            return None;
        }
        match self {
            SupportProfile::Classic { slots } => Some((slots + 1) * (n - 1) + 1 + k),
            SupportProfile::T3aa => Some(match (k, n) {
                (0, 1) => 1,
                (0, n) => 3usize.checked_pow(u32::try_from(n).ok()?)?,
                (1, 1) => 2,
                (1, n) => {
                    let j = ceil_log3(n);
                    pow3(j) + n - pow3(j - 1)
                }
                (_, 1) => 3,
                (_, n) => {
                    let mut idx = n - 2;
                    let mut j = 1u32;
                    loop {
                        let size = 4 * pow3(j - 1) - 1;
                        if idx < size {
                            break pow3(j) + 2 * pow3(j - 1) + 1 + idx;
                        }
                        idx -= size;
                        j += 1;
                    }
                }
            }),
            SupportProfile::Symmetric => {
                if k == 0 {
                    return (n < 60).then(|| sym_r0(n));
                }
                if n == 1 {
                    return Some(k + 1);
                }
                let mut level = 2;
                while sym_r0(level) < n {
                    level += 1;
                }
                let r1 = sym_r0(level) + 2 * (n - sym_r0(level - 1)) - 1;
                Some(if k == 1 { r1 } else { r1 + 1 })
            }
            SupportProfile::Cyclic => match k {
                0 => (n == 1).then_some(1),
                1 => Some(2 * n),
                _ => Some(2 * n + 1),
            },
            SupportProfile::Explicit { r } => r[k].get(n - 1).copied(),
        }
    }

    /// Column support length `r_1`.
    pub fn r1(&self, n: usize) -> Option<usize> {
        self.r(1, n)
    }

    /// Row support length `r_2` (the column length of the second slot).
    pub fn r2(&self, n: usize) -> Option<usize> {
        self.r(2.min(self.slots()), n)
    }

    /// `owners[i−1] = (k, n)` with `r_k(n) = i` for `i ≤ bound`. Fails unless
    /// the maps are strictly increasing, `r_0(1) = 1`, and their ranges
    /// partition `{1, ..., bound}`.
    pub fn owner_table(&self, bound: usize) -> Result<Vec<(usize, usize)>> {
        if self.r(0, 1) != Some(1) {
            return invalid("r_0(1) must be 1");
        }
        if let SupportProfile::Explicit { r } = self {
            if r.is_empty() {
                return invalid("explicit profile needs at least r_0");
            }
        }
        let mut owners: Vec<Option<(usize, usize)>> = vec![None; bound];
        for k in 0..=self.slots() {
            let mut prev = 0usize;
            let mut n = 1;
            while let Some(v) = self.r(k, n) {
                if v <= prev {
                    return invalid(format!("r_{k} is not strictly increasing at n = {n}"));
                }
                if v > bound {
                    break;
                }
                if let Some((k2, n2)) = owners[v - 1] {
                    return invalid(format!("index {v} is hit by r_{k}({n}) and r_{k2}({n2})"));
                }
                owners[v - 1] = Some((k, n));
                prev = v;
                n += 1;
            }
        }
        owners
            .into_iter()
            .enumerate()
            .map(|(i, o)| match o {
                Some(o) => Ok(o),
                None => invalid(format!("index {} is not covered by the profile", i + 1)),
            })
            .collect()
    }
}
