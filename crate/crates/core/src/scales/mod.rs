//! The gap set `Z` and its scale table.
//!
//! Scales follow the recurrence `N_0 = 0`, `M_0 = 1`,
//! `N_{K+1} = (2^{M_K} + 1) · M_K`, with the interval top fixed by the
//! policy `M_K = β·c_K + D_{K-1}` where `c_K = N_K + 1 + D_{K-1}`,
//! `D_0 = 0`, `D_K = D_{K-1} + L_K·c_K` and `L_K = β`. The derived
//! quantities `c_K`, `L_K`, `D_K` parameterize the visit-time lattice
//! (see [`crate::lattice`]); `Z = ⋃_{K≥1} [N_K, M_K] ∩ ℕ` is thick, with
//! interval widths strictly increasing.

mod exactnat;

pub use exactnat::{parse_exactnat, ExactNat};

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Default decimal-digit materialization cap. Scale-3 endpoints
/// (about 1.26 million digits) materialize; scale 4 on stays symbolic.
pub const DEFAULT_DIGIT_CAP: u64 = 2_000_000;

/// Default interval-top policy parameter.
pub const DEFAULT_BETA: u64 = 4;

/// Guard for the on-demand extension of the recurrence past the built
/// table; magnitudes beyond this many scales are out of desk range.
const VIRTUAL_SCALE_LIMIT: u32 = 32;

/// One row of the scale table; `c`, `l` are absent at `K = 0`.
#[derive(Clone, Debug)]
pub struct ScaleRow {
    pub scale: u32,
    pub n: ExactNat,
    pub m: ExactNat,
    pub c: Option<ExactNat>,
    pub l: Option<u64>,
    pub d: ExactNat,
}

/// The scale table: rows `K = 0..=k_max` plus the policy parameters.
#[derive(Clone, Debug)]
pub struct ScaleTable {
    rows: Vec<ScaleRow>,
    beta: u64,
    digit_cap: u64,
}

/// Construct the table for scales `0..=k_max` under policy parameter `β`.
///
/// Values small enough fold to literals; larger rows are stored in
/// expression form and materialize on demand subject to `digit_cap`.
pub fn build_scale_table(k_max: u32, beta: u64, digit_cap: u64) -> Result<ScaleTable> {
    if beta < 2 {
        return Err(Error::Config(format!("beta must be >= 2, got {beta}")));
    }
    let mut rows = Vec::with_capacity(k_max as usize + 1);
    rows.push(ScaleRow {
        scale: 0,
        n: ExactNat::zero(),
        m: ExactNat::one(),
        c: None,
        l: None,
        d: ExactNat::zero(),
    });
    for k in 1..=k_max {
        let prev = rows.last().expect("row 0 present");
        let m_prev = prev.m.clone();
        let d_prev = prev.d.clone();
        let n = ExactNat::mul(
            ExactNat::add(ExactNat::pow2(m_prev.clone()), ExactNat::one()),
            m_prev,
        );
        let c = ExactNat::add(n.clone(), ExactNat::add(ExactNat::one(), d_prev.clone()));
        let growth = ExactNat::mul(ExactNat::from_u64(beta), c.clone());
        let m = ExactNat::add(growth.clone(), d_prev.clone());
        let d = ExactNat::add(d_prev, growth);
        rows.push(ScaleRow { scale: k, n, m, c: Some(c), l: Some(beta), d });
    }
    Ok(ScaleTable { rows, beta, digit_cap })
}

impl ScaleTable {
    pub fn k_max(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    pub fn digit_cap(&self) -> u64 {
        self.digit_cap
    }

    pub fn rows(&self) -> &[ScaleRow] {
        &self.rows
    }

    pub fn row(&self, k: u32) -> Result<&ScaleRow> {
        self.rows
            .get(k as usize)
            .ok_or(Error::UnmaterializedScale { scale: k })
    }

    pub fn n(&self, k: u32) -> Result<&ExactNat> {
        Ok(&self.row(k)?.n)
    }

    pub fn m(&self, k: u32) -> Result<&ExactNat> {
        Ok(&self.row(k)?.m)
    }

    pub fn c(&self, k: u32) -> Result<&ExactNat> {
        self.row(k)?
            .c
            .as_ref()
            .ok_or(Error::UnmaterializedScale { scale: k })
    }

    pub fn l(&self, k: u32) -> Result<u64> {
        self.row(k)?
            .l
            .ok_or(Error::UnmaterializedScale { scale: k })
    }

    pub fn d(&self, k: u32) -> Result<&ExactNat> {
        Ok(&self.row(k)?.d)
    }

    /// Interval width `M_K − N_K + 1`, built additively from the policy
    /// identity `width = (β−1)·c_K + 2·D_{K−1} + 2`.
    pub fn interval_width(&self, k: u32) -> Result<ExactNat> {
        if k == 0 {
            return Ok(ExactNat::from_u64(2));
        }
        let c = self.c(k)?.clone();
        let d_prev = self.d(k - 1)?.clone();
        Ok(ExactNat::add(
            ExactNat::mul(ExactNat::from_u64(self.beta - 1), c),
            ExactNat::add(
                ExactNat::mul(ExactNat::from_u64(2), d_prev),
                ExactNat::from_u64(2),
            ),
        ))
    }

    /// Largest lattice level `T` whose gap arithmetic is materialized:
    /// `D_{T-1}` must fit the digit cap (the signed low-order part of any
    /// level-`T` gap is bounded by it).
    pub fn usable_level_top(&self) -> u32 {
        let mut top = 0;
        for t in 1..=self.k_max() {
            if self.rows[(t - 1) as usize].d.materializes(self.digit_cap) {
                top = t;
            } else {
                break;
            }
        }
        top
    }

    /// Largest scale whose interval endpoints all materialize.
    pub fn endpoint_top(&self) -> u32 {
        let mut top = 0;
        for k in 1..=self.k_max() {
            let row = &self.rows[k as usize];
            if row.m.materializes(self.digit_cap) {
                top = k;
            } else {
                break;
            }
        }
        top
    }

    /// `(N_{K+1}, c_{K+1})` continued past the built rows, in expression
    /// form; `k` must be the last built scale or smaller.
    pub fn virtual_next(&self, k: u32) -> Result<(ExactNat, ExactNat)> {
        let row = self.row(k)?;
        let n_next = ExactNat::mul(
            ExactNat::add(ExactNat::pow2(row.m.clone()), ExactNat::one()),
            row.m.clone(),
        );
        let c_next = ExactNat::add(
            n_next.clone(),
            ExactNat::add(ExactNat::one(), row.d.clone()),
        );
        Ok((n_next, c_next))
    }

    /// Check every table invariant that is decidable by exact comparison.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.rows[0].n != ExactNat::zero() || self.rows[0].m != ExactNat::one() {
            return fail("row 0 must be (N_0, M_0) = (0, 1)".into());
        }
        for k in 1..=self.k_max() {
            let prev = &self.rows[(k - 1) as usize];
            let row = &self.rows[k as usize];
            let n_expect = ExactNat::mul(
                ExactNat::add(ExactNat::pow2(prev.m.clone()), ExactNat::one()),
                prev.m.clone(),
            );
            if row.n != n_expect {
                return fail(format!("N_{k} violates the recurrence"));
            }
            let c = row.c.as_ref().expect("c present for K >= 1");
            let c_expect = ExactNat::add(
                row.n.clone(),
                ExactNat::add(ExactNat::one(), prev.d.clone()),
            );
            if *c != c_expect {
                return fail(format!("c_{k} != N_{k} + 1 + D_{}", k - 1));
            }
            if row.l != Some(self.beta) {
                return fail(format!("L_{k} != beta"));
            }
            if !(row.n < *c && *c <= row.m) {
                return fail(format!("N_{k} < c_{k} <= M_{k} fails"));
            }
            // L_K·c_K + D_{K-1} <= M_K (span bound).
            let span = ExactNat::add(
                ExactNat::mul(ExactNat::from_u64(self.beta), c.clone()),
                prev.d.clone(),
            );
            if span > row.m {
                return fail(format!("span bound fails at scale {k}"));
            }
            // Separation M_{K-1} < N_K.
            if prev.m >= row.n {
                return fail(format!("intervals {k} and {} not separated", k - 1));
            }
            // Widths strictly increase.
            let w_prev = self.interval_width(k - 1)?;
            let w = self.interval_width(k)?;
            if w <= w_prev {
                return fail(format!("interval width not increasing at scale {k}"));
            }
        }
        Ok(())
    }

    /// The gap set backed by this table.
    pub fn zset(&self) -> ZSet {
        ZSet { table: self.clone() }
    }
}

/// `Z = ⋃_{K≥1} [N_K, M_K] ∩ ℕ`.
#[derive(Clone, Debug)]
pub struct ZSet {
    table: ScaleTable,
}

impl ZSet {
    pub fn table(&self) -> &ScaleTable {
        &self.table
    }

    /// Membership with witness scale: `Some(K)` iff `N_K <= m <= M_K`.
    ///
    /// Queries past the built rows extend the recurrence on demand, so the
    /// decision covers all of `Z`, not just the materialized prefix.
    pub fn contains(&self, m: &ExactNat) -> Option<u32> {
        let mut k = 1u32;
        // Beyond the table, carry (N_k, c_k, D_{k-1}) forward.
        let mut virt: Option<(ExactNat, ExactNat, ExactNat)> = None;
        loop {
            assert!(
                k <= VIRTUAL_SCALE_LIMIT,
                "membership query beyond supported magnitude"
            );
            let (n_k, m_k, d_k) = if k <= self.table.k_max() {
                let row = &self.table.rows[k as usize];
                (row.n.clone(), row.m.clone(), row.d.clone())
            } else {
                let (n_k, c_k, d_prev) = virt.take().unwrap_or_else(|| {
                    let last = self.table.k_max();
                    let (n, c) = self.table.virtual_next(last).expect("last row exists");
                    (n, c, self.table.rows[last as usize].d.clone())
                });
                let growth = ExactNat::mul(ExactNat::from_u64(self.table.beta), c_k);
                let m_k = ExactNat::add(growth.clone(), d_prev.clone());
                let d_k = ExactNat::add(d_prev, growth);
                (n_k, m_k, d_k)
            };
            if m.cmp_nat(&n_k) == Ordering::Less {
                return None;
            }
            if m.cmp_nat(&m_k) != Ordering::Greater {
                return Some(k);
            }
            if k + 1 > self.table.k_max() {
                let n_next = ExactNat::mul(
                    ExactNat::add(ExactNat::pow2(m_k.clone()), ExactNat::one()),
                    m_k,
                );
                let c_next = ExactNat::add(
                    n_next.clone(),
                    ExactNat::add(ExactNat::one(), d_k.clone()),
                );
                virt = Some((n_next, c_next, d_k));
            }
            k += 1;
        }
    }

    /// The `i`-th smallest element of `Z` (0-indexed).
    pub fn enumerate(&self, i: &BigUint) -> Result<ExactNat> {
        let mut cum = BigUint::zero();
        for k in 1..=self.table.k_max() {
            let row = &self.table.rows[k as usize];
            if !row.m.materializes(self.table.digit_cap) {
                return Err(Error::IndexBeyondMaterialization { first_unmaterialized: k });
            }
            let width = self
                .table
                .interval_width(k)?
                .eval_guarded(u64::MAX)
                .expect("materializable width");
            if i < &(&cum + &width) {
                let offset = i - &cum;
                return Ok(ExactNat::add(
                    row.n.clone(),
                    ExactNat::from_biguint(offset),
                ));
            }
            cum += width;
        }
        Err(Error::IndexBeyondMaterialization {
            first_unmaterialized: self.table.k_max() + 1,
        })
    }

    /// The forbidden-return window at scale `K`:
    /// `(M_K + 1, (2^{M_K} + 1)·M_K)`; the top equals `N_{K+1}`.
    pub fn gap_window(&self, k: u32) -> Result<(ExactNat, ExactNat)> {
        let row = self.table.row(k)?;
        let lo = ExactNat::add(row.m.clone(), ExactNat::one());
        let hi = ExactNat::mul(
            ExactNat::add(ExactNat::pow2(row.m.clone()), ExactNat::one()),
            row.m.clone(),
        );
        Ok((lo, hi))
    }

    /// Smallest scale whose interval holds a block of `len` consecutive
    /// integers, among materialized scales.
    pub fn thick_witness(&self, len: &ExactNat) -> Option<u32> {
        for k in 1..=self.table.k_max() {
            if let Ok(width) = self.table.interval_width(k) {
                if width.cmp_nat(len) != Ordering::Less {
                    return Some(k);
                }
            }
        }
        None
    }
}

/// Decimal string when the value materializes under `cap`, else the
/// expression string.
pub fn value_string(v: &ExactNat, cap: u64) -> String {
    match v.to_decimal(cap) {
        Ok(s) => s,
        Err(_) => v.to_string(),
    }
}
